"""Finite abelian p-groups A = Z/p^k1 x ... x Z/p^kr and their subgroups.

Elements are coordinate tuples.  Subgroups of desk-scale groups are handled by
explicit enumeration: every element is encoded as an integer in mixed radix
(first coordinate most significant, so integer order is lexicographic order).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .coefficients import is_prime

DEFAULT_CAP = 2**16


class CapExceeded(RuntimeError):
    """The group is too large to enumerate under the configured cap."""


class ConsistencyError(AssertionError):
    """Two routes that must agree did not."""


@dataclass(frozen=True)
class AbelianPGroup:
    p: int
    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        exps = tuple(int(k) for k in self.exponents)
        if any(k < 1 for k in exps):
            raise ValueError(f"cyclic exponents must be >= 1, got {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**k for k in self.exponents)

    @property
    def order(self) -> int:
        return self.p ** sum(self.exponents)

    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def element(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.rank:
            raise ValueError(f"element {tuple(coords)} has wrong length for {self}")
        return tuple(int(c) % m for c, m in zip(coords, self.moduli))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def scale(self, k: int, a) -> tuple[int, ...]:
        return tuple((k * x) % m for x, m in zip(a, self.moduli))

    def element_order(self, a) -> int:
        o = 1
        while any(x for x in self.scale(o, a)):
            o *= self.p
        return o

    def product(self, other: "AbelianPGroup") -> "AbelianPGroup":
        if other.p != self.p:
            raise ValueError("groups at different primes")
        return AbelianPGroup(self.p, self.exponents + other.exponents)

    # -- integer encoding -------------------------------------------------

    def check_cap(self, cap: int = DEFAULT_CAP) -> None:
        if self.order > cap:
            raise CapExceeded(f"|{self}| = {self.order} exceeds the enumeration cap {cap}")

    def encode(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if self.rank == 0:
            return np.zeros(coords.shape[0] if coords.ndim == 2 else 1, dtype=np.int64)
        coords = coords.reshape(-1, self.rank)
        return np.ravel_multi_index(tuple(coords.T), self.moduli)

    def decode(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        if self.rank == 0:
            return np.zeros((codes.size, 0), dtype=np.int64)
        return np.stack(np.unravel_index(codes, self.moduli), axis=-1)

    def add_codes(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """All sums a_i + b_j, as a flat array of codes."""
        if self.rank == 0:
            return np.zeros(len(a) * len(b), dtype=np.int64)
        ca, cb = self.decode(a), self.decode(b)
        s = (ca[:, None, :] + cb[None, :, :]) % np.array(self.moduli)
        return self.encode(s.reshape(-1, self.rank))

    def all_codes(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def __str__(self):
        if not self.exponents:
            return "1"
        return " x ".join(f"Z/{self.p}^{k}" if k > 1 else f"Z/{self.p}" for k in self.exponents)


def _span(G: AbelianPGroup, gens: Iterable[Sequence[int]]) -> np.ndarray:
    """Sorted codes of the subgroup generated by ``gens``."""
    elems = np.zeros(1, dtype=np.int64)
    for g in gens:
        g = G.element(g)
        o = G.element_order(g)
        cyc = G.encode(np.array([G.scale(k, g) for k in range(o)], dtype=np.int64))
        if np.all(np.isin(cyc, elems)):
            continue
        elems = np.unique(G.add_codes(elems, cyc))
    return np.sort(elems)


def _orders(G: AbelianPGroup, codes: np.ndarray) -> np.ndarray:
    coords = G.decode(codes)
    out = np.ones(len(codes), dtype=np.int64)
    for i, m in enumerate(G.moduli):
        c = coords[:, i]
        nz = c != 0
        # order of c in Z/m is m / gcd(c, m)
        out = np.where(nz, np.maximum(out, m // np.gcd(c, m)), out)
    return out


def _basis_from_elements(G: AbelianPGroup, elems: np.ndarray) -> tuple[tuple[int, ...], ...]:
    """Greedy independent basis: maximal order modulo the span so far, smallest code."""
    p = G.p
    basis: list[tuple[int, ...]] = []
    span = np.zeros(1, dtype=np.int64)
    coords = G.decode(elems)
    moduli = np.array(G.moduli, dtype=np.int64)
    actual = _orders(G, elems)
    while len(span) < len(elems):
        # order of every element modulo the current span
        rel = np.ones(len(elems), dtype=np.int64)
        mult = coords.copy()
        k = 1
        inside = np.isin(G.encode(mult % moduli), span)
        while not np.all(inside):
            k *= p
            rel = np.where(inside, rel, k)
            mult = (coords * k) % moduli
            inside = inside | np.isin(G.encode(mult), span)
        top = rel.max()
        cand = np.nonzero((rel == top) & (actual == top))[0]
        if len(cand) == 0:
            raise ConsistencyError("no lift of maximal order found while building a basis")
        pick = int(elems[cand].min())
        h = tuple(int(c) for c in G.decode(np.array([pick]))[0])
        basis.append(h)
        span = np.unique(G.add_codes(span, _span(G, [h])))
    return tuple(basis)


@dataclass(frozen=True, eq=False)
class Subgroup:
    ambient: AbelianPGroup
    generators: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "generators", tuple(self.ambient.element(g) for g in self.generators)
        )

    @cached_property
    def elements(self) -> np.ndarray:
        """Sorted integer codes of all elements."""
        return _span(self.ambient, self.generators)

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(int(c) for c in self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        return _basis_from_elements(self.ambient, self.elements)

    @property
    def basis_orders(self) -> tuple[int, ...]:
        return tuple(self.ambient.element_order(h) for h in self.basis)

    def abstract(self) -> AbelianPGroup:
        """The subgroup as a product of cyclic groups, one per basis element."""
        exps = []
        for o in self.basis_orders:
            k = 0
            while o > 1:
                o //= self.ambient.p
                k += 1
            exps.append(k)
        return AbelianPGroup(self.ambient.p, tuple(exps))

    def inclusion(self) -> "GroupHom":
        """The inclusion of ``abstract()`` into the ambient group, basis element j -> column j."""
        cols = self.basis
        matrix = tuple(tuple(h[i] for h in cols) for i in range(self.ambient.rank))
        return GroupHom(self.abstract(), self.ambient, matrix)

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.ambient == other.ambient and self.element_set == other.element_set

    def __hash__(self):
        return hash((self.ambient, self.element_set))

    def __repr__(self):
        gens = ", ".join(str(h) for h in self.basis) or "0"
        return f"<{gens}> <= {self.ambient}"


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism of abelian p-groups; column j is the image of the j-th domain generator."""

    domain: AbelianPGroup
    codomain: AbelianPGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(rows) != self.codomain.rank or any(len(r) != self.domain.rank for r in rows):
            raise ValueError(
                f"matrix shape must be {self.codomain.rank} x {self.domain.rank}, got {rows}"
            )
        rows = tuple(tuple(x % m for x in row) for row, m in zip(rows, self.codomain.moduli))
        object.__setattr__(self, "matrix", rows)
        for j, mj in enumerate(self.domain.moduli):
            for i, mi in enumerate(self.codomain.moduli):
                if (mj * rows[i][j]) % mi:
                    raise ValueError(
                        f"generator {j} has order {mj} but its image has a larger order"
                    )

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.matrix)

    def __call__(self, a) -> tuple[int, ...]:
        out = self.codomain.identity()
        for j, c in enumerate(a):
            out = self.codomain.add(out, self.codomain.scale(c, self.column(j)))
        return out

    def image(self) -> Subgroup:
        return Subgroup(self.codomain, tuple(self.column(j) for j in range(self.domain.rank)))

    def is_injective(self) -> bool:
        return self.image().order == self.domain.order

    def compose(self, first: "GroupHom") -> "GroupHom":
        """self o first."""
        if first.codomain != self.domain:
            raise ValueError("homomorphisms are not composable")
        cols = [self(first.column(j)) for j in range(first.domain.rank)]
        matrix = tuple(tuple(c[i] for c in cols) for i in range(self.codomain.rank))
        return GroupHom(first.domain, self.codomain, matrix)

    @classmethod
    def identity(cls, G: AbelianPGroup) -> "GroupHom":
        return cls(G, G, tuple(tuple(int(i == j) for j in range(G.rank)) for i in range(G.rank)))

    @classmethod
    def diagonal(cls, G: AbelianPGroup) -> "GroupHom":
        eye = [tuple(int(i == j) for j in range(G.rank)) for i in range(G.rank)]
        return cls(G, G.product(G), tuple(eye + eye))


def subgroup_basis(amb: AbelianPGroup, gens: Sequence[Sequence[int]]) -> Subgroup:
    S = Subgroup(amb, tuple(tuple(g) for g in gens))
    S.basis  # noqa: B018 - computed eagerly so malformed input fails here
    return S


def _same_ambient(H: Subgroup, K: Subgroup) -> AbelianPGroup:
    if H.ambient != K.ambient:
        raise ValueError(f"subgroups of different groups: {H.ambient} vs {K.ambient}")
    return H.ambient


def subgroup_join(H: Subgroup, K: Subgroup) -> Subgroup:
    G = _same_ambient(H, K)
    return Subgroup(G, H.basis + K.basis)


def _from_codes(G: AbelianPGroup, codes: np.ndarray) -> Subgroup:
    codes = np.sort(np.asarray(codes, dtype=np.int64))
    basis = _basis_from_elements(G, codes)
    S = Subgroup(G, basis)
    S.__dict__["elements"] = codes
    S.__dict__["basis"] = basis
    return S


def subgroup_intersection(H: Subgroup, K: Subgroup, cap: int = DEFAULT_CAP) -> Subgroup:
    G = _same_ambient(H, K)
    G.check_cap(cap)
    return _from_codes(G, np.intersect1d(H.elements, K.elements))


@dataclass(frozen=True)
class TransversalityReport:
    transverse: bool
    product_is_whole: bool  # HK = G
    order_identity: bool  # |H||K| / |H n K| = |G|
    gset_bijective: bool  # G/(H n K) -> G/H x G/K is onto
    order_h: int
    order_k: int
    order_meet: int
    order_join: int


def _coset_labels(G: AbelianPGroup, S: Subgroup) -> np.ndarray:
    """Smallest code in g + S for every g in G."""
    sums = G.add_codes(G.all_codes(), S.elements).reshape(G.order, S.order)
    return sums.min(axis=1)


def is_transverse(H: Subgroup, K: Subgroup, cap: int = DEFAULT_CAP) -> TransversalityReport:
    G = _same_ambient(H, K)
    G.check_cap(cap)
    join = np.unique(G.add_codes(H.elements, K.elements))
    meet = np.intersect1d(H.elements, K.elements)
    crit_join = len(join) == G.order
    crit_order = H.order * K.order == len(meet) * G.order
    lh, lk = _coset_labels(G, H), _coset_labels(G, K)
    pairs = len(np.unique(lh * G.order + lk))
    crit_gset = pairs == len(np.unique(lh)) * len(np.unique(lk))
    if not (crit_join == crit_order == crit_gset):
        raise ConsistencyError(
            f"transversality criteria disagree for {H} and {K}: "
            f"HK=G {crit_join}, orders {crit_order}, G-sets {crit_gset}"
        )
    return TransversalityReport(
        crit_join, crit_join, crit_order, crit_gset, H.order, K.order, len(meet), len(join)
    )


def enumerate_subgroups(G: AbelianPGroup, cap: int = DEFAULT_CAP) -> list[Subgroup]:
    """Every subgroup exactly once, ordered by (order, sorted element codes)."""
    G.check_cap(cap)
    cyclic: dict[bytes, np.ndarray] = {}
    for code in G.all_codes():
        g = tuple(int(c) for c in G.decode(np.array([code]))[0])
        elems = _span(G, [g])
        cyclic.setdefault(elems.tobytes(), elems)
    cyclics = list(cyclic.values())
    seen = {np.zeros(1, dtype=np.int64).tobytes(): np.zeros(1, dtype=np.int64)}
    frontier = list(seen.values())
    while frontier:
        nxt = []
        for S in frontier:
            for C in cyclics:
                if np.all(np.isin(C, S)):
                    continue
                J = np.unique(G.add_codes(S, C))
                key = J.tobytes()
                if key not in seen:
                    seen[key] = J
                    nxt.append(J)
        frontier = nxt
    found = sorted(seen.values(), key=lambda e: (len(e), tuple(e)))
    return [_from_codes(G, e) for e in found]
