"""K(n)*(BA) = K(n)_*[x_1..x_r]/(x_i^{p^{k_i n}}) for finite abelian p-groups A.

A class is stored as its homogeneous parts: degree -> F_p array over the
monomial basis, with v set to 1.  The v exponent of each entry is recovered
from the degree, which is exact because v is the only unit of nonzero degree.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Mapping

import numpy as np

from . import polyarith as pa
from .abelian import AbelianPGroup, GroupHom
from .coefficients import GradedScalar, PrimeContext
from .fgl import formal_sum, honda_fgl, m_series


@dataclass(frozen=True)
class CohomologyRing:
    ctx: PrimeContext
    group: AbelianPGroup

    def __post_init__(self):
        if self.group.p != self.ctx.p:
            raise ValueError(f"group {self.group} is not a {self.ctx.p}-group")

    @property
    def shape(self) -> tuple[int, ...]:
        """Nilpotency orders N_i = p^{k_i n}."""
        return tuple(self.ctx.p ** (k * self.ctx.n) for k in self.group.exponents)

    @property
    def ngens(self) -> int:
        return self.group.rank

    @property
    def rank(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64)) if self.shape else 1

    @property
    def nilpotency_index(self) -> int:
        """Smallest T with I^T = 0 for the augmentation ideal I."""
        return 1 + sum(N - 1 for N in self.shape)

    @cached_property
    def degree_grid(self) -> np.ndarray:
        return pa.total_degree_grid(self.shape)

    def monomials(self):
        """Basis exponents in canonical (lexicographic) order."""
        return itertools.product(*(range(N) for N in self.shape))

    def fgl(self):
        return honda_fgl(self.ctx, max(2, self.nilpotency_index))

    def zero(self) -> "CohomologyClass":
        return CohomologyClass(self, {})

    def one(self) -> "CohomologyClass":
        return self.monomial((0,) * self.ngens)

    def gen(self, i: int) -> "CohomologyClass":
        alpha = [0] * self.ngens
        alpha[i] = 1
        return self.monomial(tuple(alpha))

    def monomial(self, alpha, coeff: GradedScalar | int = 1) -> "CohomologyClass":
        return CohomologyClass.from_terms(self, {tuple(alpha): coeff})

    def __str__(self):
        head = f"K({self.ctx.n})*"
        if not self.shape:
            return head
        names = ["x"] if len(self.shape) == 1 else [f"x{i + 1}" for i in range(len(self.shape))]
        rels = ", ".join(f"{v}^{N}" for v, N in zip(names, self.shape))
        return f"{head}[{', '.join(names)}]/({rels})"


class _GradedElement:
    """Shared storage for cohomology and homology classes.

    ``_SIGN`` is +1 when v^e lowers the degree by e*period (cohomology) and
    -1 when it raises it (homology).
    """

    _SIGN = 1
    _NAME = "x"

    __slots__ = ("ring", "parts")

    def __init__(self, ring: CohomologyRing, parts: Mapping[int, np.ndarray] | None = None):
        self.ring = ring
        p = ring.ctx.p
        clean = {}
        for d, arr in (parts or {}).items():
            arr = pa.reduce(np.asarray(arr, dtype=np.int64).reshape(ring.shape), p)
            if not np.any(arr):
                continue
            self._check_part(int(d), arr)
            arr.setflags(write=False)
            clean[int(d)] = arr
        self.parts = dict(sorted(clean.items()))

    def _check_part(self, d: int, arr: np.ndarray) -> None:
        off = (2 * self.ring.degree_grid - d) % self.ring.ctx.period
        if np.any(arr[off != 0]):
            raise ValueError(f"entries incompatible with degree {d}: v exponent would not be integral")

    def _v_exponent(self, alpha: tuple[int, ...], d: int) -> int:
        return self._SIGN * (2 * sum(alpha) - d) // self.ring.ctx.period

    @classmethod
    def from_terms(cls, ring: CohomologyRing, terms: Mapping[tuple, GradedScalar | int]):
        ctx = ring.ctx
        parts: dict[int, np.ndarray] = {}
        for alpha, c in terms.items():
            alpha = tuple(alpha)
            if len(alpha) != ring.ngens or any(not 0 <= a < N for a, N in zip(alpha, ring.shape)):
                if len(alpha) == ring.ngens and all(a >= 0 for a in alpha):
                    continue  # beyond a nilpotency bound: zero in the ring
                raise ValueError(f"bad monomial exponent {alpha} for {ring}")
            if isinstance(c, int):
                c = ctx.scalar({0: c})
            if c.ctx != ctx:
                raise ValueError("coefficient uses a different prime context")
            for e, coef in c.terms.items():
                d = 2 * sum(alpha) - cls._SIGN * e * ctx.period
                arr = parts.setdefault(d, np.zeros(ring.shape, dtype=np.int64))
                arr[alpha] += coef
        return cls(ring, parts)

    @property
    def coefficients(self) -> dict[tuple[int, ...], GradedScalar]:
        ctx = self.ring.ctx
        out: dict[tuple[int, ...], dict[int, int]] = {}
        for d, arr in self.parts.items():
            for alpha in np.argwhere(arr):
                alpha = tuple(int(a) for a in alpha)
                out.setdefault(alpha, {})[self._v_exponent(alpha, d)] = int(arr[alpha])
        return {a: GradedScalar(ctx, t) for a, t in sorted(out.items())}

    def coefficient(self, alpha) -> GradedScalar:
        return self.coefficients.get(tuple(alpha), self.ring.ctx.zero())

    @property
    def degree(self) -> int | None:
        """The degree when the class is homogeneous (None for zero or mixed classes)."""
        if len(self.parts) == 1:
            return next(iter(self.parts))
        return None

    def is_zero(self) -> bool:
        return not self.parts

    def _same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.ring != self.ring:
            raise ValueError(f"classes live over different groups: {self.ring.group} vs {other.ring.group}")

    def __add__(self, other):
        self._same(other)
        parts = {d: a.copy() for d, a in self.parts.items()}
        for d, a in other.parts.items():
            parts[d] = parts[d] + a if d in parts else a.copy()
        return type(self)(self.ring, parts)

    def __neg__(self):
        return type(self)(self.ring, {d: -a for d, a in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: GradedScalar | int):
        """Multiply by a scalar of K(n)_*."""
        ctx = self.ring.ctx
        if isinstance(c, int):
            c = ctx.scalar({0: c})
        parts: dict[int, np.ndarray] = {}
        for e, coef in c.terms.items():
            shift = -self._SIGN * e * ctx.period
            for d, a in self.parts.items():
                key = d + shift
                parts[key] = parts.get(key, 0) + coef * a
        return type(self)(self.ring, parts)

    __rmul__ = scale

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if other.ring != self.ring or self.parts.keys() != other.parts.keys():
            return False
        return all(np.array_equal(a, other.parts[d]) for d, a in self.parts.items())

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}({format_class(self)})"

    def __str__(self):
        return format_class(self)


def _format_monomial(name: str, alpha: tuple[int, ...]) -> str:
    if not alpha and name == "b":
        return "b_0"
    if len(alpha) == 1 and name == "b":
        return f"b_{alpha[0]}"
    if name == "b":
        return "b_(" + ",".join(map(str, alpha)) + ")"
    bits = []
    for i, a in enumerate(alpha):
        if a:
            v = name if len(alpha) == 1 else f"{name}{i + 1}"
            bits.append(v if a == 1 else f"{v}^{a}")
    return "*".join(bits)


def format_class(c: _GradedElement) -> str:
    terms = []
    for alpha, s in c.coefficients.items():
        for e, coef in s.terms.items():
            mon = _format_monomial(c._NAME, alpha)
            scal = "" if e == 0 else ("v" if e == 1 else f"v^{e}")
            head = "*".join(x for x in (str(coef) if coef != 1 else "", scal) if x)
            if not mon:
                terms.append(head or "1")
            else:
                terms.append(f"{head}*{mon}" if head else mon)
    return " + ".join(terms) if terms else "0"


class CohomologyClass(_GradedElement):
    _SIGN = 1
    _NAME = "x"
    __slots__ = ()

    def __mul__(self, other):
        if isinstance(other, (int, GradedScalar)):
            return self.scale(other)
        return multiply(self, other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined")
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out


def ring_of(ctx: PrimeContext, A: AbelianPGroup) -> CohomologyRing:
    return CohomologyRing(ctx, A)


def multiply(a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
    a._same(b)
    p = a.ring.ctx.p
    parts: dict[int, np.ndarray] = {}
    for d1, x in a.parts.items():
        for d2, y in b.parts.items():
            prod = pa.mul(x, y, p)
            parts[d1 + d2] = parts[d1 + d2] + prod if d1 + d2 in parts else prod
    return CohomologyClass(a.ring, parts)


def external_product(a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
    """a (x) b under K(n)*(BA) (x) K(n)*(BB) = K(n)*(B(A x B))."""
    if a.ring.ctx != b.ring.ctx:
        raise ValueError("rings use different prime contexts")
    ring = CohomologyRing(a.ring.ctx, a.ring.group.product(b.ring.group))
    parts: dict[int, np.ndarray] = {}
    for d1, x in a.parts.items():
        for d2, y in b.parts.items():
            prod = np.multiply.outer(x, y)
            parts[d1 + d2] = parts[d1 + d2] + prod if d1 + d2 in parts else prod
    return CohomologyClass(ring, parts)


class RingHom:
    """A K(n)_*-algebra map determined by the images of the generators.

    The map preserves degree, so on v = 1 arrays it is one F_p matrix
    (``matrix[target index, source index]``) shared by every homogeneous part.
    """

    def __init__(self, source: CohomologyRing, target: CohomologyRing, images):
        images = tuple(images)
        if len(images) != source.ngens:
            raise ValueError(f"need {source.ngens} generator images, got {len(images)}")
        for img in images:
            if img.ring != target:
                raise ValueError("generator image is not in the target ring")
            if img.parts and set(img.parts) != {2}:
                raise ValueError("generator images must have cohomological degree 2")
            if img.parts and img.parts[2][(0,) * target.ngens]:
                raise ValueError("generator images must be nilpotent")
        self.source, self.target, self.images = source, target, images
        self._lock = threading.Lock()
        self._matrix = None

    def check(self) -> None:
        """Each image must satisfy the relation of its generator: [p^k](image) = 0."""
        F = self.target.fgl()
        for k, img in zip(self.source.group.exponents, self.images):
            if not m_series(F, self.source.ctx.p**k, self.target, img).is_zero():
                raise ValueError(f"image {img} does not satisfy [p^{k}](x) = 0")

    @property
    def matrix(self) -> np.ndarray:
        with self._lock:
            if self._matrix is None:
                self._matrix = self._build_matrix()
            return self._matrix

    def _build_matrix(self) -> np.ndarray:
        p = self.source.ctx.p
        tshape = self.target.shape
        arrays = [img.parts.get(2, np.zeros(tshape, dtype=np.int64)) for img in self.images]
        cols = np.zeros((self.target.rank, self.source.rank), dtype=np.int64)
        cache: dict[tuple[int, ...], np.ndarray] = {}
        one = pa.monomial(tshape, (0,) * len(tshape))
        for idx, alpha in enumerate(self.source.monomials()):
            if not any(alpha):
                val = one
            else:
                last = max(i for i, a in enumerate(alpha) if a)
                prev = list(alpha)
                prev[last] -= 1
                prev_val = cache[tuple(prev)]
                val = pa.mul(prev_val, arrays[last], p) if np.any(prev_val) else prev_val
            cache[alpha] = val
            cols[:, idx] = val.ravel()
        cols.setflags(write=False)
        return cols

    def __call__(self, a: CohomologyClass) -> CohomologyClass:
        return apply_hom(self, a)

    def compose(self, first: "RingHom") -> "RingHom":
        """self o first (first: A -> B, self: B -> C)."""
        if first.target != self.source:
            raise ValueError("ring maps are not composable")
        return RingHom(first.source, self.target, [apply_hom(self, img) for img in first.images])

    def __eq__(self, other):
        if not isinstance(other, RingHom):
            return NotImplemented
        return (self.source, self.target) == (other.source, other.target) and all(
            x == y for x, y in zip(self.images, other.images)
        )

    __hash__ = None


def apply_hom(h: RingHom, a: CohomologyClass) -> CohomologyClass:
    if a.ring != h.source:
        raise ValueError("class is not in the source ring of the map")
    p = h.source.ctx.p
    parts = {d: pa.matmul(h.matrix, arr.reshape(-1, 1), p).reshape(h.target.shape) for d, arr in a.parts.items()}
    return CohomologyClass(h.target, parts)


def _character_exponent(m: int, a_j: int, k_i: int, p: int) -> int:
    """Exponent c with chi_i o f = psi_j^c on the j-th cyclic factor."""
    if a_j >= k_i:
        return (m * p ** (a_j - k_i)) % p**a_j
    div = p ** (k_i - a_j)
    if m % div:
        raise ValueError("homomorphism matrix entry violates the order condition")
    return (m // div) % p**a_j


@lru_cache(maxsize=4096)
def pullback_hom(f: GroupHom, ctx: PrimeContext, check: bool = True) -> RingHom:
    """f*: K(n)*(B codomain) -> K(n)*(B domain), x_i -> sum_F_j [c_ij](y_j)."""
    source = CohomologyRing(ctx, f.codomain)
    target = CohomologyRing(ctx, f.domain)
    F = target.fgl()
    p = ctx.p
    gens = [target.gen(j) for j in range(target.ngens)]
    images = []
    for i, k_i in enumerate(f.codomain.exponents):
        acc = target.zero()
        for j, a_j in enumerate(f.domain.exponents):
            c = _character_exponent(f.matrix[i][j], a_j, k_i, p)
            if c:
                term = _mseries_cached(F, c, target, j)
                acc = formal_sum(F, acc, term) if not acc.is_zero() else term
        images.append(acc)
    h = RingHom(source, target, images)
    if check:
        h.check()
    return h


@lru_cache(maxsize=4096)
def _mseries_cached(F, c: int, ring: CohomologyRing, j: int) -> CohomologyClass:
    return m_series(F, c, ring, ring.gen(j))
