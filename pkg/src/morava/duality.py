"""Diagonal transfer, the duality pairing, fundamental classes and intersection products.

Homology K(n)_*(BA) is the K(n)_*-dual of K(n)*(BA) with dual basis b_alpha
(homological degree 2|alpha|).  All linear algebra runs on v = 1 arrays over
F_p; every map involved is homogeneous, so the v exponents are restored from
the degrees afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import linalg
from . import polyarith as pa
from .abelian import AbelianPGroup, GroupHom, Subgroup, is_transverse, subgroup_intersection
from .coefficients import GradedScalar, PrimeContext
from .fgl import formal_difference, pk_coseries
from .kring import (
    CohomologyClass,
    CohomologyRing,
    _GradedElement,
    apply_hom,
    external_product,
    pullback_hom,
    ring_of,
)


class DualityError(ArithmeticError):
    """The pairing is degenerate or a duality identity failed."""


class HomologyClass(_GradedElement):
    _SIGN = -1
    _NAME = "b"
    __slots__ = ()


def basis_class(ring: CohomologyRing, alpha, coeff=1) -> HomologyClass:
    return HomologyClass.from_terms(ring, {tuple(alpha): coeff})


def _doubled(ring: CohomologyRing) -> CohomologyRing:
    return ring_of(ring.ctx, ring.group.product(ring.group))


@lru_cache(maxsize=256)
def _transfer_unit_array(ctx: PrimeContext, A: AbelianPGroup) -> np.ndarray:
    """(Delta^!)^*(1) with v = 1, shape (N_1..N_r, N_1..N_r)."""
    r = A.rank
    if r == 0:
        return np.ones((), dtype=np.int64)
    factors = []
    for k in A.exponents:
        C = ring_of(ctx, AbelianPGroup(ctx.p, (k, k)))
        t = formal_difference(C.fgl(), C.gen(0), C.gen(1))
        unit = pk_coseries(ctx, k, t)
        factors.append(unit.parts.get(0, np.zeros(C.shape, dtype=np.int64)))
    out = factors[0]
    for fac in factors[1:]:
        out = np.multiply.outer(out, fac)
    # factor order is (x_11, x_12, x_21, x_22, ...); the ring of A x A wants (x_11, x_21, ..., x_12, x_22, ...)
    perm = [2 * i for i in range(r)] + [2 * i + 1 for i in range(r)]
    out = pa.reduce(np.transpose(out, perm), ctx.p)
    out.setflags(write=False)
    return out


def diagonal_transfer_unit(R: CohomologyRing) -> CohomologyClass:
    """prod_i <p^{k_i}>(x_{i,1} -_F x_{i,2}) in K(n)*(B(A x A)); degree 0."""
    return CohomologyClass(_doubled(R), {0: _transfer_unit_array(R.ctx, R.group)})


def diagonal_transfer_pullback(R: CohomologyRing, xi: CohomologyClass) -> CohomologyClass:
    """(Delta^!)^*(xi) = (xi (x) 1) . (Delta^!)^*(1), by the module property."""
    if xi.ring != R:
        raise ValueError("class is not in the given ring")
    return external_product(xi, R.one()) * diagonal_transfer_unit(R)


@dataclass(frozen=True, eq=False)
class PairingMatrix:
    """<b_alpha, b_beta> with v = 1; entry (alpha, beta) carries v^{(|alpha|+|beta|)/(q-1)}."""

    ring: CohomologyRing
    matrix: np.ndarray
    inverse: np.ndarray

    def entry(self, alpha, beta) -> GradedScalar:
        ctx = self.ring.ctx
        i = np.ravel_multi_index(tuple(alpha), self.ring.shape) if self.ring.shape else 0
        j = np.ravel_multi_index(tuple(beta), self.ring.shape) if self.ring.shape else 0
        c = int(self.matrix[i, j])
        if not c:
            return ctx.zero()
        return ctx.v((sum(alpha) + sum(beta)) // (ctx.q - 1), c)

    def entries(self) -> list[list[GradedScalar]]:
        basis = list(self.ring.monomials())
        return [[self.entry(a, b) for b in basis] for a in basis]


@lru_cache(maxsize=256)
def _pairing(ctx: PrimeContext, A: AbelianPGroup) -> PairingMatrix:
    R = ring_of(ctx, A)
    M = _transfer_unit_array(ctx, A).reshape(R.rank, R.rank).copy()
    if not np.array_equal(M, M.T):
        raise DualityError(f"pairing matrix of {A} is not symmetric")
    try:
        inv = linalg.inverse(M, ctx.p)
    except linalg.SingularMatrixError as exc:
        raise DualityError(f"pairing of {A} is degenerate at (p, n) = ({ctx.p}, {ctx.n})") from exc
    M.setflags(write=False)
    inv.setflags(write=False)
    return PairingMatrix(R, M, inv)


def pairing_matrix(R: CohomologyRing) -> PairingMatrix:
    return _pairing(R.ctx, R.group)


def lambda_apply(a: HomologyClass) -> CohomologyClass:
    """lambda(b_alpha) = sum_beta <b_alpha, b_beta> x^beta; homological d -> cohomological -d."""
    R = a.ring
    P = pairing_matrix(R)
    p = R.ctx.p
    parts = {-d: pa.matmul(P.matrix.T, arr.reshape(-1, 1), p).reshape(R.shape) for d, arr in a.parts.items()}
    return CohomologyClass(R, parts)


def lambda_invert(xi: CohomologyClass) -> HomologyClass:
    R = xi.ring
    P = pairing_matrix(R)
    p = R.ctx.p
    inv_t = P.inverse.T
    parts = {-d: pa.matmul(inv_t, arr.reshape(-1, 1), p).reshape(R.shape) for d, arr in xi.parts.items()}
    return HomologyClass(R, parts)


def fundamental_class(R: CohomologyRing) -> HomologyClass:
    """[BA] = lambda^{-1}(1)."""
    return lambda_invert(R.one())


def _reverse(a: np.ndarray) -> np.ndarray:
    return a[(slice(None, None, -1),) * a.ndim]


def cap_product(a: HomologyClass, b: HomologyClass) -> HomologyClass:
    """a cap b = Delta^!(a (x) b), the transpose of diagonal_transfer_pullback.

    With T = (Delta^!)^*(1), b_alpha cap b_beta = sum_gamma T[alpha - gamma, beta] b_gamma;
    the sum over alpha - gamma is a correlation, computed as a reversed product.
    """
    a._same(b)
    R = a.ring
    p = R.ctx.p
    T = _transfer_unit_array(R.ctx, R.group).reshape(R.rank, R.rank)
    parts: dict[int, np.ndarray] = {}
    for d2, y in b.parts.items():
        u = pa.matmul(T, y.reshape(-1, 1), p).reshape(R.shape)
        for d1, x in a.parts.items():
            prod = _reverse(pa.mul(_reverse(x), u, p))
            key = d1 + d2
            parts[key] = parts[key] + prod if key in parts else prod
    return HomologyClass(R, parts)


def cap_product_via_cup(a: HomologyClass, b: HomologyClass) -> HomologyClass:
    """The same product as lambda^{-1}(lambda(a) . lambda(b)): the dual of cup product."""
    a._same(b)
    return lambda_invert(lambda_apply(a) * lambda_apply(b))


def _require_injective(i: GroupHom) -> None:
    if not i.is_injective():
        raise ValueError(f"homomorphism {i.matrix} from {i.domain} is not injective")


def pushforward(i: GroupHom, a: HomologyClass, ctx: PrimeContext | None = None) -> HomologyClass:
    """i_*: the transpose of i^* in the dual bases."""
    ctx = ctx or a.ring.ctx
    if a.ring.group != i.domain:
        raise ValueError("class is not over the domain of the homomorphism")
    _require_injective(i)
    h = pullback_hom(i, ctx)
    p = ctx.p
    parts = {d: pa.matmul(h.matrix.T, arr.reshape(-1, 1), p).reshape(h.source.shape) for d, arr in a.parts.items()}
    return HomologyClass(h.source, parts)


def homology_transfer(i: GroupHom, a: HomologyClass) -> HomologyClass:
    """i^! = lambda_H^{-1} o i^* o lambda_G."""
    if a.ring.group != i.codomain:
        raise ValueError("class is not over the codomain of the homomorphism")
    _require_injective(i)
    h = pullback_hom(i, a.ring.ctx)
    return lambda_invert(apply_hom(h, lambda_apply(a)))


def bh_class(i: GroupHom, ctx: PrimeContext) -> HomologyClass:
    """[BH] in K(n)_*(BG): the image of the fundamental class of H under i_*."""
    _require_injective(i)
    return pushforward(i, fundamental_class(ring_of(ctx, i.domain)), ctx)


def subgroup_class(S: Subgroup, ctx: PrimeContext) -> HomologyClass:
    return bh_class(S.inclusion(), ctx)


def integrate(xi: CohomologyClass) -> GradedScalar:
    """<xi, [BG]>: contraction of xi against the fundamental class."""
    fc = fundamental_class(xi.ring).coefficients
    total = xi.ring.ctx.zero()
    for alpha, c in xi.coefficients.items():
        if alpha in fc:
            total = total + c * fc[alpha]
    return total


@dataclass
class TransverseCheck:
    group: AbelianPGroup
    h: Subgroup
    k: Subgroup
    meet: Subgroup
    transverse: bool
    holds: bool | None  # None when the hypothesis is not met
    lhs: HomologyClass | None = None
    rhs: HomologyClass | None = None

    @property
    def status(self) -> str:
        if not self.transverse:
            return "hypothesis not met"
        return "PASS" if self.holds else "FAIL"


def verify_transverse_formula(
    G: AbelianPGroup, H: Subgroup, K: Subgroup, ctx: PrimeContext, cap: int | None = None
) -> TransverseCheck:
    """Check [BH] cap [BK] = [B(H n K)] for a transverse pair."""
    kwargs = {} if cap is None else {"cap": cap}
    if H.ambient != G or K.ambient != G:
        raise ValueError("subgroups are not subgroups of the given group")
    report = is_transverse(H, K, **kwargs)
    meet = subgroup_intersection(H, K, **kwargs)
    if not report.transverse:
        return TransverseCheck(G, H, K, meet, False, None)
    lhs = cap_product(subgroup_class(H, ctx), subgroup_class(K, ctx))
    rhs = subgroup_class(meet, ctx)
    return TransverseCheck(G, H, K, meet, True, lhs == rhs, lhs, rhs)
