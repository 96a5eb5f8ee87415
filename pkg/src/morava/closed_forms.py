"""Published closed forms for B(Z/p), used as independent oracles."""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .abelian import AbelianPGroup
from .coefficients import PrimeContext, p_integral_reduce
from .duality import HomologyClass, basis_class
from .kring import CohomologyClass, ring_of


def zp_transfer_unit(ctx: PrimeContext) -> CohomologyClass:
    """v * sum_i x1^i x2^(q-1-i), minus v^2 x1^(p-1) x2^(p-1) when n = 1."""
    q, p = ctx.q, ctx.p
    R2 = ring_of(ctx, AbelianPGroup(p, (1, 1)))
    terms = {(i, q - 1 - i): ctx.v(1) for i in range(q)}
    if ctx.n == 1:
        terms[(p - 1, p - 1)] = ctx.v(2, -1)
    return CohomologyClass.from_terms(R2, terms)


def zp_cap(ctx: PrimeContext, i: int, j: int) -> HomologyClass:
    """b_i cap b_j in K(n)_*(BZ/p)."""
    q, p = ctx.q, ctx.p
    R = ring_of(ctx, AbelianPGroup(p, (1,)))
    if ctx.n == 1 and i == j == p - 1:
        return basis_class(R, (p - 1,), ctx.v(1)) + basis_class(R, (0,), ctx.v(2, -1))
    if i + j >= q - 1:
        return basis_class(R, (i + j - (q - 1),), ctx.v(1))
    return HomologyClass(R)


def zp_fundamental_class(ctx: PrimeContext) -> HomologyClass:
    q = ctx.q
    R = ring_of(ctx, AbelianPGroup(ctx.p, (1,)))
    fc = basis_class(R, (q - 1,), ctx.v(-1))
    if ctx.n == 1:
        fc = fc + basis_class(R, (0,))
    return fc


def leading_fgl_terms(ctx: PrimeContext) -> dict[tuple[int, int], int]:
    """Coefficients of x^(i p^(n-1)) y^((p-i) p^(n-1)): -binom(p, i)/p mod p."""
    p, s = ctx.p, ctx.p ** (ctx.n - 1)
    return {(i * s, (p - i) * s): p_integral_reduce(-Fraction(comb(p, i), p), p) for i in range(1, p)}
