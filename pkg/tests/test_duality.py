import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import reference_values as ref
from morava import linalg
from morava.abelian import AbelianPGroup, GroupHom, Subgroup, enumerate_subgroups, subgroup_basis
from morava.coefficients import PrimeContext
from morava.duality import (
    HomologyClass,
    basis_class,
    bh_class,
    cap_product,
    cap_product_via_cup,
    diagonal_transfer_pullback,
    diagonal_transfer_unit,
    fundamental_class,
    homology_transfer,
    integrate,
    lambda_apply,
    lambda_invert,
    pairing_matrix,
    pushforward,
    subgroup_class,
    verify_transverse_formula,
)
from morava.fgl import formal_difference
from morava.kring import CohomologyClass, apply_hom, pullback_hom, ring_of

ZP_GRID = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)]
GROUPS = [
    (2, 1, (1,)), (2, 1, (2,)), (2, 1, (1, 1)), (2, 1, (2, 1)), (3, 1, (1,)), (3, 1, (2,)),
    (3, 1, (1, 1)), (2, 2, (1,)), (2, 2, (2,)), (2, 2, (1, 1)), (5, 1, (1,)), (2, 1, (1, 1, 1)),
]


def ring(p, n, *exps):
    return ring_of(PrimeContext(p, n), AbelianPGroup(p, exps))


def basis(R):
    return [basis_class(R, a) for a in R.monomials()]


# -- transfer unit -------------------------------------------------------------------

@pytest.mark.parametrize("p, n", ZP_GRID)
def test_transfer_unit_closed_form(p, n):
    R = ring(p, n, 1)
    assert diagonal_transfer_unit(R) == ref.transfer_unit(R.ctx)


@pytest.mark.parametrize("p, n", ZP_GRID)
def test_transfer_unit_by_formal_difference(p, n):
    R = ring(p, n, 1)
    R2 = ring_of(R.ctx, R.group.product(R.group))
    d = formal_difference(R2.fgl(), R2.gen(0), R2.gen(1))
    acc = R2.one()
    for _ in range(R.ctx.q - 1):
        acc = acc * d
    assert diagonal_transfer_unit(R) == acc.scale(R.ctx.v(1))


def test_transfer_unit_trivial_group():
    R = ring(3, 1)
    assert diagonal_transfer_unit(R) == ring_of(R.ctx, R.group.product(R.group)).one()


@pytest.mark.parametrize("p, n", [(2, 2), (3, 2), (5, 2)])
def test_transfer_of_powers(p, n):
    R = ring(p, n, 1)
    x = R.gen(0)
    for j in range(R.ctx.q):
        assert diagonal_transfer_pullback(R, x**j) == ref.transfer_of_power(R.ctx, j)
    assert diagonal_transfer_pullback(R, R.one()) == diagonal_transfer_unit(R)


@pytest.mark.parametrize("p, n", [(2, 1), (3, 1), (2, 2)])
def test_square_cyclic_vanishing_range(p, n):
    R = ring(p, n, 2)
    bound = R.ctx.q**2 - 2
    x = R.gen(0)
    for g in range(R.shape[0]):
        img = diagonal_transfer_pullback(R, x**g)
        assert all(i + j > bound for (i, j) in img.coefficients)


# -- pairing, lambda, fundamental class -------------------------------------------------

@pytest.mark.parametrize("p, n", [(2, 2), (3, 2), (5, 2)])
def test_pairing_cyclic(p, n):
    R = ring(p, n, 1)
    P = pairing_matrix(R)
    q = R.ctx.q
    for i in range(q):
        for j in range(q):
            if i + j < q - 1:
                assert P.entry((i,), (j,)).is_zero()
            if i + j == q - 1:
                assert P.entry((i,), (j,)) == R.ctx.v(1)


def test_pairing_small_cases():
    R = ring(2, 1, 1)
    v = R.ctx.v
    assert pairing_matrix(R).entries() == [[R.ctx.zero(), v(1)], [v(1), v(2, -1)]]
    assert pairing_matrix(ring(5, 2)).matrix.tolist() == [[1]]


def test_lambda_examples():
    for p, n in [(2, 2), (3, 2)]:
        R = ring(p, n, 1)
        b = basis_class(R, (R.ctx.q - 1,), R.ctx.v(-1))
        assert lambda_apply(b) == R.one()
    T = ring(3, 1)
    assert lambda_apply(basis_class(T, ())) == T.one()
    assert lambda_invert(T.one()) == basis_class(T, ())


@pytest.mark.parametrize("p, n", ZP_GRID)
def test_fundamental_class_closed_form(p, n):
    assert fundamental_class(ring(p, n, 1)) == ref.fundamental_class(PrimeContext(p, n))


def test_fundamental_class_trivial():
    R = ring(2, 1)
    assert fundamental_class(R) == basis_class(R, ())


@pytest.mark.parametrize("p, n, exps", GROUPS)
def test_fundamental_class_has_degree_zero(p, n, exps):
    assert fundamental_class(ring(p, n, *exps)).degree == 0


# -- cap product ----------------------------------------------------------------------

@pytest.mark.parametrize("p, n", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)])
def test_cap_table(p, n):
    R = ring(p, n, 1)
    B = basis(R)
    for i, bi in enumerate(B):
        for j, bj in enumerate(B):
            assert cap_product(bi, bj) == ref.cap(R.ctx, i, j)


def test_cap_group_mismatch():
    a = basis_class(ring(2, 1, 1), (0,))
    b = basis_class(ring(2, 1, 2), (0,))
    with pytest.raises(ValueError):
        cap_product(a, b)


@st.composite
def homology(draw, R):
    terms = {}
    for alpha in R.monomials():
        if draw(st.integers(0, 3)) == 0:
            terms[alpha] = R.ctx.v(draw(st.integers(-2, 2)), draw(st.integers(1, R.ctx.p - 1)))
    return HomologyClass.from_terms(R, terms)


group_cases = st.sampled_from(GROUPS)


@given(group_cases, st.data())
def test_cap_is_commutative_associative_unital(case, data):
    p, n, exps = case
    R = ring(p, n, *exps)
    a, b, c = (data.draw(homology(R)) for _ in range(3))
    assert cap_product(a, b) == cap_product(b, a)
    assert cap_product(cap_product(a, b), c) == cap_product(a, cap_product(b, c))
    assert cap_product(fundamental_class(R), a) == a


@given(group_cases, st.data())
def test_two_cap_routes_agree(case, data):
    p, n, exps = case
    R = ring(p, n, *exps)
    a, b = data.draw(homology(R)), data.draw(homology(R))
    assert cap_product(a, b) == cap_product_via_cup(a, b)


@given(group_cases, st.data())
def test_cap_is_bilinear(case, data):
    p, n, exps = case
    R = ring(p, n, *exps)
    a, b, c = (data.draw(homology(R)) for _ in range(3))
    s = R.ctx.v(data.draw(st.integers(-3, 3)), data.draw(st.integers(1, p - 1)))
    assert cap_product(a + b, c) == cap_product(a, c) + cap_product(b, c)
    assert cap_product(a.scale(s), c) == cap_product(a, c).scale(s)


@pytest.mark.parametrize("p, n, exps", GROUPS)
def test_cap_degrees_add(p, n, exps):
    R = ring(p, n, *exps)
    for a in basis(R):
        for b in basis(R)[:6]:
            c = cap_product(a, b)
            assert c.is_zero() or c.degree == a.degree + b.degree


@pytest.mark.parametrize("p, n, exps", GROUPS)
def test_pairing_symmetric_homogeneous_nondegenerate(p, n, exps):
    R = ring(p, n, *exps)
    P = pairing_matrix(R)
    assert np.array_equal(P.matrix, P.matrix.T)
    assert linalg.determinant(P.matrix, p) != 0
    deg = np.array([sum(a) for a in R.monomials()])
    tot = deg[:, None] + deg[None, :]
    assert not P.matrix[tot % (R.ctx.q - 1) != 0].any()


@pytest.mark.parametrize("p, n, a, b", [(2, 1, (1,), (1,)), (2, 1, (1,), (2,)), (3, 1, (1,), (1,)), (2, 2, (1,), (1,)), (2, 1, (2,), (1, 1))])
def test_kunneth(p, n, a, b):
    ctx = PrimeContext(p, n)
    PA = pairing_matrix(ring_of(ctx, AbelianPGroup(p, a))).matrix
    PB = pairing_matrix(ring_of(ctx, AbelianPGroup(p, b))).matrix
    PAB = pairing_matrix(ring_of(ctx, AbelianPGroup(p, a + b))).matrix
    assert np.array_equal(PAB, np.kron(PA, PB) % p)


def test_lambda_round_trip():
    for p, n, exps in GROUPS:
        R = ring(p, n, *exps)
        for b in basis(R):
            assert lambda_invert(lambda_apply(b)) == b


# -- subgroups -------------------------------------------------------------------------

def standard_inclusion(p):
    return GroupHom(AbelianPGroup(p, (1,)), AbelianPGroup(p, (2,)), ((p,),))


def test_pushforward_examples():
    ctx = PrimeContext(3, 1)
    G = AbelianPGroup(3, (1, 2))
    RG = ring_of(ctx, G)
    a = basis_class(RG, (1, 3))
    assert pushforward(GroupHom.identity(G), a) == a
    triv = GroupHom(AbelianPGroup(3, ()), G, ((), ()))
    b0 = basis_class(ring_of(ctx, triv.domain), ())
    assert pushforward(triv, b0) == basis_class(RG, (0, 0))
    with pytest.raises(ValueError):
        pushforward(GroupHom(AbelianPGroup(3, (2,)), AbelianPGroup(3, (1,)), ((1,),)), basis_class(ring(3, 1, 2), (0,)))


@pytest.mark.parametrize("p, n", [(2, 1), (3, 1), (2, 2)])
def test_pushforward_is_transpose(p, n):
    ctx = PrimeContext(p, n)
    i = standard_inclusion(p)
    h = pullback_hom(i, ctx)
    RH, RG = ring_of(ctx, i.domain), ring_of(ctx, i.codomain)
    for b in basis(RH):
        img = pushforward(i, b)
        for alpha in RG.monomials():
            # <i_* b, x^alpha> = <b, i^* x^alpha>
            pulled = apply_hom(h, RG.monomial(alpha)).coefficients
            beta = next(iter(b.coefficients))
            assert img.coefficient(alpha).evaluate_at_one() == pulled.get(beta, ctx.zero()).evaluate_at_one()


@pytest.mark.parametrize("p, n", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_restriction_of_fundamental_class(p, n):
    ctx = PrimeContext(p, n)
    i = standard_inclusion(p)
    RG, RH = ring_of(ctx, i.codomain), ring_of(ctx, i.domain)
    assert homology_transfer(i, fundamental_class(RG)) == fundamental_class(RH)
    G = AbelianPGroup(p, (2,))
    a = basis_class(RG, (1,))
    assert homology_transfer(GroupHom.identity(G), a) == a


@pytest.mark.parametrize("p, n", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_square_cyclic_subgroup_self_intersection(p, n):
    ctx = PrimeContext(p, n)
    bh = bh_class(standard_inclusion(p), ctx)
    assert bh.degree == 0
    assert cap_product(bh, bh).is_zero()


def test_bh_examples():
    ctx = PrimeContext(2, 1)
    G = AbelianPGroup(2, (1, 1))
    RG = ring_of(ctx, G)
    assert bh_class(GroupHom.identity(G), ctx) == fundamental_class(RG)
    assert subgroup_class(Subgroup(G, ()), ctx) == basis_class(RG, (0, 0))


def test_integrate_examples():
    T = ring(2, 1)
    assert integrate(T.one()) == T.ctx.one()
    for p in (2, 3):
        R = ring(p, 2, 1)
        assert integrate(R.gen(0) ** (R.ctx.q - 1)) == R.ctx.v(-1)
        R1 = ring(p, 1, 1)
        assert integrate(R1.one()) == R1.ctx.one()


SUBGROUP_CASES = [(2, 1, (2, 1)), (3, 1, (1, 1)), (2, 2, (2,)), (2, 1, (1, 1, 1)), (3, 1, (2,))]


@pytest.mark.parametrize("p, n, exps", SUBGROUP_CASES)
def test_projection_formula_and_square(p, n, exps):
    ctx = PrimeContext(p, n)
    G = AbelianPGroup(p, exps)
    RG = ring_of(ctx, G)
    for S in enumerate_subgroups(G):
        i = S.inclusion()
        h = pullback_hom(i, ctx)
        bh = subgroup_class(S, ctx)
        for b in basis(RG):
            shriek = homology_transfer(i, b)
            assert pushforward(i, shriek) == cap_product(b, bh)
            assert lambda_apply(shriek) == apply_hom(h, lambda_apply(b))


def test_verify_transverse_examples():
    for p in (2, 3):
        ctx = PrimeContext(p, 1)
        G = AbelianPGroup(p, (1, 1))
        full = subgroup_basis(G, [(1, 0), (0, 1)])
        r = verify_transverse_formula(G, full, full, ctx)
        assert r.status == "PASS" and r.lhs == fundamental_class(ring_of(ctx, G))
        H, K = subgroup_basis(G, [(1, 0)]), subgroup_basis(G, [(0, 1)])
        r = verify_transverse_formula(G, H, K, ctx)
        assert r.status == "PASS" and r.rhs == basis_class(ring_of(ctx, G), (0, 0))
        Z = AbelianPGroup(p, (2,))
        P = subgroup_basis(Z, [(p,)])
        r = verify_transverse_formula(Z, P, P, ctx)
        assert r.status == "hypothesis not met" and r.holds is None
        assert cap_product(subgroup_class(P, ctx), subgroup_class(P, ctx)).is_zero()


def test_verify_transverse_rejects_foreign_subgroups():
    ctx = PrimeContext(2, 1)
    G, G2 = AbelianPGroup(2, (1,)), AbelianPGroup(2, (2,))
    with pytest.raises(ValueError):
        verify_transverse_formula(G, Subgroup(G2, ()), Subgroup(G2, ()), ctx)
