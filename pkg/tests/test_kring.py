import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morava.abelian import AbelianPGroup, GroupHom
from morava.coefficients import PrimeContext
from morava.fgl import m_series
from morava.kring import (
    CohomologyClass,
    RingHom,
    apply_hom,
    external_product,
    format_class,
    multiply,
    pullback_hom,
    ring_of,
)


def R(p, n, *exps):
    return ring_of(PrimeContext(p, n), AbelianPGroup(p, exps))


def test_ring_examples():
    A = R(2, 1, 1)
    assert A.rank == 2 and A.shape == (2,)
    B = R(3, 2, 1)
    assert B.rank == 9
    x = B.gen(0)
    assert (x**8).is_zero() is False and (x**9).is_zero()
    T = R(2, 1)
    assert T.rank == 1 and T.ngens == 0
    assert str(R(3, 1, 1, 2)) == "K(1)*[x1, x2]/(x1^3, x2^9)"
    assert str(R(2, 2, 1)) == "K(2)*[x]/(x^4)"


def test_multiply_examples():
    A = R(2, 1, 2)
    x = A.gen(0)
    assert multiply(x, x**3).is_zero()
    assert multiply(A.one(), x) == x
    lhs = multiply(x + CohomologyClass.from_terms(A, {(2,): A.ctx.v(1)}), x * x)
    assert lhs == x**3


def test_external_product_examples():
    A, B = R(3, 1, 1), R(3, 1, 2)
    AB = R(3, 1, 1, 2)
    assert external_product(A.one(), B.one()) == AB.one()
    assert external_product(A.gen(0), B.one()) == AB.gen(0)
    vx = A.gen(0).scale(A.ctx.v(1))
    assert external_product(vx, B.gen(0)) == CohomologyClass.from_terms(AB, {(1, 1): A.ctx.v(1)})


def test_degrees_and_v_exponents():
    A = R(2, 2, 1)
    c = CohomologyClass.from_terms(A, {(3,): A.ctx.v(1)})
    assert c.degree == 0
    assert c.coefficient((3,)) == A.ctx.v(1)
    with pytest.raises(ValueError):
        CohomologyClass(A, {1: np.array([0, 1, 0, 0])})


def test_format():
    A = R(2, 1, 1, 1)
    c = CohomologyClass.from_terms(A, {(1, 0): 1, (1, 1): A.ctx.v(1)})
    assert format_class(c) == "x1 + v*x1*x2"
    assert format_class(A.one()) == "1"


def test_pullback_examples():
    ctx = PrimeContext(2, 1)
    Z2, Z4 = AbelianPGroup(2, (1,)), AbelianPGroup(2, (2,))
    ident = pullback_hom(GroupHom.identity(Z4), ctx)
    x = ring_of(ctx, Z4).gen(0)
    assert ident(x) == x
    inc = pullback_hom(GroupHom(Z2, Z4, ((2,),)), ctx)
    assert inc(x) == ring_of(ctx, Z2).gen(0)
    G = AbelianPGroup(2, (1,))
    diag = pullback_hom(GroupHom.diagonal(G), ctx)
    GG = ring_of(ctx, G.product(G))
    x1x2 = GG.gen(0) * GG.gen(1)
    assert apply_hom(diag, x1x2) == ring_of(ctx, G).gen(0) ** 2


@pytest.mark.parametrize("p, n, k", [(2, 1, 3), (3, 1, 2), (2, 2, 2), (5, 1, 2)])
def test_diagonal_adds_exponents(p, n, k):
    ctx = PrimeContext(p, n)
    G = AbelianPGroup(p, (k,))
    diag = pullback_hom(GroupHom.diagonal(G), ctx)
    GG = ring_of(ctx, G.product(G))
    x = ring_of(ctx, G).gen(0)
    N = GG.shape[0]
    for a in range(0, N, max(1, N // 5)):
        for b in range(0, N, max(1, N // 5)):
            assert diag(GG.gen(0) ** a * GG.gen(1) ** b) == x ** (a + b)


def test_zero_hom():
    ctx = PrimeContext(3, 1)
    G = AbelianPGroup(3, (1,))
    A = ring_of(ctx, G)
    h = RingHom(A, A, [A.zero()])
    assert apply_hom(h, A.gen(0)).is_zero()
    assert apply_hom(h, A.one()) == A.one()


def test_hom_rejects_bad_images():
    A = R(3, 1, 1)
    with pytest.raises(ValueError):
        RingHom(A, A, [A.one()])
    with pytest.raises(ValueError):
        RingHom(A, A, [])
    B = R(3, 1, 2)
    h = RingHom(A, B, [B.gen(0)])  # x^3 = 0 fails upstairs
    with pytest.raises(ValueError):
        h.check()


@pytest.mark.parametrize("p, n, k, j", [(2, 1, 3, 1), (2, 1, 3, 2), (3, 1, 2, 1), (2, 2, 2, 1)])
def test_projection_is_p_power_series(p, n, k, j):
    ctx = PrimeContext(p, n)
    big, small = AbelianPGroup(p, (k,)), AbelianPGroup(p, (j,))
    proj = pullback_hom(GroupHom(big, small, ((1,),)), ctx)
    T = ring_of(ctx, big)
    assert proj(ring_of(ctx, small).gen(0)) == m_series(T.fgl(), p ** (k - j), T, T.gen(0))


@st.composite
def homs(draw, p, dom, cod):
    rows = []
    for k_i in cod:
        row = []
        for a_j in dom:
            step = p ** max(0, k_i - a_j)
            row.append(step * draw(st.integers(0, p**k_i - 1)))
        rows.append(tuple(row))
    return GroupHom(AbelianPGroup(p, dom), AbelianPGroup(p, cod), tuple(rows))


@st.composite
def chains(draw):
    p = draw(st.sampled_from([2, 3]))
    n = draw(st.sampled_from([1, 2])) if p == 2 else 1
    shapes = [tuple(draw(st.lists(st.integers(1, 2), min_size=1, max_size=2))) for _ in range(3)]
    f = draw(homs(p, shapes[0], shapes[1]))
    g = draw(homs(p, shapes[1], shapes[2]))
    return PrimeContext(p, n), f, g


@st.composite
def classes(draw, ring):
    terms = {}
    for alpha in ring.monomials():
        if draw(st.booleans()):
            terms[alpha] = ring.ctx.v(draw(st.integers(-2, 2)), draw(st.integers(1, ring.ctx.p - 1)))
    return CohomologyClass.from_terms(ring, terms)


@given(chains(), st.data())
def test_pullback_is_contravariant_functor(t, data):
    ctx, f, g = t
    gf = g.compose(f)
    lhs = pullback_hom(gf, ctx)
    rhs = pullback_hom(f, ctx).compose(pullback_hom(g, ctx))
    assert lhs == rhs
    a = data.draw(classes(ring_of(ctx, g.codomain)))
    assert lhs(a) == pullback_hom(f, ctx)(pullback_hom(g, ctx)(a))


@given(chains(), st.data())
def test_pullback_is_multiplicative(t, data):
    ctx, f, _ = t
    h = pullback_hom(f, ctx)
    A = ring_of(ctx, f.codomain)
    a, b = data.draw(classes(A)), data.draw(classes(A))
    assert h(a * b) == h(a) * h(b)
    assert h(a + b) == h(a) + h(b)
    assert h(A.one()) == ring_of(ctx, f.domain).one()


@given(st.sampled_from([(2, 1, (1, 2)), (3, 1, (1, 1)), (2, 2, (1,))]), st.data())
def test_ring_axioms(case, data):
    p, n, exps = case
    A = R(p, n, *exps)
    a, b, c = (data.draw(classes(A)) for _ in range(3))
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()
