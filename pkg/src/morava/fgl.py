"""The height-n Honda formal group law and the series built from it.

The law is obtained over Q from the logarithm sum_i x^{q^i} / p^i (q = p^n),
checked for p-integrality and reduced mod p.  Coefficients are stored with
v set to 1; the exponent of v on x^i y^j is (i + j - 1)/(q - 1).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

import numpy as np

from . import polyarith as pa
from .coefficients import GradedScalar, IntegralityError, PrimeContext, p_integral_reduce


class HomogeneityError(ArithmeticError):
    """A formal group law coefficient sits in a degree where v has no integral exponent."""


@dataclass(frozen=True, eq=False)
class RationalSeries:
    """A truncated power series in one or two variables with rational coefficients.

    Monomials with any single-variable exponent >= ``T`` are dropped.
    """

    nvars: int
    T: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.nvars not in (1, 2):
            raise ValueError("only 1 or 2 variables are supported")
        clean = {}
        for exps, c in self.coeffs.items():
            if isinstance(exps, int):
                exps = (exps,)
            exps = tuple(exps)
            if len(exps) != self.nvars:
                raise ValueError(f"exponent {exps} does not match {self.nvars} variables")
            c = Fraction(c)
            if c and all(e < self.T for e in exps):
                clean[exps] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def univariate(cls, coeffs: dict[int, Fraction], T: int) -> "RationalSeries":
        return cls(1, T, {(e,): c for e, c in coeffs.items()})

    def coefficient(self, *exps: int) -> Fraction:
        return self.coeffs.get(tuple(exps), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, RationalSeries):
            return NotImplemented
        return (self.nvars, self.T, self.coeffs) == (other.nvars, other.T, other.coeffs)

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return RationalSeries(self.nvars, min(self.T, other.T), out)

    def __mul__(self, other: "RationalSeries") -> "RationalSeries":
        T = min(self.T, other.T)
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                if all(e < T for e in k):
                    out[k] = out.get(k, 0) + c1 * c2
        return RationalSeries(self.nvars, T, out)

    def compose(self, inner: "RationalSeries") -> "RationalSeries":
        """self(inner(x)) for univariate series; inner must have no constant term."""
        if self.nvars != 1 or inner.nvars != 1:
            raise ValueError("composition is implemented for univariate series")
        if inner.coefficient(0):
            raise ValueError("inner series has a constant term")
        T = min(self.T, inner.T)
        out = RationalSeries(1, T, {})
        power = RationalSeries(1, T, {(0,): 1})
        for e in range(T):
            if e:
                power = power * inner
            c = self.coefficient(e)
            if c:
                out = out + RationalSeries(1, T, {k: c * v for k, v in power.coeffs.items()})
        return out

    def __repr__(self):
        names = "xy"[: self.nvars]
        terms = []
        for exps, c in self.coeffs.items():
            mon = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(names, exps) if e)
            terms.append(f"{c}*{mon}" if mon else str(c))
        return f"RationalSeries(T={self.T}: {' + '.join(terms) or '0'})"


def honda_logarithm(ctx: PrimeContext, T: int) -> RationalSeries:
    if T < 2:
        raise ValueError("truncation must be at least 2")
    coeffs = {}
    i = 0
    while ctx.q**i < T:
        coeffs[ctx.q**i] = Fraction(1, ctx.p**i)
        i += 1
    return RationalSeries.univariate(coeffs, T)


def _power_coeffs(h: dict[int, Fraction], alpha: int, K: int) -> list[Fraction]:
    """Coefficients 0..K of h(u)^alpha where h(0) = 1 (J.C.P. Miller recurrence)."""
    c = [Fraction(1)]
    support = sorted(i for i in h if i > 0)
    for k in range(1, K + 1):
        acc = Fraction(0)
        for i in support:
            if i > k:
                break
            acc += ((alpha + 1) * i - k) * h[i] * c[k - i]
        c.append(acc / k)
    return c


def series_compositional_inverse(s: RationalSeries) -> RationalSeries:
    """The g with s(g(x)) = x, solved one coefficient at a time.

    Writes s = x * sigma(x^d) with d the gcd of (exponent - 1) over the
    nonlinear terms, so only every d-th coefficient of g is unknown.
    """
    if s.nvars != 1:
        raise ValueError("compositional inverse needs a univariate series")
    if s.coefficient(0) != 0 or s.coefficient(1) != 1:
        raise ValueError("series must have the form x + higher-order terms")
    T = s.T
    higher = {e[0]: c for e, c in s.coeffs.items() if e[0] >= 2}
    if not higher:
        return RationalSeries.univariate({1: Fraction(1)}, T)
    d = 0
    for e in higher:
        d = gcd(d, e - 1)
    K = (T - 2) // d  # largest k with 1 + d*k < T
    shifts = {e: (e - 1) // d for e in higher}
    gamma = {0: Fraction(1)}
    powers = {e: [Fraction(1)] for e in higher}

    def extend(e: int, upto: int):
        c = powers[e]
        while len(c) <= upto:
            k = len(c)
            acc = Fraction(0)
            for i in range(1, k + 1):
                gi = gamma.get(i)
                if gi:
                    acc += ((e + 1) * i - k) * gi * c[k - i]
            c.append(acc / k)
        return c[upto]

    for k in range(1, K + 1):
        acc = Fraction(0)
        for e, shift in shifts.items():
            if shift <= k:
                acc += higher[e] * extend(e, k - shift)
        if acc:
            gamma[k] = -acc
    return RationalSeries.univariate({1 + d * k: c for k, c in gamma.items()}, T)


@dataclass(frozen=True, eq=False)
class FglTable:
    """F(x, y) = sum a_ij v^{(i+j-1)/(q-1)} x^i y^j truncated at i, j < T.

    ``coeffs[i, j]`` holds a_ij in F_p; the v exponents are recomputed on demand.
    """

    ctx: PrimeContext
    T: int
    coeffs: np.ndarray

    def a(self, i: int, j: int) -> int:
        return int(self.coeffs[i, j])

    def v_exponent(self, i: int, j: int) -> int | None:
        num = i + j - 1
        return num // (self.ctx.q - 1) if num % (self.ctx.q - 1) == 0 else None

    def coefficient(self, i: int, j: int) -> GradedScalar:
        c = self.a(i, j)
        if not c:
            return self.ctx.zero()
        return self.ctx.v(self.v_exponent(i, j), c)

    def nonzero(self) -> dict[tuple[int, int], GradedScalar]:
        return {(int(i), int(j)): self.coefficient(int(i), int(j)) for i, j in zip(*np.nonzero(self.coeffs))}

    def __repr__(self):
        return f"FglTable(p={self.ctx.p}, n={self.ctx.n}, T={self.T}, nonzero={np.count_nonzero(self.coeffs)})"


def _check_table(ctx: PrimeContext, a: np.ndarray) -> None:
    T = a.shape[0]
    if a[1, 0] != 1 or a[0, 1] != 1 or np.any(a[2:, 0]) or np.any(a[0, 2:]) or a[0, 0]:
        raise ArithmeticError("formal group law is not unital")
    if not np.array_equal(a, a.T):
        raise ArithmeticError("formal group law is not commutative")
    i, j = np.nonzero(a)
    bad = (i + j - 1) % (ctx.q - 1) != 0
    if np.any(bad):
        k = int(np.argmax(bad))
        raise HomogeneityError(f"nonzero coefficient at x^{i[k]} y^{j[k]} violates homogeneity")


def build_fgl(ctx: PrimeContext, T: int) -> FglTable:
    """Honda law mod p with a_ij computed exactly for i, j < T.

    a_ij = sum_{m, m'} e_{m+m'} C(m+m', m) [x^i] l^m [y^j] l^{m'} where
    e = exp = l^{-1}; each residue block is one exact integer matrix product.
    """
    if T < 2:
        raise ValueError("truncation must be at least 2")
    p, d = ctx.p, ctx.q - 1
    top = 2 * T - 1
    log = honda_logarithm(ctx, top)
    exp = series_compositional_inverse(log)
    lam = {(e[0] - 1) // d: c for e, c in log.coeffs.items()}

    # P[m][i] = [x^i] l(x)^m, nonzero only for i = m + d*k
    P: dict[int, list[Fraction]] = {}
    for m in range(1, T):
        P[m] = _power_coeffs(lam, m, (T - 1 - m) // d)

    def p_entry(m: int, i: int) -> Fraction:
        if i < m or (i - m) % d:
            return Fraction(0)
        return P[m][(i - m) // d]

    def as_int_matrix(rows):
        den = 1
        for row in rows:
            for x in row:
                den = max(den, x.denominator)
        return np.array([[x.numerator * (den // x.denominator) for x in row] for row in rows], dtype=object), den

    classes = {r: [i for i in range(1, T) if i % d == r % d] for r in range(d)}
    mats = {}
    for r, idx in classes.items():
        if idx:
            mats[r] = as_int_matrix([[p_entry(m, i) for i in idx] for m in idx])

    a = np.zeros((T, T), dtype=np.int64)
    a[1, 0] = a[0, 1] = 1
    for r, rows in classes.items():
        r2 = (1 - r) % d if d > 1 else 0
        cols = classes.get(r2, [])
        if not rows or not cols:
            continue
        Cm, Cden = as_int_matrix(
            [[exp.coefficient(m + m2) * comb(m + m2, m) for m2 in cols] for m in rows]
        )
        (Pr, dr), (Pc, dc) = mats[r], mats[r2]
        block = Pr.T.dot(Cm).dot(Pc)
        den = dr * Cden * dc
        for bi, i in enumerate(rows):
            for bj, j in enumerate(cols):
                num = block[bi, bj]
                if num:
                    try:
                        a[i, j] = p_integral_reduce(Fraction(num, den), p)
                    except IntegralityError as exc:
                        raise IntegralityError(f"coefficient of x^{i} y^{j} is not p-integral") from exc
    _check_table(ctx, a)
    return FglTable(ctx, T, a)


_cache_lock = threading.Lock()
_tables: dict[PrimeContext, FglTable] = {}


def honda_fgl(ctx: PrimeContext, T: int) -> FglTable:
    """A cached law with truncation at least ``T``."""
    with _cache_lock:
        table = _tables.get(ctx)
        if table is not None and table.T >= T:
            return table
    table = build_fgl(ctx, T)
    with _cache_lock:
        old = _tables.get(ctx)
        if old is None or old.T < table.T:
            _tables[ctx] = table
    return table


# -- evaluation on truncated arrays (v set to 1, every input of degree 2) ----


def _compact(arr: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    return arr[tuple(slice(None) if ax in axes else 0 for ax in range(arr.ndim))]


def _fsum_arrays(F: FglTable, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    p = F.ctx.p
    if not np.any(f):
        return g.copy()
    if not np.any(g):
        return f.copy()
    fp = pa.powers(f, p, F.T + 1)
    gp = pa.powers(g, p, F.T + 1)
    nf, ng = len(fp), len(gp)
    if nf > F.T or ng > F.T:
        raise ValueError(
            f"formal group law truncated at T={F.T} but the arguments need {max(nf, ng)} terms"
        )
    A = F.coeffs[:nf, :ng]
    shape = f.shape
    sf, sg = pa.support_axes(f), pa.support_axes(g)
    if not set(sf) & set(sg):
        # arguments in disjoint variables: F(f, g) is a contraction of outer products
        fs = np.stack([_compact(x, sf).ravel() for x in fp])
        gs = np.stack([_compact(x, sg).ravel() for x in gp])
        M = pa.matmul(pa.matmul(fs.T, A, p), gs, p)
        axes = sf + sg
        M = M.reshape(tuple(shape[ax] for ax in axes)).transpose(np.argsort(axes))
        out = np.zeros(shape, dtype=np.int64)
        out[tuple(slice(None) if ax in axes else 0 for ax in range(len(shape)))] = M
        return out
    fs = np.stack([x.ravel() for x in fp])
    C = pa.matmul(A.T, fs, p)
    out = C[0].reshape(shape).copy()
    for j in range(1, ng):
        out += pa.mul(C[j].reshape(shape), gp[j], p)
    return pa.reduce(out, p)


@lru_cache(maxsize=None)
def _iota_series(F: FglTable) -> np.ndarray:
    """Coefficients of the formal inverse i(x), F(x, i(x)) = 0, mod x^T (Newton)."""
    p, T = F.ctx.p, F.T
    x = np.zeros(T, dtype=np.int64)
    x[1] = 1
    iota = pa.reduce(-x, p)
    deriv_rows = F.coeffs * np.arange(T)[None, :]  # j * a_ij
    for _ in range(2 * T.bit_length() + 4):
        r = _fsum_arrays(F, x, iota)
        if not np.any(r):
            iota.setflags(write=False)
            return iota
        ip = pa.powers(iota, p, T + 1)
        d = np.zeros(T, dtype=np.int64)
        for j in range(1, min(len(ip) + 1, T)):
            col = pa.reduce(deriv_rows[:, j], p)
            if np.any(col):
                d += pa.mul(col, ip[j - 1], p)
        d = pa.reduce(d, p)
        iota = pa.reduce(iota - pa.mul(r, pa.series_inverse(d, p), p), p)
    raise ArithmeticError("formal inverse iteration did not converge")


def _evaluate_series(coeffs: np.ndarray, g: np.ndarray, p: int) -> np.ndarray:
    gp = pa.powers(g, p, coeffs.shape[0] + 1)
    if len(gp) > coeffs.shape[0]:
        raise ValueError("series truncation too small for this argument")
    out = np.zeros_like(g)
    for k, x in enumerate(gp):
        if coeffs[k]:
            out += coeffs[k] * x
    return pa.reduce(out, p)


def _mseries_arrays(F: FglTable, m: int, g: np.ndarray) -> np.ndarray:
    if m == 0 or not np.any(g):
        return np.zeros_like(g)
    if m < 0:
        return _evaluate_series(_iota_series(F), _mseries_arrays(F, -m, g), F.ctx.p)
    acc = g
    for bit in bin(m)[3:]:
        acc = _fsum_arrays(F, acc, acc)
        if bit == "1":
            acc = _fsum_arrays(F, acc, g)
    return acc


# -- class-level operations ----------------------------------------------------


def _degree_two_array(ctx: PrimeContext, c) -> np.ndarray:
    if c.ring.ctx != ctx:
        raise ValueError("class and formal group law use different prime contexts")
    parts = c.parts
    if not parts:
        return np.zeros(c.ring.shape, dtype=np.int64)
    if set(parts) != {2}:
        raise ValueError(f"expected a class of cohomological degree 2, got degrees {sorted(parts)}")
    arr = parts[2]
    if arr[(0,) * arr.ndim]:
        raise ValueError("argument has a constant term")
    return arr


def formal_sum(F: FglTable, f, g):
    """F(f, g) in the truncated ring of f and g."""
    if f.ring != g.ring:
        raise ValueError("classes live in different rings")
    arr = _fsum_arrays(F, _degree_two_array(F.ctx, f), _degree_two_array(F.ctx, g))
    return type(f)(f.ring, {2: arr})


def formal_difference(F: FglTable, f, g):
    """f -_F g, i.e. F(f, [-1](g))."""
    return formal_sum(F, f, m_series(F, -1, g.ring, g))


def m_series(F: FglTable, m: int, ring, gen):
    """[m](gen) for any integer m, by doubling and the formal inverse."""
    if gen.ring != ring:
        raise ValueError("generator is not in the given ring")
    arr = _mseries_arrays(F, m, _degree_two_array(F.ctx, gen))
    return type(gen)(ring, {2: arr})


def pk_coseries(ctx: PrimeContext, k: int, t):
    """<p^k>(t) = [p^k](t)/t = v^m t^{p^{kn}-1} with m = (p^{kn}-1)/(p^n-1)."""
    if k <= 0:
        raise ValueError("k must be positive")
    if t.ring.ctx != ctx:
        raise ValueError("class uses a different prime context")
    arr = _degree_two_array(ctx, t)
    top = ctx.p ** (k * ctx.n) - 1
    return type(t)(t.ring, {0: pa.power(arr, top, ctx.p)})
