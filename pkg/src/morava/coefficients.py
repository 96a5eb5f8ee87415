"""Exact scalars: the prime field F_p and the graded field K(n)_* = F_p[v, v^-1].

Degrees are cohomological throughout: ``deg x = 2`` and ``deg v = -2(p^n - 1)``.
Homology carries the negated grading, so a scalar ``v^e`` sits in homological
degree ``2(p^n - 1) e``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeContext:
    """The pair (p, n) fixing K(n) at the prime p."""

    p: int
    n: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"height n must be >= 1, got {self.n!r}")

    @property
    def q(self) -> int:
        return self.p**self.n

    @property
    def period(self) -> int:
        """Cohomological degree of v^-1, i.e. 2(p^n - 1)."""
        return 2 * (self.q - 1)

    def scalar(self, terms: Mapping[int, int] | None = None) -> "GradedScalar":
        return GradedScalar(self, terms or {})

    def one(self) -> "GradedScalar":
        return GradedScalar(self, {0: 1})

    def zero(self) -> "GradedScalar":
        return GradedScalar(self, {})

    def v(self, e: int = 1, c: int = 1) -> "GradedScalar":
        """The monomial c * v^e."""
        return GradedScalar(self, {e: c})


@dataclass(frozen=True, eq=False)
class GradedScalar:
    """A Laurent polynomial in v over F_p, stored sparsely as exponent -> coefficient."""

    ctx: PrimeContext
    terms: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        p = self.ctx.p
        clean = {}
        for e, c in self.terms.items():
            c %= p
            if c:
                clean[int(e)] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    # -- structure -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def monomial(self) -> tuple[int, int]:
        """(exponent, coefficient) of a single-term scalar."""
        if len(self.terms) != 1:
            raise ValueError(f"{self} is not a monomial")
        (e, c), = self.terms.items()
        return e, c

    def cohomological_degree(self) -> int | None:
        if len(self.terms) != 1:
            return None
        e, _ = self.monomial()
        return -e * self.ctx.period

    def evaluate_at_one(self) -> int:
        """Image under v -> 1, an element of F_p."""
        return sum(self.terms.values()) % self.ctx.p

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "GradedScalar":
        if isinstance(other, GradedScalar):
            if other.ctx != self.ctx:
                raise ValueError(f"mismatched prime contexts {self.ctx} and {other.ctx}")
            return other
        if isinstance(other, int):
            return GradedScalar(self.ctx, {0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return GradedScalar(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedScalar(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return GradedScalar(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return monomial_invert(self) ** (-k)
        out = self.ctx.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = GradedScalar(self.ctx, {0: other})
        if not isinstance(other, GradedScalar):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, tuple(self.terms.items())))

    def __repr__(self):
        return f"GradedScalar({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)


def format_scalar(a: GradedScalar) -> str:
    """Render as e.g. ``2*v^-1 + v``; v always stands for v_n."""
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms.items():
        if e == 0:
            parts.append(str(c))
            continue
        mon = "v" if e == 1 else f"v^{e}"
        parts.append(mon if c == 1 else f"{c}*{mon}")
    return " + ".join(parts)


def scalar_arith(a: GradedScalar, b: GradedScalar, op: str) -> GradedScalar:
    if a.ctx != b.ctx:
        raise ValueError(f"mismatched prime contexts {a.ctx} and {b.ctx}")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown scalar operation {op!r}")


def monomial_invert(a: GradedScalar) -> GradedScalar:
    """Inverse of a nonzero homogeneous scalar c*v^e."""
    if a.is_zero():
        raise ZeroDivisionError("zero is not invertible in K(n)_*")
    if not a.is_monomial():
        raise ValueError(f"{a} is not homogeneous, so it has no inverse in K(n)_*")
    e, c = a.monomial()
    return GradedScalar(a.ctx, {-e: pow(c, -1, a.ctx.p)})


class IntegralityError(ArithmeticError):
    """A rational that should have been p-integral was not."""


def p_integral_reduce(r: Fraction | int, p: int) -> int:
    r = Fraction(r)
    if r.denominator % p == 0:
        raise IntegralityError(f"{r} is not {p}-integral")
    return r.numerator * pow(r.denominator, -1, p) % p
