"""Slow, obviously-correct reference computations used by the tests."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np


def naive_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros(a.shape, dtype=np.int64)
    for i in product(*map(range, a.shape)):
        if not a[i]:
            continue
        for j in product(*map(range, b.shape)):
            k = tuple(x + y for x, y in zip(i, j))
            if b[j] and all(x < n for x, n in zip(k, a.shape)):
                out[k] = (out[k] + int(a[i]) * int(b[j])) % p
    return out


def _mul(a: dict, b: dict, T: int) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            if all(e < T for e in k):
                out[k] = out.get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def honda_law(p: int, n: int, T: int) -> dict[tuple[int, int], Fraction]:
    """exp(l(x) + l(y)) over Q, each exponent below T, by plain substitution.

    exp is found by the fixed point e = x - sum_{k>=1} e^(q^k)/p^k.
    """
    q = p**n
    log = {}
    k = 0
    while q**k < 2 * T:
        log[q**k] = Fraction(1, p**k)
        k += 1
    U = 2 * T  # enough for the univariate exp used below
    e = {(1,): Fraction(1)}
    for _ in range(U):
        new = {(1,): Fraction(1)}
        for d, c in log.items():
            if d == 1:
                continue
            pw = {(0,): Fraction(1)}
            for _ in range(d):
                pw = _mul(pw, e, U)
            for kk, v in pw.items():
                new[kk] = new.get(kk, 0) - c * v
        new = {kk: v for kk, v in new.items() if v}
        if new == e:
            break
        e = new
    s = {}
    for d, c in log.items():
        if d < T:
            s[(d, 0)] = s.get((d, 0), 0) + c
            s[(0, d)] = s.get((0, d), 0) + c
    out: dict = {}
    pw = {(0, 0): Fraction(1)}
    for m in range(1, 2 * T):
        pw = _mul(pw, s, T)
        c = e.get((m,), 0)
        if c:
            for kk, v in pw.items():
                out[kk] = out.get(kk, 0) + c * v
    return {k: v for k, v in out.items() if v}


def series_eval(coeffs: dict[tuple[int, int], int], f: dict, g: dict, p: int, T: int) -> dict:
    """sum a_ij f^i g^j for univariate dict polynomials f, g mod (p, x^T)."""
    def mul(a, b):
        out: dict = {}
        for i, ca in a.items():
            for j, cb in b.items():
                if i + j < T:
                    out[i + j] = (out.get(i + j, 0) + ca * cb) % p
        return {k: c for k, c in out.items() if c}

    fp, gp = [{0: 1}], [{0: 1}]
    for _ in range(T):
        fp.append(mul(fp[-1], f))
        gp.append(mul(gp[-1], g))
    out: dict = {}
    for (i, j), c in coeffs.items():
        if i < len(fp) and j < len(gp):
            for k, v in mul(fp[i], gp[j]).items():
                out[k] = (out.get(k, 0) + c * v) % p
    return {k: c for k, c in out.items() if c}
