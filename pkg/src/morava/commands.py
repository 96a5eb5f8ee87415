"""One function per CLI command: each returns a payload and its checks."""

from __future__ import annotations

import numpy as np

from . import linalg
from .abelian import DEFAULT_CAP, AbelianPGroup, CapExceeded, subgroup_basis
from .closed_forms import leading_fgl_terms, zp_cap, zp_fundamental_class, zp_transfer_unit
from .coefficients import PrimeContext
from .duality import (
    basis_class,
    cap_product,
    diagonal_transfer_unit,
    fundamental_class,
    pairing_matrix,
    verify_transverse_formula,
)
from .fgl import _mseries_arrays, honda_fgl
from .kring import ring_of
from .serialize import class_to_json, group_to_json, matrix_to_json, tagged_class, terms_to_json
from .sweep import sweep_transverse

MAX_RANK = 2**12
MAX_TABLE = 2**14


def check(name: str, ok: bool, detail: str | None = None) -> dict:
    out = {"name": name, "status": "PASS" if ok else "FAIL"}
    if detail:
        out["detail"] = detail
    return out


def _result(payload, checks, higher=False):
    return {"payload": payload, "checks": checks, "higher": higher}


def _ring(ctx: PrimeContext, exps, limit: int = MAX_RANK):
    R = ring_of(ctx, AbelianPGroup(ctx.p, tuple(exps)))
    if R.rank > limit:
        raise CapExceeded(f"ring rank {R.rank} exceeds the limit {limit}")
    return R


def _higher(exps) -> bool:
    return any(k >= 2 for k in exps)


def ring(ctx: PrimeContext, exps) -> dict:
    R = ring_of(ctx, AbelianPGroup(ctx.p, tuple(exps)))
    F = R.fgl()
    counts: dict[int, int] = {}
    for alpha in R.monomials():
        counts[sum(alpha)] = counts.get(sum(alpha), 0) + 1
    relations_hold = True
    for i, k in enumerate(R.group.exponents):
        x = np.zeros(R.shape, dtype=np.int64)
        x[tuple(1 if j == i else 0 for j in range(R.ngens))] = 1
        relations_hold &= not np.any(_mseries_arrays(F, ctx.p**k, x))
    names = ["x"] if R.ngens == 1 else [f"x{i + 1}" for i in range(R.ngens)]
    payload = {
        "group": group_to_json(R.group),
        "generators": [{"name": v, "degree": 2, "nilpotency": N} for v, N in zip(names, R.shape)],
        "rank": R.rank,
        "monomialsByDegree": [counts[d] for d in sorted(counts)],
    }
    return _result(payload, [check("[p^k](x_i) = 0 for every generator", bool(relations_hold))])


def fgl(ctx: PrimeContext, truncation: int | None) -> dict:
    T = truncation or ctx.q**2
    if T < 2:
        raise ValueError("truncation must be at least 2")
    F = honda_fgl(ctx, T)
    a = F.coeffs[:T, :T]
    x = np.zeros(T, dtype=np.int64)
    x[1] = 1
    ps = _mseries_arrays(F, ctx.p, x)
    want = np.zeros(T, dtype=np.int64)
    if ctx.q < T:
        want[ctx.q] = 1
    lead = leading_fgl_terms(ctx)
    lead_ok = all(i >= T or j >= T or a[i, j] == c for (i, j), c in lead.items())
    # no other terms of total degree q below the leading block
    others = [(i, j) for i in range(T) for j in range(T) if i + j == ctx.q and (i, j) not in lead and a[i, j]]
    coeffs = {(int(i), int(j)): F.coefficient(int(i), int(j)) for i, j in np.argwhere(a)}
    payload = {
        "truncation": T,
        "law": {"name": "F(x, y)", "kind": "series", "terms": terms_to_json(coeffs)},
        "pSeries": {"name": "[p](x)", "kind": "series",
                    "terms": terms_to_json({(int(i),): ctx.v(1, int(ps[i])) for i in np.flatnonzero(ps)})},
    }
    checks = [
        check("unital and commutative", bool(a[1, 0] == a[0, 1] == 1 and np.array_equal(a, a.T))),
        check("[p](x) = v x^(p^n)", bool(np.array_equal(ps, want))),
        check("degree p^n block is -v binom(p, i)/p x^(i p^(n-1)) y^((p-i) p^(n-1))", lead_ok and not others),
    ]
    return _result(payload, checks)


def transfer_unit(ctx: PrimeContext, exps) -> dict:
    R = _ring(ctx, exps)
    R2 = ring_of(ctx, R.group.product(R.group))
    if R2.rank > MAX_RANK**2:
        raise CapExceeded(f"rank of the doubled ring {R2.rank} is too large")
    unit = diagonal_transfer_unit(R)
    checks = []
    if tuple(exps) == (1,):
        checks.append(check("closed form for Z/p", unit == zp_transfer_unit(ctx)))
    arr = next(iter(unit.parts.values())) if unit.parts else np.zeros(R2.shape, dtype=np.int64)
    low = sum(N - 1 for N in R.shape)
    total = np.indices(R2.shape).sum(axis=0)
    checks.append(check(f"no terms of total degree below {low}", not np.any(arr[total < low])))
    payload = {"group": group_to_json(R.group), "transferUnit": tagged_class("(Delta^!)^*(1)", unit)}
    return _result(payload, checks, _higher(exps))


def pairing(ctx: PrimeContext, exps) -> dict:
    R = _ring(ctx, exps)
    P = pairing_matrix(R)
    M = P.matrix
    deg = np.array([sum(a) for a in R.monomials()], dtype=np.int64)
    homog = not np.any(M[(deg[:, None] + deg[None, :]) % (ctx.q - 1) != 0])
    payload = {
        "group": group_to_json(R.group),
        "basis": [list(a) for a in R.monomials()],
        "pairing": matrix_to_json(P.entries()),
    }
    checks = [
        check("symmetric", bool(np.array_equal(M, M.T))),
        check("nondegenerate", linalg.determinant(M, ctx.p) != 0),
        check("homogeneous", bool(homog)),
    ]
    return _result(payload, checks, _higher(exps))


def fundamental_class_report(ctx: PrimeContext, exps) -> dict:
    R = _ring(ctx, exps)
    fc = fundamental_class(R)
    checks = []
    if tuple(exps) == (1,):
        checks.append(check("closed form for Z/p", fc == zp_fundamental_class(ctx)))
    unit = all(cap_product(fc, basis_class(R, a)) == basis_class(R, a) for a in R.monomials())
    checks.append(check("[BG] cap b = b for every basis class", unit))
    payload = {"group": group_to_json(R.group), "fundamentalClass": tagged_class("[BG]", fc)}
    return _result(payload, checks, _higher(exps))


def cap_table(ctx: PrimeContext, exps) -> dict:
    R = _ring(ctx, exps)
    if R.rank**2 > MAX_TABLE:
        raise CapExceeded(f"a cap table with {R.rank ** 2} entries exceeds the limit {MAX_TABLE}")
    basis = {a: basis_class(R, a) for a in R.monomials()}
    table, products = [], {}
    for a, ba in basis.items():
        for b, bb in basis.items():
            prod = products[(a, b)] = cap_product(ba, bb)
            table.append({"left": list(a), "right": list(b), "product": {"kind": "homology", "terms": class_to_json(prod)}})
    checks = [check("commutative", all(products[(a, b)] == products[(b, a)] for a, b in products))]
    if tuple(exps) == (1,):
        closed = all(products[((i,), (j,))] == zp_cap(ctx, i, j) for i in range(ctx.q) for j in range(ctx.q))
        checks.append(check("closed form for Z/p", closed))
    payload = {"group": group_to_json(R.group), "table": table}
    return _result(payload, checks, _higher(exps))


def verify_transverse(ctx: PrimeContext, exps, h_gens, k_gens, cap: int = DEFAULT_CAP) -> dict:
    G = AbelianPGroup(ctx.p, tuple(exps))
    G.check_cap(cap)
    if h_gens is None and k_gens is None:
        s = sweep_transverse(ctx, G, cap)
        payload = {
            "group": group_to_json(G),
            "subgroups": s.subgroups,
            "pairs": s.pairs,
            "transversePairs": s.transverse_pairs,
            "failures": [list(f) for f in s.failures],
        }
        checks = [
            check("three transversality criteria agree on every pair", s.criteria_disagreements == 0),
            check("[BH] cap [BK] = [B(H n K)] for every transverse pair", s.formula_failures == 0),
        ]
        return _result(payload, checks, _higher(exps))
    if h_gens is None or k_gens is None:
        raise ValueError("give both --subgroup-h and --subgroup-k, or neither to sweep every pair")
    H, K = subgroup_basis(G, h_gens), subgroup_basis(G, k_gens)
    res = verify_transverse_formula(G, H, K, ctx, cap)
    payload = {
        "group": group_to_json(G),
        "h": [list(b) for b in H.basis],
        "k": [list(b) for b in K.basis],
        "intersection": [list(b) for b in res.meet.basis],
        "transverse": res.transverse,
    }
    if res.transverse:
        payload["lhs"] = tagged_class("[BH] cap [BK]", res.lhs)
        payload["rhs"] = tagged_class("[B(H n K)]", res.rhs)
        checks = [check("[BH] cap [BK] = [B(H n K)]", bool(res.holds))]
    else:
        checks = [{"name": "[BH] cap [BK] = [B(H n K)]", "status": "hypothesis not met",
                   "detail": "H and K are not transverse"}]
    return _result(payload, checks, _higher(exps))
