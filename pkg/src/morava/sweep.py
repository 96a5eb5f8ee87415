"""Exhaustive checks over all abelian p-groups of bounded order."""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .abelian import (
    DEFAULT_CAP,
    AbelianPGroup,
    ConsistencyError,
    enumerate_subgroups,
    is_transverse,
)
from .coefficients import PrimeContext
from .duality import (
    DualityError,
    basis_class,
    cap_product,
    cap_product_via_cup,
    fundamental_class,
    homology_transfer,
    lambda_apply,
    pairing_matrix,
    pushforward,
    subgroup_class,
)
from .kring import apply_hom, pullback_hom, ring_of


def partitions(k: int, largest: int | None = None):
    """Partitions of k as non-increasing tuples."""
    largest = k if largest is None else largest
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in partitions(k - first, first):
            yield (first,) + rest


def groups_up_to(p: int, max_log_order: int, include_trivial: bool = False) -> list[AbelianPGroup]:
    start = 0 if include_trivial else 1
    return [AbelianPGroup(p, part) for k in range(start, max_log_order + 1) for part in partitions(k)]


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("MORAVA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class TransverseSweep:
    p: int
    n: int
    exponents: tuple[int, ...]
    subgroups: int = 0
    pairs: int = 0
    transverse_pairs: int = 0
    formula_failures: int = 0
    criteria_disagreements: int = 0
    failures: list = field(default_factory=list)


def sweep_transverse(ctx: PrimeContext, G: AbelianPGroup, cap: int = DEFAULT_CAP) -> TransverseSweep:
    """[BH] cap [BK] = [B(H n K)] for every transverse pair of subgroups of G."""
    subs = enumerate_subgroups(G, cap)
    by_elements = {S.element_set: S for S in subs}
    classes = {}

    def cls(S):
        if S.element_set not in classes:
            classes[S.element_set] = subgroup_class(S, ctx)
        return classes[S.element_set]

    out = TransverseSweep(ctx.p, ctx.n, G.exponents, subgroups=len(subs))
    for H in subs:
        for K in subs:
            out.pairs += 1
            try:
                rep = is_transverse(H, K, cap)
            except ConsistencyError:
                out.criteria_disagreements += 1
                continue
            if not rep.transverse:
                continue
            out.transverse_pairs += 1
            meet = by_elements[H.element_set & K.element_set]
            if cap_product(cls(H), cls(K)) != cls(meet):
                out.formula_failures += 1
                out.failures.append((repr(H), repr(K)))
    return out


@dataclass
class PropertySuite:
    p: int
    n: int
    exponents: tuple[int, ...]
    rank: int
    nondegenerate: bool = False
    symmetric: bool = False
    homogeneous: bool = False
    unit_axiom: bool = False
    restriction_square: bool = False
    transfer_of_fundamental_class: bool = False
    projection_formula: bool = False
    cap_routes_agree: bool = False
    cap_pairs_checked: int = 0
    kunneth: bool | None = None

    @property
    def passed(self) -> bool:
        flags = [
            self.nondegenerate, self.symmetric, self.homogeneous, self.unit_axiom,
            self.restriction_square, self.transfer_of_fundamental_class,
            self.projection_formula, self.cap_routes_agree,
        ]
        return all(flags) and self.kunneth is not False


def _pairing_homogeneous(P, ctx) -> bool:
    R = P.ring
    deg = np.array([sum(a) for a in R.monomials()])
    tot = deg[:, None] + deg[None, :]
    return not np.any(P.matrix[(tot % (ctx.q - 1)) != 0])


def property_suite(
    ctx: PrimeContext, G: AbelianPGroup, cap: int = DEFAULT_CAP, all_pairs_rank: int = 64, samples: int = 200
) -> PropertySuite:
    R = ring_of(ctx, G)
    out = PropertySuite(ctx.p, ctx.n, G.exponents, R.rank)
    try:
        P = pairing_matrix(R)
    except DualityError:
        return out
    out.nondegenerate = True
    out.symmetric = bool(np.array_equal(P.matrix, P.matrix.T))
    out.homogeneous = _pairing_homogeneous(P, ctx)
    basis = [basis_class(R, a) for a in R.monomials()]
    fc = fundamental_class(R)
    out.unit_axiom = all(cap_product(fc, b) == b for b in basis)

    square = transfer_fc = projection = True
    for S in enumerate_subgroups(G, cap):
        i = S.inclusion()
        h = pullback_hom(i, ctx)
        RH = ring_of(ctx, i.domain)
        bh = subgroup_class(S, ctx)
        if homology_transfer(i, fc) != fundamental_class(RH):
            transfer_fc = False
        for b in basis:
            shriek = homology_transfer(i, b)
            if lambda_apply(shriek) != apply_hom(h, lambda_apply(b)):
                square = False
            if pushforward(i, shriek) != cap_product(b, bh):
                projection = False
    out.restriction_square = square
    out.transfer_of_fundamental_class = transfer_fc
    out.projection_formula = projection

    if R.rank <= all_pairs_rank:
        pairs = [(a, b) for a in basis for b in basis]
    else:
        rng = random.Random(f"{ctx.p}-{ctx.n}-{G.exponents}")
        pairs = [(rng.choice(basis), rng.choice(basis)) for _ in range(samples)]
    out.cap_pairs_checked = len(pairs)
    out.cap_routes_agree = all(cap_product(a, b) == cap_product_via_cup(a, b) for a, b in pairs)

    if G.rank >= 2:
        A = AbelianPGroup(G.p, G.exponents[:1])
        B = AbelianPGroup(G.p, G.exponents[1:])
        PA, PB = pairing_matrix(ring_of(ctx, A)), pairing_matrix(ring_of(ctx, B))
        out.kunneth = bool(np.array_equal(P.matrix, np.kron(PA.matrix, PB.matrix) % ctx.p))
    return out


def _run(job):
    kind, p, n, exps, cap = job
    ctx = PrimeContext(p, n)
    G = AbelianPGroup(p, exps)
    if kind == "transverse":
        return asdict(sweep_transverse(ctx, G, cap))
    suite = property_suite(ctx, G, cap)
    return {**asdict(suite), "passed": suite.passed}


def run_parallel(jobs: list[tuple], threads: int | None = None) -> list[dict]:
    """Run independent sweep jobs; results come back in job order."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(jobs) <= 1:
        return [_run(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run, jobs))
