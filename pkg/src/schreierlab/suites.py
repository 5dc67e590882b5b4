"""Deterministic acceptance batteries.

Each battery returns a ``CriterionReport``; a battery passes only when its
check holds and it finishes inside its time limit.  Brute-force oracles used
here are deliberately written from the definitions and share no code with
the fast paths they check.
"""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from mpmath import iv

from . import averages, estimators, families, normspaces, ordinals, trees
from .families import An, Product, Sum, iota, member, schreier
from .lp import certificate_holds
from .normspaces import FinVec
from .ordinals import fundamental_seq, hessenberg_sum, parse_ordinal
from .streams import BudgetExceeded, fast_growing, identity

DEFAULT_SEED = 20240601
SAMPLING_GAP = 1e-3
SAMPLES = 100_000


@dataclass
class CriterionReport:
    number: int
    name: str
    passed: bool
    elapsed: float
    limit: float
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "elapsed": round(self.elapsed, 3), "limit": self.limit,
                "detail": _jsonable(self.detail)}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, float):
        return float(f"{v:.6g}")
    return str(v)


# ---------------------------------------------------------------------------
# 1. natural sum

def hessenberg_battery(seed: int) -> tuple[bool, dict]:
    ords = ordinals.enumerate_cnf([parse_ordinal(k) for k in (0, 1, 2)], 3)
    comm = assoc = 0
    bad = []
    for a in ords:
        for b in ords:
            ab = hessenberg_sum(a, b)
            comm += 1
            if ab != hessenberg_sum(b, a):
                bad.append(("comm", str(a), str(b)))
            for c in ords:
                assoc += 1
                if hessenberg_sum(ab, c) != hessenberg_sum(a, hessenberg_sum(b, c)):
                    bad.append(("assoc", str(a), str(b), str(c)))
    return not bad, {"ordinals": len(ords), "pairs": comm, "triples": assoc, "failures": bad[:5]}


# ---------------------------------------------------------------------------
# 2. regularity of Schreier families

def brute_schreier(xi, universe: int, _cache: dict | None = None) -> frozenset:
    """All members of S_xi inside {1..universe}, built from the definitions."""
    cache = {} if _cache is None else _cache
    xi = parse_ordinal(xi) if not isinstance(xi, ordinals.Ordinal) else xi
    if xi in cache:
        return cache[xi]
    all_sets = [E for r in range(universe + 1)
                for E in itertools.combinations(range(1, universe + 1), r)]
    if xi.is_zero():
        out = frozenset(E for E in all_sets if len(E) <= 1)
    elif xi.is_successor():
        prev = brute_schreier(xi.predecessor(), universe, cache)
        out = set()
        for E in all_sets:
            # fewest consecutive blocks from prev covering E
            n = len(E)
            best = [0] + [n + 1] * n
            for j in range(1, n + 1):
                for i in range(j):
                    if E[i:j] in prev and best[i] + 1 < best[j]:
                        best[j] = best[i] + 1
            if not E or best[n] <= E[0]:
                out.add(E)
        out = frozenset(out)
    else:
        out = frozenset(E for E in all_sets
                        if not E or E in brute_schreier(fundamental_seq(xi, E[0]).successor(),
                                                         universe, cache))
    cache[xi] = out
    return out


def regularity_battery(seed: int, universe: int = 12) -> tuple[bool, dict]:
    all_sets = [E for r in range(universe + 1)
                for E in itertools.combinations(range(1, universe + 1), r)]
    detail, ok = {}, True
    cache: dict = {}
    for text in ("1", "2", "3", "w", "w+1", "w^2"):
        F = schreier(text)
        brute = brute_schreier(text, universe, cache)
        mismatch = [E for E in all_sets if member(F, E) != (E in brute)]
        hereditary = all(member(F, E[:i] + E[i + 1:]) for E in brute for i in range(len(E)))
        spreading = True
        for E in brute:
            for i in range(len(E)):
                up = E[i] + 1
                if up <= universe and (i + 1 == len(E) or up < E[i + 1]):
                    if not member(F, E[:i] + (up,) + E[i + 1:]):
                        spreading = False
        good = not mismatch and hereditary and spreading
        ok &= good
        detail[text] = {"members": len(brute), "mismatches": len(mismatch),
                        "hereditary": hereditary, "spreading": spreading}
    return ok, detail


# ---------------------------------------------------------------------------
# 3. iota against explicit derivative chains

def _a_combinations(max_index: int) -> list:
    base = [An(n) for n in range(1, max_index + 1)]
    out = list(base)
    for a, b in itertools.product(base, repeat=2):
        out.append(Sum(a, b))
        out.append(Product(a, b))
    for a, b, c in itertools.product(base[:3], repeat=3):
        out.append(Sum(a, Product(b, c)))
        out.append(Product(Sum(a, b), c))
    return [F for F in out if iota(F).is_finite() and int(iota(F)) <= max_index]


def explicit_chain_length(F, universe: int) -> int:
    """Steps of E -> E minus its maximal members until only the empty set is left."""
    fam = set(families.members_within(F, range(1, universe + 1)))
    steps = 0
    while fam != {()}:
        maximal = {E for E in fam
                   if not any(tuple(sorted(E + (p,))) in fam
                              for p in range(1, universe + 1) if p not in E)}
        fam -= maximal
        steps += 1
    return steps


def iota_battery(seed: int, max_index: int = 12) -> tuple[bool, dict]:
    checked, bad = 0, []
    for F in _a_combinations(max_index):
        k = int(iota(F))
        explicit = explicit_chain_length(F, k)
        probes = (families.in_derivative(F, (), k) and not families.in_derivative(F, (), k + 1)
                  and not families.in_derivative(F, (1,), k)
                  and (k == 1 or families.in_derivative(F, (1,), k - 1)))
        checked += 1
        if explicit != k or not probes:
            bad.append((str(F), k, explicit, probes))
    return not bad, {"families": checked, "failures": bad[:5]}


# ---------------------------------------------------------------------------
# 4, 5. repeated averages

def averages_grid_battery(seed: int) -> tuple[bool, dict]:
    cells, passed, over_budget, bad = 0, 0, [], []
    M = identity()
    for eps in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
        L = fast_growing(M, eps)
        for xi in range(4):
            for k in range(1, 5):
                cells += 1
                try:
                    check = averages.lemma_repeated_averages_check(M, eps, L, xi, k)
                except BudgetExceeded:
                    over_budget.append(f"xi={xi},k={k},eps={eps}")
                    continue
                if check.bound_holds:
                    passed += 1
                else:
                    bad.append((xi, k, str(eps), str(check.value)))
    return passed == cells, {"cells": cells, "verified": passed, "over_budget": over_budget,
                             "violations": bad}


def counterexample_battery(seed: int) -> tuple[bool, dict]:
    value = averages.counterexample_value(10, 1000)
    ce = averages.non_fast_growing_counterexample(10, 1000)
    return value > Fraction(3, 2) and ce.value == value, {"value": value}


# ---------------------------------------------------------------------------
# 6. sharpness of the Schreier lower estimate

def sharpness_battery(seed: int) -> tuple[bool, dict]:
    rng = random.Random(seed)
    eps = Fraction(1, 4)
    ok, detail = True, {}
    for n in (2, 3):
        cert = estimators.schreier_sharpness_check(1, n, eps)
        good = cert.certified and cert.excluded_below >= Fraction(n) / (1 + eps)
        ok &= good
        detail[f"n={n}"] = {"value": cert.value, "union_in_family": cert.union_in_family,
                            "excluded_below": cert.excluded_below}
    oracle = estimators.schreier_oracle(schreier(1))
    sampled = []
    for _ in range(25):
        m = rng.randint(1, 12)
        size = rng.randint(1, m)
        E = tuple(sorted(rng.sample(range(m + 1, m + 20), size - 1))) if size > 1 else ()
        E = (m,) + E
        assert member(schreier(1), E)
        dom = estimators.basis_domination_on(E, oracle)
        sampled.append(E)
        if dom.constant != 1 or not all(certificate_holds(c) for c in dom.certificates):
            ok = False
            detail.setdefault("bad_sets", []).append(E)
    detail["sampled_sets"] = len(sampled)
    return ok, detail


# ---------------------------------------------------------------------------
# 7. Tsirelson battery

def _random_vector(rng: random.Random, size: int, low: int = 1, high: int = 14) -> FinVec:
    supp = sorted(rng.sample(range(low, high + 1), size))
    return FinVec({j: Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 6)) for j in supp})


def implicit_rhs(x: FinVec, theta: Fraction, F) -> Fraction:
    """max(||x||_inf, theta * max over admissible splittings of the sum of piece norms)."""
    supp = sorted(x.support)
    n = len(supp)
    norms: dict = {}

    def piece(i, j):
        if (i, j) not in norms:
            norms[(i, j)] = normspaces.tsirelson_norm(
                normspaces.restrict(x, supp[i:j]), theta, F)[0]
        return norms[(i, j)]

    best = x.sup_norm()
    for k in range(2, n + 1):
        for starts in itertools.combinations(range(n), k):
            if not member(F, tuple(supp[s] for s in starts)):
                continue
            ends = list(starts[1:]) + [n]
            total = sum(piece(a, b) for a, b in zip(starts, ends))
            best = max(best, theta * total)
    return best


def tsirelson_battery(seed: int) -> tuple[bool, dict]:
    rng = random.Random(seed)
    theta = Fraction(1, 2)
    S1 = schreier(1)
    bad_fixed, bad_routes = 0, 0
    for _ in range(200):
        x = _random_vector(rng, rng.randint(1, 10))
        v = normspaces.tsirelson_norm(x, theta, S1)[0]
        if v != implicit_rhs(x, theta, S1):
            bad_fixed += 1
        if v != normspaces.tsirelson_norm(x, theta, S1, route="generic")[0]:
            bad_routes += 1
    bad_lower = 0
    for _ in range(100):
        first = rng.randint(2, 6)
        s = rng.randint(2, first)
        start, blocks = first, []
        for _ in range(s):
            length = rng.randint(1, 4)
            b = FinVec({j: Fraction(rng.randint(-6, 6) or 1, rng.randint(1, 4))
                        for j in range(start, start + length)})
            blocks.append(b.scale(1 / normspaces.tsirelson_norm(b, theta, S1)[0]))
            start += length + rng.randint(0, 2)
        holds, _, _ = estimators.asymptotic_l1_check(blocks, theta, S1)
        bad_lower += not holds
    upper = {}
    for N in (2, 3, 4):
        u = estimators.tsirelson_upper_check(theta, N, Fraction(1, 4))
        upper[N] = {"value": u.value, "bound": u.bound, "holds": u.holds, "lengths": u.lengths}
    ok = not (bad_fixed or bad_routes or bad_lower) and all(u["holds"] for u in upper.values())
    return ok, {"implicit_failures": bad_fixed, "route_disagreements": bad_routes,
                "lower_failures": bad_lower, "upper": upper}


# ---------------------------------------------------------------------------
# 8. coloring sweep

def coloring_battery(seed: int, max_nodes: int = 12, max_leaves: int = 6) -> tuple[bool, dict]:
    shapes = colorings = 0
    bad = []
    for T in trees.enumerate_btrees(max_nodes):
        leaves = T.maximal()
        if len(leaves) > max_leaves:
            continue
        shapes += 1
        n = trees.tree_order(T)
        for bits in itertools.product((0, 1), repeat=len(leaves)):
            col = trees.TreeColoring.from_leaf_colors(T, dict(zip(leaves, bits)))
            split = trees.coloring_sums(T, col)
            colorings += 1
            good = sum(split.lengths) == n and all(
                trees.check_extended_map(T, split.maps[j])
                and trees.is_monochromatic(col, split.maps[j], j) for j in (0, 1))
            if not good:
                bad.append((repr(T), bits))
    return not bad, {"shapes": shapes, "colorings": colorings, "failures": bad[:3]}


# ---------------------------------------------------------------------------
# 9. LP certificates against sampling

def random_polyhedral_instance(rng: random.Random):
    d = rng.randint(2, 4)
    n = rng.choice([2, 3])
    fs = [{j: Fraction(rng.randint(-3, 3)) for j in range(1, d + 1)}
          for _ in range(rng.randint(d, d + 3))]
    fs += [{j: Fraction(1)} for j in range(1, d + 1)]
    oracle = estimators.functional_oracle(fs)
    vectors = []
    while len(vectors) < n:
        v = FinVec({j: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for j in range(1, d + 1)})
        if not v.is_zero():
            vectors.append(v.scale(1 / oracle(v)))
    return vectors, oracle


def lp_sampling_battery(seed: int, instances: int = 100, samples: int = SAMPLES,
                        gap: float = SAMPLING_GAP) -> tuple[bool, dict]:
    rng = random.Random(seed)
    certified = below = within = 0
    worst = {2: 0.0, 3: 0.0}
    for k in range(instances):
        vectors, oracle = random_polyhedral_instance(rng)
        dom = estimators.l1_domination_constant(vectors, oracle)
        t1 = estimators.t1_membership(vectors, 2, oracle)
        certified += all(certificate_holds(c) for c in dom.certificates) and t1.exact
        sampled, _ = estimators.sampled_sphere_min(vectors, oracle, samples, seed=seed + k)
        diff = sampled - float(dom.constant)
        below += diff >= -1e-12
        within += diff <= gap
        n = len(vectors)
        worst[n] = max(worst[n], diff)
    ok = certified == below == within == instances
    return ok, {"instances": instances, "certified": certified, "lp_below_sampled": below,
                "gap_within": within, "gap_tolerance": gap, "worst_gap_by_n": worst}


# ---------------------------------------------------------------------------
# 10. Schlumprecht

def schlumprecht_battery(seed: int, precision: int = 40) -> tuple[bool, dict]:
    limit = Fraction(1, 2 ** precision)
    v2 = normspaces.schlumprecht_norm(FinVec.ones([1, 2]), precision)
    ref_lo, ref_hi = normspaces._with_precision(
        4 * precision,
        lambda: normspaces._iv_bounds(iv.mpf(2) * iv.log(iv.mpf(2)) / iv.log(iv.mpf(3))))
    contains = v2.interval.lo <= ref_lo and ref_hi <= v2.interval.hi
    widths, lows, floors = [], [], []
    ok = contains and v2.interval.width <= limit
    prev = None
    for n in range(1, 7):
        val = normspaces.schlumprecht_norm(FinVec.ones(range(1, n + 1)), precision).interval
        theta_lo, _ = normspaces.schlumprecht_weight_bounds(n, 4 * precision)
        widths.append(val.width <= limit)
        floors.append(val.lo >= n * theta_lo - limit)
        lows.append(prev is None or val.lo >= prev)
        prev = val.lo
    ok &= all(widths) and all(floors) and all(lows)
    return ok, {"e1+e2": [float(v2.interval.lo), float(v2.interval.hi)],
                "contains_reference": contains, "widths_ok": widths,
                "nondecreasing": lows, "above_n_theta_n": floors}


# ---------------------------------------------------------------------------
# 11. James blocking

def random_lattice_instance(rng: random.Random):
    n = rng.choice([2, 3])
    N = n * n
    dim = N * rng.randint(1, 2)
    sets = [{j: Fraction(1)} for j in range(1, dim + 1)]
    for _ in range(rng.randint(2, 6)):
        S = rng.sample(range(1, dim + 1), rng.randint(2, dim))
        sets.append({j: Fraction(rng.randint(1, 4), rng.randint(2, 4)) for j in S})
    oracle = estimators.weighted_oracle(sets)
    per = dim // N
    vectors = []
    for i in range(N):
        v = FinVec({j: Fraction(rng.randint(1, 5)) * rng.choice((1, -1))
                    for j in range(i * per + 1, (i + 1) * per + 1)})
        vectors.append(v.scale(1 / oracle(v)))
    c = estimators.l1_domination_constant(vectors, oracle).constant
    # least hundredth C with C^2 >= 1/c
    C = Fraction(math.ceil(100 * math.sqrt(1 / c)), 100)
    while C * C < 1 / c:
        C += Fraction(1, 100)
    return vectors, max(C, Fraction(101, 100)), oracle


def james_battery(seed: int, instances: int = 50) -> tuple[bool, dict]:
    rng = random.Random(seed)
    verified, alternatives = 0, {"window": 0, "averages": 0}
    for _ in range(instances):
        vectors, C, oracle = random_lattice_instance(rng)
        out = estimators.james_l1_blocking(vectors, C, oracle)
        independent = estimators.l1_domination_constant(out.vectors, oracle)
        good = (out.verified and independent.constant >= 1 / C
                and all(oracle(y) <= 1 for y in out.vectors)
                and all(certificate_holds(c) for c in independent.certificates))
        verified += good
        alternatives[out.alternative] += 1
    return verified == instances, {"instances": instances, "verified": verified,
                                   "alternatives": alternatives}


# ---------------------------------------------------------------------------

CRITERIA: dict[int, tuple[str, Callable, float]] = {
    1: ("natural sum commutes and associates", hessenberg_battery, 10),
    2: ("Schreier families are regular and greedy membership is exact", regularity_battery, 60),
    3: ("iota matches explicit derivative chains", iota_battery, 30),
    4: ("repeated averages grid stays below 1+eps", averages_grid_battery, 120),
    5: ("slow growth counterexample exceeds 3/2", counterexample_battery, 1),
    6: ("Schreier lower estimate is sharp", sharpness_battery, 120),
    7: ("Tsirelson fixed point, lower and upper estimates", tsirelson_battery, 300),
    8: ("coloring sums sweep", coloring_battery, 300),
    9: ("LP certificates and sphere sampling", lp_sampling_battery, 120),
    10: ("Schlumprecht enclosures", schlumprecht_battery, 60),
    11: ("James blocking", james_battery, 60),
}

SUITES = {
    "ordinals": [1],
    "families": [2, 3],
    "trees": [8],
    "norms": [7, 10],
    "averages": [4, 5],
    "estimators": [6, 9, 11],
}
SUITES["all"] = sorted(c for cs in SUITES.values() for c in cs)


def run_criterion(number: int, seed: int = DEFAULT_SEED) -> CriterionReport:
    name, fn, limit = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        ok, detail = fn(seed)
    except Exception as exc:     # a crash is a failure entry, not an abort
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    elapsed = time.perf_counter() - t0
    if elapsed > limit:
        detail = dict(detail, over_time=True)
    return CriterionReport(number, name, ok and elapsed <= limit, elapsed, limit, detail)


def run_suite(name: str, seed: int = DEFAULT_SEED) -> list[CriterionReport]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return [run_criterion(c, seed) for c in SUITES[name]]
