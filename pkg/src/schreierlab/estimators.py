"""Lower l_1 estimates, upper l_inf estimates and the quantitative checks
built on them.

Polyhedral norms are described either by weighted coordinate sets
(||y|| = max_S sum_j w_j |y_j|, covering l_1, l_inf, Schreier and Tsirelson
norms on a fixed support) or by an explicit list of functionals
(||y|| = max_f |f(y)|).  Minimising such a norm over the l_1 sphere is one
linear program per sign orthant, solved exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .averages import (AverageHierarchy, concat, relabeled_sum_norm, runset_member,
                       _coordinates)
from .families import FamilyExpr, member, members_within, repeated_sum, schreier
from .lp import LPResult, certificate_holds, solve_lp
from .normspaces import FinVec, schreier_norm, tsirelson_norm, vector_to_json
from .ordinals import Ordinal, parse_ordinal
from .streams import BudgetExceeded, Stream, fast_growing, identity

MAX_VECTORS = 12


# ---------------------------------------------------------------------------
# norm oracles

WeightedSets = list[dict[int, Fraction]]


@dataclass
class NormOracle:
    name: str
    evaluate: Callable[[FinVec], Fraction]
    polyhedral: bool = True
    unconditional: bool = True
    weighted_sets: Callable[[tuple[int, ...]], WeightedSets] | None = None
    functionals: Callable[[tuple[int, ...]], list[dict[int, Fraction]]] | None = None

    def __call__(self, x: FinVec) -> Fraction:
        return self.evaluate(x)


def l1_oracle() -> NormOracle:
    return NormOracle("l1", lambda x: x.l1_norm(),
                      weighted_sets=lambda supp: [{j: Fraction(1) for j in supp}])


def linf_oracle() -> NormOracle:
    return NormOracle("linf", lambda x: x.sup_norm(),
                      weighted_sets=lambda supp: [{j: Fraction(1)} for j in supp])


def _maximal_within(F: FamilyExpr, supp: tuple[int, ...]) -> list[tuple[int, ...]]:
    sets = [E for E in members_within(F, supp) if E]
    as_sets = [frozenset(E) for E in sets]
    out = []
    for E, s in zip(sets, as_sets):
        if not any(s < t for t in as_sets):
            out.append(E)
    return out


def schreier_oracle(F: FamilyExpr) -> NormOracle:
    def sets(supp):
        if len(supp) > 20:
            raise BudgetExceeded("support too large to list family sets")
        return [{j: Fraction(1) for j in E} for E in _maximal_within(F, supp)]
    return NormOracle(f"schreier:{F}", lambda x: schreier_norm(x, F)[0], weighted_sets=sets)


def tsirelson_functionals(supp: tuple[int, ...], theta: Fraction, F: FamilyExpr) -> WeightedSets:
    """Leaf weights theta^depth of every admissible splitting tree on supp."""
    theta = Fraction(theta)

    def interval(i: int, j: int) -> set[tuple]:
        out = {tuple((supp[k], Fraction(1)) for k in [t]) for t in range(i, j + 1)}
        for starts in _admissible_starts(i, j):
            pieces = list(zip(starts, [s - 1 for s in starts[1:]] + [j]))
            options = [interval(a, b) for a, b in pieces]
            for combo in itertools.product(*options):
                out.add(tuple((k, theta * w) for part in combo for k, w in part))
        return out

    def _admissible_starts(i: int, j: int):
        def rec(starts):
            if len(starts) >= 2:
                yield starts
            for nxt in range(starts[-1] + 1, j + 1):
                if member(F, tuple(supp[s] for s in starts) + (supp[nxt],)):
                    yield from rec(starts + (nxt,))
        for a in range(i, j):
            if member(F, (supp[a],)):
                yield from rec((a,))

    if len(supp) > 7:
        raise BudgetExceeded("support too large to list tree functionals")
    raw = interval(0, len(supp) - 1) if supp else set()
    return [dict(t) for t in raw]


def tsirelson_oracle(theta, F: FamilyExpr) -> NormOracle:
    theta = Fraction(theta)
    return NormOracle(f"tsirelson:{theta}:{F}", lambda x: tsirelson_norm(x, theta, F)[0],
                      weighted_sets=lambda supp: tsirelson_functionals(supp, theta, F))


def weighted_oracle(sets: Sequence[dict], name: str = "weighted") -> NormOracle:
    """||y|| = max_S sum_j w_j |y_j|; a lattice norm once every coordinate is weighted."""
    ws = [{int(k): Fraction(v) for k, v in S.items()} for S in sets]

    def ev(x: FinVec) -> Fraction:
        return max(sum((w * abs(x[j]) for j, w in S.items()), Fraction(0)) for S in ws)
    return NormOracle(name, ev, weighted_sets=lambda supp: ws)


def functional_oracle(functionals: Sequence[dict], name: str = "polyhedral",
                      unconditional: bool = False) -> NormOracle:
    """||y|| = max_f |f(y)| for an explicit, spanning list of functionals."""
    fs = [{int(k): Fraction(v) for k, v in f.items()} for f in functionals]

    def ev(x: FinVec) -> Fraction:
        return max(abs(sum((c * x[k] for k, c in f.items()), Fraction(0))) for f in fs)
    return NormOracle(name, ev, unconditional=unconditional, functionals=lambda supp: fs)


def spot_check_norm(oracle: NormOracle, vectors: Sequence[FinVec]) -> None:
    """Raise if homogeneity or the triangle inequality fails on the given vectors."""
    for x in vectors:
        if oracle(x.scale(-2)) != 2 * oracle(x):
            raise ValueError(f"{oracle.name} is not absolutely homogeneous")
    for x, y in itertools.combinations(vectors, 2):
        if oracle(x + y) > oracle(x) + oracle(y):
            raise ValueError(f"{oracle.name} violates the triangle inequality")


# ---------------------------------------------------------------------------
# minimum over the l_1 sphere

@dataclass
class DominationResult:
    constant: Fraction                 # min of ||sum a_i x_i|| over sum |a_i| = 1
    coefficients: list[Fraction]
    lp: LPResult
    orthants: int
    certificates: list[LPResult] = field(default_factory=list)

    def to_json(self):
        return {"constant": str(self.constant),
                "coefficients": [str(a) for a in self.coefficients],
                "orthants": self.orthants,
                "lp": self.lp.to_json(),
                "certified": all(certificate_holds(c) for c in self.certificates)}


def _disjoint(vectors: Sequence[FinVec]) -> bool:
    seen: set[int] = set()
    for x in vectors:
        s = set(x.support)
        if s & seen:
            return False
        seen |= s
    return True


def _orthants(vectors: Sequence[FinVec], oracle: NormOracle):
    n = len(vectors)
    if oracle.unconditional and _disjoint(vectors):
        return [(1,) * n], [x.abs() for x in vectors]
    # the norm is even, so the first sign can stay positive
    signs = [(1,) + s for s in itertools.product((1, -1), repeat=n - 1)]
    return signs, list(vectors)


def _min_norm_program(exprs: dict[int, tuple[list, Fraction]], k: int, oracle: NormOracle,
                      extra: Sequence[tuple[list, str, Fraction]]) -> LPResult:
    """Minimise ||y|| where y_c = sum_v coef[v] var_v + const, over vars >= 0 and
    the extra rows on the vars alone."""
    coords = sorted(exprs)
    rows, senses, rhs = [], [], []
    if oracle.weighted_sets is not None:
        sets = oracle.weighted_sets(tuple(coords))
        pos = {c: k + i for i, c in enumerate(coords)}
        width = k + len(coords) + 1
        for c in coords:
            coef, const = exprs[c]
            # u_c >= y_c, unless y_c can never be positive; same for -y_c
            if const > 0 or any(v > 0 for v in coef):
                r = [-v for v in coef] + [0] * (width - k)
                r[pos[c]] = 1
                rows.append(r), senses.append(">="), rhs.append(const)
            if const < 0 or any(v < 0 for v in coef):
                r = list(coef) + [0] * (width - k)
                r[pos[c]] = 1
                rows.append(r), senses.append(">="), rhs.append(-const)
        for S in sets:
            r = [0] * width
            r[-1] = 1
            for c, w in S.items():
                if c in pos:
                    r[pos[c]] = -w
            rows.append(r), senses.append(">="), rhs.append(0)
    elif oracle.functionals is not None:
        width = k + 1
        for f in oracle.functionals(tuple(coords)):
            lin = [Fraction(0)] * k
            const = Fraction(0)
            for c, w in f.items():
                if c in exprs:
                    coef, cc = exprs[c]
                    lin = [a + w * v for a, v in zip(lin, coef)]
                    const += w * cc
            rows.append([-v for v in lin] + [1]), senses.append(">="), rhs.append(const)
            rows.append(list(lin) + [1]), senses.append(">="), rhs.append(-const)
    else:
        raise ValueError(f"{oracle.name} has no polyhedral description")
    for coef, sense, val in extra:
        rows.append(list(coef) + [0] * (width - k)), senses.append(sense), rhs.append(val)
    cost = [0] * (width - 1) + [1]
    res = solve_lp(cost, rows, senses, rhs)
    if res.status != "optimal":
        raise ArithmeticError(f"norm program ended {res.status}")
    return res


def _orthant_lp(vectors: Sequence[FinVec], signs, oracle: NormOracle):
    n = len(vectors)
    ys = [x.scale(s) for x, s in zip(vectors, signs)]
    coords = sorted(set().union(*(y.support for y in ys)))
    exprs = {c: ([y[c] for y in ys], Fraction(0)) for c in coords}
    res = _min_norm_program(exprs, n, oracle, [([1] * n, "=", Fraction(1))])
    return res, [a * s for a, s in zip(res.primal[:n], signs)]


def l1_domination_constant(vectors: Sequence[FinVec], oracle: NormOracle) -> DominationResult:
    """Exact min of ||sum a_i x_i|| over the l_1 unit sphere, with LP certificates."""
    n = len(vectors)
    if n == 0:
        raise ValueError("need at least one vector")
    if n > MAX_VECTORS:
        raise BudgetExceeded(f"{n} vectors exceed the exact limit {MAX_VECTORS}")
    if not oracle.polyhedral:
        raise ValueError(f"{oracle.name} is not polyhedral")
    signs_list, work = _orthants(vectors, oracle)
    best = None
    certs = []
    for signs in signs_list:
        res, coeffs = _orthant_lp(work, signs, oracle)
        certs.append(res)
        if best is None or res.optimum < best[0].optimum:
            best = (res, coeffs)
    res, coeffs = best
    # with disjoint supports a lattice norm ignores signs, so the same
    # coefficients are optimal for the original vectors
    combo = FinVec()
    for a, x in zip(coeffs, vectors):
        combo = combo + x.scale(a)
    if oracle(combo) != res.optimum:
        raise ArithmeticError("LP optimum disagrees with the norm oracle")
    return DominationResult(res.optimum, coeffs, res, len(signs_list), certs)


@dataclass
class MembershipResult:
    member: bool
    exact: bool
    value: Fraction | float
    witness: list
    note: str = ""

    def to_json(self):
        return {"member": self.member, "exact": self.exact, "value": str(self.value),
                "witness": [str(w) for w in self.witness], "note": self.note}


def t1_membership(vectors: Sequence[FinVec], K, oracle: NormOracle,
                  samples: int = 20000, seed: int = 0) -> MembershipResult:
    """Is K^{-1} ||a||_1 <= ||sum a_i x_i|| <= ||a||_1 for all scalars a?"""
    K = Fraction(K)
    if K < 1:
        raise ValueError("K must be at least 1")
    norms = [oracle(x) for x in vectors]
    if max(norms) > 1:
        i = max(range(len(norms)), key=lambda k: norms[k])
        return MembershipResult(False, True, norms[i], [i], "upper estimate fails at a vertex")
    if oracle.polyhedral and len(vectors) <= MAX_VECTORS:
        dom = l1_domination_constant(vectors, oracle)
        return MembershipResult(dom.constant >= 1 / K, True, dom.constant, dom.coefficients)
    val, a = sampled_sphere_min(vectors, oracle, samples, seed)
    return MembershipResult(val >= float(1 / K), False, val, list(a), "sampled verdict, not certified")


def w_membership(vectors: Sequence[FinVec], K, oracle: NormOracle) -> MembershipResult:
    """Is ||x_i|| >= 1 and ||sum a_i x_i|| <= K whenever max |a_i| = 1?"""
    K = Fraction(K)
    for i, x in enumerate(vectors):
        if oracle(x) < 1:
            return MembershipResult(False, True, oracle(x), [i], "a vector has norm below 1")
    n = len(vectors)
    if n > MAX_VECTORS + 4:
        raise BudgetExceeded("too many vectors for vertex enumeration")
    # a convex function peaks over the cube at a vertex; the norm is even
    best, arg = Fraction(-1), None
    for signs in itertools.product((1, -1), repeat=n - 1):
        signs = (1,) + signs
        v = FinVec()
        for s, x in zip(signs, vectors):
            v = v + x.scale(s)
        val = oracle(v)
        if val > best:
            best, arg = val, list(signs)
    return MembershipResult(best <= K, True, best, arg)


def linf_lower_constant(vectors: Sequence[FinVec], oracle: NormOracle) -> tuple[Fraction, list[Fraction]]:
    """Exact min of ||sum a_i x_i|| over max |a_i| = 1, one LP per face a_j = 1."""
    n = len(vectors)
    if n > MAX_VECTORS:
        raise BudgetExceeded(f"{n} vectors exceed the exact limit {MAX_VECTORS}")
    coords = sorted(set().union(*(x.support for x in vectors)))
    best = None
    for j in range(n):
        others = [i for i in range(n) if i != j]
        # a_i = b_i - 1 with 0 <= b_i <= 2
        exprs = {c: ([vectors[i][c] for i in others],
                     vectors[j][c] - sum((vectors[i][c] for i in others), Fraction(0)))
                 for c in coords}
        box = [([int(i == v) for v in range(n - 1)], "<=", Fraction(2)) for i in range(n - 1)]
        res = _min_norm_program(exprs, n - 1, oracle, box)
        if best is None or res.optimum < best[0]:
            a = [b - 1 for b in res.primal[:n - 1]]
            best = (res.optimum, a[:j] + [Fraction(1)] + a[j:])
    value, coeffs = best
    combo = FinVec()
    for c, x in zip(coeffs, vectors):
        combo = combo + x.scale(c)
    if oracle(combo) != value:
        raise ArithmeticError("LP optimum disagrees with the norm oracle")
    return value, coeffs


def james_c0_check(vectors: Sequence[FinVec], eps, oracle: NormOracle) -> tuple[bool, Fraction]:
    """For vectors in W(X, 1+eps), the l_inf lower constant is at least 1 - eps."""
    eps = Fraction(eps)
    if not 0 <= eps < 1:
        raise ValueError("eps must lie in [0, 1)")
    if not w_membership(vectors, 1 + eps, oracle).member:
        raise ValueError("vectors are not in W(X, 1+eps)")
    value, _ = linf_lower_constant(vectors, oracle)
    return value >= 1 - eps, value


# ---------------------------------------------------------------------------
# sampling cross-check

def _dense(vectors: Sequence[FinVec], oracle: NormOracle):
    coords = sorted(set().union(*(x.support for x in vectors)))
    col = {j: k for k, j in enumerate(coords)}
    X = np.zeros((len(vectors), len(coords)))
    for i, x in enumerate(vectors):
        for j, v in x.entries.items():
            X[i, col[j]] = float(v)
    if oracle.weighted_sets is not None:
        sets = oracle.weighted_sets(tuple(coords))
        W = np.zeros((len(sets), len(coords)))
        for s, S in enumerate(sets):
            for j, w in S.items():
                if j in col:
                    W[s, col[j]] = float(w)
        return X, lambda Y: (np.abs(Y) @ W.T).max(axis=1)
    fs = oracle.functionals(tuple(coords))
    Fm = np.zeros((len(fs), len(coords)))
    for s, f in enumerate(fs):
        for j, c in f.items():
            if j in col:
                Fm[s, col[j]] = float(c)
    return X, lambda Y: np.abs(Y @ Fm.T).max(axis=1)


def sampled_sphere_min(vectors: Sequence[FinVec], oracle: NormOracle, samples: int = 100_000,
                       seed: int = 0, chunk: int = 20_000) -> tuple[float, np.ndarray]:
    """Minimum of the norm over uniform random points of the l_1 sphere."""
    rng = np.random.default_rng(seed)
    X, norm = _dense(vectors, oracle)
    n = len(vectors)
    best, arg = np.inf, None
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        A = rng.dirichlet(np.ones(n), size=m) * rng.choice((-1.0, 1.0), size=(m, n))
        A[:, 0] = np.abs(A[:, 0])        # the norm is even
        vals = norm(A @ X)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, arg = float(vals[k]), A[k]
        done += m
    return best, arg


# ---------------------------------------------------------------------------
# James blocking

@dataclass
class BlockingResult:
    vectors: list[FinVec]
    alternative: str                  # "window" or "averages"
    group: int | None
    constant: Fraction
    target: Fraction
    verified: bool
    group_constants: list[Fraction]

    def to_json(self):
        return {"alternative": self.alternative, "group": self.group,
                "constant": str(self.constant), "target": str(self.target),
                "verified": self.verified,
                "group_constants": [str(c) for c in self.group_constants],
                "vectors": [vector_to_json(v) for v in self.vectors]}


def james_l1_blocking(vectors: Sequence[FinVec], C, oracle: NormOracle) -> BlockingResult:
    """From n^2 vectors in the unit ball with lower l_1 constant 1/C^2, produce n
    vectors in the ball with lower l_1 constant 1/C."""
    C = Fraction(C)
    if C <= 1:
        raise ValueError("C must exceed 1")
    N = len(vectors)
    n = int(round(N ** 0.5))
    if n * n != N or n < 1:
        raise ValueError("need a square number of vectors")
    if any(oracle(x) > 1 for x in vectors):
        raise ValueError("vectors must lie in the unit ball")
    if N <= MAX_VECTORS:
        whole = l1_domination_constant(vectors, oracle).constant
        if whole < 1 / C ** 2:
            raise ValueError(f"lower l_1 constant {whole} is below 1/C^2")
    groups = [list(vectors[j * n:(j + 1) * n]) for j in range(n)]
    results = [l1_domination_constant(g, oracle) for g in groups]
    consts = [r.constant for r in results]
    for j, r in enumerate(results):
        if r.constant >= 1 / C:
            out, alt, idx = groups[j], "window", j
            break
    else:
        out = []
        for g, r in zip(groups, results):
            z = FinVec()
            for a, x in zip(r.coefficients, g):
                z = z + x.scale(a)
            out.append(z.scale(C))
        alt, idx = "averages", None
    check = l1_domination_constant(out, oracle).constant
    verified = check >= 1 / C and all(oracle(y) <= 1 for y in out)
    return BlockingResult(out, alt, idx, check, 1 / C, verified, consts)


# ---------------------------------------------------------------------------
# Schreier space sharpness

@dataclass
class SharpnessCertificate:
    xi: Ordinal
    n: int
    eps: Fraction
    value: Fraction
    union_in_family: bool
    norm_bound_holds: bool
    excluded_below: Fraction          # every K < this fails
    L_prefix: list[int]
    points: int
    detail: dict

    @property
    def certified(self) -> bool:
        return self.union_in_family and self.norm_bound_holds

    def to_json(self):
        return {"xi": str(self.xi), "n": self.n, "eps": str(self.eps), "value": str(self.value),
                "union_in_family": self.union_in_family,
                "norm_bound_holds": self.norm_bound_holds,
                "excluded_below": str(self.excluded_below),
                "L_prefix": [str(v) for v in self.L_prefix], "points": str(self.points),
                "detail": {k: str(v) for k, v in self.detail.items()}}


def schreier_sharpness_check(xi, n: int, eps, M: Stream | None = None) -> SharpnessCertificate:
    """Relabeled sum of n repeated averages: its support is in (S_xi)_n while its
    norm stays at most 1 + eps, so K-lower estimates fail for K < n / (1 + eps)."""
    xi = parse_ordinal(xi) if not isinstance(xi, Ordinal) else xi
    eps = Fraction(eps)
    if n < 2:
        raise ValueError("n must be at least 2")
    M = M or identity()
    L = fast_growing(M, eps)
    h = AverageHierarchy(L)
    parts = [h.get(xi, i) for i in range(1, n + 1)]
    coord = _coordinates(L, M)
    in_family = runset_member(repeated_sum(schreier(xi), n), concat(parts), coord)
    value, detail = relabeled_sum_norm(L, M, xi, parts)
    holds = value <= 1 + eps
    total = sum(p.count for p in parts)
    prefix = L.prefix(min(L.consumed, 12))
    return SharpnessCertificate(xi, n, eps, value, in_family, holds, Fraction(n) / value,
                                prefix, total, detail)


def basis_domination_on(E: Sequence[int], oracle: NormOracle) -> DominationResult:
    return l1_domination_constant([FinVec.basis(j) for j in E], oracle)


# ---------------------------------------------------------------------------
# Tsirelson upper estimate for averages of averages

@dataclass
class TsirelsonUpper:
    value: Fraction
    bound: Fraction
    holds: bool
    lengths: list[int]
    vector: FinVec

    def to_json(self):
        return {"value": str(self.value), "bound": str(self.bound), "holds": self.holds,
                "lengths": self.lengths, "support_size": len(self.vector.support)}


def tsirelson_upper_lengths(N: int, eps: Fraction, first: int = 1) -> list[int]:
    """l_1 = first and l_{r+1} the least length with max supp(x_r) / l_{r+1} < eps."""
    lengths, end = [first], first
    for _ in range(N - 1):
        bound = Fraction(end) / eps
        nxt = bound.numerator // bound.denominator + 1
        lengths.append(nxt)
        end += nxt
    return lengths


def tsirelson_upper_check(theta, N: int, eps, lengths: Sequence[int] | None = None) -> TsirelsonUpper:
    """x = N^{-1} sum_n x_n with x_n the flat average of l_n consecutive basis
    vectors; compares ||x|| in T(theta, S_1) with 1/N + theta(1+2eps)(N-1)/N."""
    theta, eps = Fraction(theta), Fraction(eps)
    if N < 1:
        raise ValueError("N must be positive")
    lengths = list(lengths) if lengths is not None else tsirelson_upper_lengths(N, eps)
    if len(lengths) != N:
        raise ValueError("need one length per block")
    entries, end = {}, 0
    for r, l in enumerate(lengths):
        if r and not Fraction(end, l) < eps:
            raise ValueError(f"growth condition fails before block {r + 1}")
        for j in range(end + 1, end + l + 1):
            entries[j] = Fraction(1, N * l)
        end += l
    x = FinVec(entries)
    value, _ = tsirelson_norm(x, theta, schreier(1))
    bound = Fraction(1, N) + theta * (1 + 2 * eps) * (N - 1) / N
    return TsirelsonUpper(value, bound, value <= bound, lengths, x)


def asymptotic_l1_check(blocks: Sequence[FinVec], theta, F: FamilyExpr) -> tuple[bool, Fraction, Fraction]:
    """For F-admissible blocks, ||sum x_i|| >= theta * sum ||x_i||."""
    theta = Fraction(theta)
    mins = tuple(min(b.support) for b in blocks)
    for a, b in zip(blocks, blocks[1:]):
        if not max(a.support) < min(b.support):
            raise ValueError("blocks must be successive")
    if not member(F, mins):
        raise ValueError("blocks are not admissible")
    total = FinVec()
    for b in blocks:
        total = total + b
    lhs = tsirelson_norm(total, theta, F)[0]
    rhs = theta * sum(tsirelson_norm(b, theta, F)[0] for b in blocks)
    return lhs >= rhs, lhs, rhs


# ---------------------------------------------------------------------------
# spreading model constants on a window

def spreading_model_constant(F: FamilyExpr, oracle: NormOracle, window: int,
                             vector: Callable[[int], FinVec] = FinVec.basis
                             ) -> tuple[Fraction, tuple[int, ...]]:
    """Least K with K^{-1} ||a||_1 <= ||sum_{n in E} a_n x_n|| for all E in F inside
    1..window, with the worst E.  Subsets have larger constants, so only maximal
    members are solved."""
    if window > 16:
        raise BudgetExceeded("window too large")
    worst, arg = Fraction(1), ()
    for E in _maximal_within(F, tuple(range(1, window + 1))):
        if len(E) > MAX_VECTORS:
            raise BudgetExceeded(f"member of size {len(E)} exceeds {MAX_VECTORS}")
        c = l1_domination_constant([vector(j) for j in E], oracle).constant
        if 1 / c > worst or not arg:
            worst, arg = max(worst, 1 / c), E
    return worst, arg
