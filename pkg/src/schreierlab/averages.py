"""The repeated averages hierarchy and the fast growing estimates built on it.

Averages are stored in run form: a run is a block of consecutive positions
of the underlying stream L sharing one coefficient.  Lengths are plain
integers, so a single average may cover millions of positions (or far more)
while staying cheap, and norms are evaluated directly on the runs.
Coordinates l_i or m_{l_i} are only computed at the few positions the norm
evaluation actually inspects.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .families import FamilyExpr, SBase, Schreier, An, member, schreier
from .normspaces import FinVec, schreier_norm
from .ordinals import ONE, Ordinal, fundamental_seq, parse_ordinal
from .streams import BudgetExceeded, Stream, is_fast_growing_prefix

ITEM_BUDGET = 100_000
EXPAND_LIMIT = 20_000
SMALL_SET = 64          # run sets up to this size are checked point by point
SCAN_BUDGET = 200_000


@dataclass(frozen=True)
class Run:
    start: int        # first position in L (1-indexed)
    count: int
    coeff: Fraction


class RunVec:
    """Nonnegative vector sum_r coeff_r * (e_{l_i} : start_r <= i < start_r + count_r)."""

    def __init__(self, runs: Sequence[Run]):
        merged: list[Run] = []
        for r in runs:
            if r.count <= 0:
                continue
            if merged and merged[-1].coeff == r.coeff and merged[-1].start + merged[-1].count == r.start:
                last = merged.pop()
                r = Run(last.start, last.count + r.count, r.coeff)
            elif merged and merged[-1].start + merged[-1].count > r.start:
                raise ValueError("runs must be successive")
            merged.append(r)
        self.runs = tuple(merged)

    def __repr__(self):
        return "RunVec(" + ", ".join(f"{r.coeff}*[{r.start}..+{r.count}]" for r in self.runs) + ")"

    @property
    def first(self) -> int:
        return self.runs[0].start

    @property
    def end(self) -> int:
        """One past the last position."""
        r = self.runs[-1]
        return r.start + r.count

    @property
    def count(self) -> int:
        return sum(r.count for r in self.runs)

    def mass(self) -> Fraction:
        return sum((r.coeff * r.count for r in self.runs), Fraction(0))

    def scale(self, c: Fraction) -> "RunVec":
        return RunVec([Run(r.start, r.count, r.coeff * c) for r in self.runs])

    def is_contiguous(self) -> bool:
        return all(a.start + a.count == b.start for a, b in zip(self.runs, self.runs[1:]))

    def positions(self) -> list[int]:
        if self.count > EXPAND_LIMIT:
            raise BudgetExceeded(f"{self.count} positions exceed the expansion limit {EXPAND_LIMIT}")
        return [r.start + k for r in self.runs for k in range(r.count)]

    def to_finvec(self, coord: Callable[[int], int]) -> FinVec:
        if self.count > EXPAND_LIMIT:
            raise BudgetExceeded(f"{self.count} positions exceed the expansion limit {EXPAND_LIMIT}")
        return FinVec({coord(r.start + k): r.coeff for r in self.runs for k in range(r.count)})


def concat(parts: Sequence[RunVec]) -> RunVec:
    return RunVec([r for p in parts for r in p.runs])


def _coordinates(L: Stream, M: Stream | None) -> Callable[[int], int]:
    if M is None:
        return lambda i: L[i]
    return lambda i: M[L[i]]


# ---------------------------------------------------------------------------
# the hierarchy

class AverageHierarchy:
    """x_n^{L_o, xi} for tails L_o of one stream L, memoized per (xi, o).

    Positions are always absolute positions in L; the tail L_o starts at
    position o + 1.
    """

    def __init__(self, L: Stream, item_budget: int = ITEM_BUDGET):
        self.L = L
        self.item_budget = item_budget
        self._memo: dict[tuple[Ordinal, int], list[RunVec]] = {}
        self.items_built = 0

    def get(self, xi, n: int, offset: int = 0) -> RunVec:
        xi = parse_ordinal(xi) if not isinstance(xi, Ordinal) else xi
        if n < 1:
            raise ValueError("averages are indexed from 1")
        seq = self._memo.setdefault((xi, offset), [])
        while len(seq) < n:
            pos = seq[-1].end - 1 if seq else offset
            seq.append(self._next(xi, offset, len(seq) + 1, pos))
        return seq[n - 1]

    def _tick(self, k: int = 1) -> None:
        self.items_built += k
        if self.items_built > self.item_budget:
            raise BudgetExceeded(f"more than {self.item_budget} averages needed")

    def _next(self, xi: Ordinal, offset: int, n: int, pos: int) -> RunVec:
        # pos = number of positions of L consumed before this average
        if xi.is_zero():
            return RunVec([Run(pos + 1, 1, Fraction(1))])
        p = self.L[pos + 1]
        if xi.is_successor():
            prev = xi.predecessor()
            if prev.is_zero():
                return RunVec([Run(pos + 1, p, Fraction(1, p))])
            self._tick(p)
            # the items x_{s_{n-1}+1}, ..., x_{s_n} of the level below
            first = self._items_before(prev, offset, pos)
            parts = [self.get(prev, first + k, offset) for k in range(1, p + 1)]
            return concat(parts).scale(Fraction(1, p))
        self._tick()
        return self.get(fundamental_seq(xi, p).successor(), 1, pos)

    def _items_before(self, xi: Ordinal, offset: int, pos: int) -> int:
        """How many averages of level xi on L_offset end at or before pos."""
        if pos == offset:
            return 0
        seq = self._memo.get((xi, offset), [])
        ends = [v.end - 1 for v in seq]
        k = bisect.bisect_right(ends, pos)
        if k == 0 or ends[k - 1] != pos:
            raise AssertionError("averages are not aligned")
        return k


@dataclass
class RepAvg:
    L: Stream
    xi: Ordinal
    n: int
    runs: RunVec
    consumed: int

    @property
    def support_count(self) -> int:
        return self.runs.count

    @property
    def vector(self) -> FinVec:
        return self.runs.to_finvec(lambda i: self.L[i])

    def support(self) -> tuple[int, ...]:
        return tuple(self.L[i] for i in self.runs.positions())

    def to_json(self, expand: bool = True) -> dict:
        out = {"L": self.L.desc, "xi": str(self.xi), "n": self.n,
               "runs": [{"start": r.start, "count": str(r.count), "coeff": str(r.coeff)}
                        for r in self.runs.runs],
               "consumed_prefix": self.consumed,
               "mass": str(self.runs.mass())}
        if expand and self.runs.count <= EXPAND_LIMIT:
            try:
                out["vector"] = {str(k): str(v) for k, v in self.vector.entries.items()}
            except BudgetExceeded:
                pass
        return out


_HIERARCHIES: dict[str, AverageHierarchy] = {}


def _hierarchy(L: Stream) -> AverageHierarchy:
    h = _HIERARCHIES.get(L.desc)
    if h is None or h.L is not L:
        h = AverageHierarchy(L)
        _HIERARCHIES[L.desc] = h
    h.items_built = 0
    return h


def repeated_average(L: Stream, xi, n: int) -> RepAvg:
    xi = parse_ordinal(xi) if not isinstance(xi, Ordinal) else xi
    rv = _hierarchy(L).get(xi, n)
    # the support reaches position end - 1, so that prefix of L is what was used
    return RepAvg(L, xi, n, rv, rv.end - 1)


def check_repavg(avg: RepAvg, previous: Sequence[RepAvg] = ()) -> dict[str, bool]:
    """Invariants: unit mass, S_xi support, successive supports tiling a prefix."""
    rv = avg.runs
    out = {"mass_one": rv.mass() == 1,
           "positive": all(r.coeff > 0 for r in rv.runs),
           "contiguous": rv.is_contiguous()}
    out["support_in_family"] = runset_member(schreier(avg.xi), rv, lambda i: avg.L[i])
    if previous:
        out["successive"] = all(a.runs.end == b.runs.first
                                for a, b in zip(list(previous) + [avg], list(previous)[1:] + [avg]))
        out["initial_segment"] = previous[0].runs.first == 1
    return out


# ---------------------------------------------------------------------------
# norms and membership on run vectors

def runset_member(F: FamilyExpr, rv: RunVec, coord: Callable[[int], int]) -> bool:
    """Membership of the coordinate set of rv in F.

    Small sets are expanded; large ones are handled for S_0, S, S_1, A_n and
    their repeated sums through greedy block cover counts.
    """
    small = rv.count <= SMALL_SET
    if small and _coords_cheap(rv, coord):
        return member(F, tuple(coord(i) for i in rv.positions()))
    if isinstance(F, Schreier):
        return _SchreierPrefix(rv, coord).longest(F.xi, 0) >= rv.count
    blocks = _sum_blocks(F)
    if blocks is not None:
        base, copies = blocks
        return _greedy_cover(base, rv, coord) <= copies
    if rv.count <= EXPAND_LIMIT and _coords_cheap(rv, coord):
        return member(F, tuple(coord(i) for i in rv.positions()))
    raise BudgetExceeded(f"cannot decide membership of {rv.count} points in {F}")


class _SchreierPrefix:
    """Longest run of consecutive points, from a given point, lying in S_xi.

    S_{xi+1} prefixes are cut greedily into longest S_xi blocks; the prefix
    may hold as many blocks as its least coordinate.  Greedy is optimal
    because a later suffix is a subset of an earlier one.
    """

    def __init__(self, rv: RunVec, coord, budget: int = SCAN_BUDGET):
        self.idx = _PositionIndex(rv)
        self.coord = coord
        self.total = rv.count
        self.budget = budget
        self.memo: dict[tuple[Ordinal, int], int] = {}

    def longest(self, xi: Ordinal, k: int) -> int:
        key = (xi, k)
        if key in self.memo:
            return self.memo[key]
        remaining = self.total - k
        if remaining <= 0:
            return 0
        self.budget -= 1
        if self.budget < 0:
            raise BudgetExceeded("membership scan exceeded its budget")
        pos = self.idx.position(k)
        if xi.is_zero():
            out = 1
        elif xi == ONE:
            out = remaining if pos >= remaining else min(self.coord(pos), remaining)
        elif xi.is_successor():
            prev = xi.predecessor()
            # a block count of at least `remaining` always suffices
            cap = remaining if pos >= remaining else self.coord(pos)
            j, used = k, 0
            while used < cap and j < self.total:
                j += self.longest(prev, j)
                used += 1
            out = j - k
        else:
            out = self.longest(fundamental_seq(xi, self.coord(pos)).successor(), k)
        self.memo[key] = out
        return out


def _coords_cheap(rv: RunVec, coord) -> bool:
    try:
        coord(rv.end - 1)
        return True
    except BudgetExceeded:
        return False


def _sum_blocks(F: FamilyExpr):
    """(base, copies) when F is (G, ..., G) for a cap-style G."""
    from .families import Sum
    copies = 1
    while isinstance(F, Sum):
        if F.first != _innermost(F.second):
            return None
        copies += 1
        F = F.second
    if _cap(F) is None:
        return None
    return F, copies


def _innermost(F):
    from .families import Sum
    while isinstance(F, Sum):
        F = F.first
    return F


def _cap(F):
    if isinstance(F, SBase) or (isinstance(F, Schreier) and F.xi == ONE):
        return lambda v: v
    if isinstance(F, Schreier) and F.xi.is_zero():
        return lambda v: 1
    if isinstance(F, An):
        return lambda v: F.n
    return None


def _greedy_cover(F, rv: RunVec, coord) -> int:
    """Fewest successive blocks of F covering rv's points (greedy is optimal
    for cap-style families since later suffixes are subsets)."""
    positions = _PositionIndex(rv)
    u, total, blocks = 0, rv.count, 0
    while u < total:
        blocks += 1
        u += _block_size(F, positions.position(u), coord, total - u)
    return blocks


def _min_sized(F) -> bool:
    return isinstance(F, SBase) or (isinstance(F, Schreier) and F.xi == ONE)


def _block_size(F, pos: int, coord, remaining: int) -> int:
    """Largest admissible block of consecutive points starting at position pos."""
    if not _min_sized(F):
        return min(_cap(F)(0), remaining)
    # coord(pos) >= pos, which often settles the comparison without evaluating
    if pos >= remaining:
        return remaining
    return min(coord(pos), remaining)


class _PositionIndex:
    """k-th point (0-based) of a run vector, and prefix masses."""

    def __init__(self, rv: RunVec):
        self.runs = rv.runs
        self.starts = []
        self.mass_before = []
        c, m = 0, Fraction(0)
        for r in rv.runs:
            self.starts.append(c)
            self.mass_before.append(m)
            c += r.count
            m += r.coeff * r.count
        self.total = c
        self.mass = m

    def run_of(self, k: int) -> int:
        return bisect.bisect_right(self.starts, k) - 1

    def position(self, k: int) -> int:
        j = self.run_of(k)
        return self.runs[j].start + (k - self.starts[j])

    def coeff(self, k: int) -> Fraction:
        return self.runs[self.run_of(k)].coeff

    def prefix_mass(self, k: int) -> Fraction:
        """Mass of the first k points."""
        if k <= 0:
            return Fraction(0)
        if k >= self.total:
            return self.mass
        j = self.run_of(k - 1)
        return self.mass_before[j] + self.runs[j].coeff * (k - self.starts[j])


def runvec_schreier_norm(rv: RunVec, F: FamilyExpr, coord: Callable[[int], int],
                         scan_budget: int = SCAN_BUDGET) -> tuple[Fraction, tuple[int, int]]:
    """Exact sup over E in F of the mass of rv on E, for cap-style F.

    Returns the value and the attaining set as (first point, number of points),
    counted in points of rv.  Needs nonincreasing coefficients, so the best set
    with a given minimum is the run of points starting there.
    """
    cap = _cap(F)
    if cap is None:
        raise ValueError(f"run norms need a cap-style family, not {F}")
    if any(a.coeff < b.coeff for a, b in zip(rv.runs, rv.runs[1:])):
        raise ValueError("run norms need nonincreasing coefficients")
    idx = _PositionIndex(rv)
    if isinstance(F, An) or (isinstance(F, Schreier) and F.xi.is_zero()):
        size = min(cap(0), idx.total)
        return idx.prefix_mass(size), (0, size)
    best, arg = Fraction(-1), (0, 0)
    k = 0
    while k < idx.total:
        if k > scan_budget:
            raise BudgetExceeded("too many candidate minima")
        remaining = idx.total - k
        size = _block_size(F, idx.position(k), coord, remaining)
        val = idx.prefix_mass(k + size) - idx.prefix_mass(k)
        if val > best:
            best, arg = val, (k, size)
        # once the whole suffix is admissible, later starts only lose mass
        if size == remaining:
            break
        k += 1
    return best, arg


def relabeled_sum_norm(L: Stream, M: Stream | None, xi: Ordinal, parts: Sequence[RunVec]
                       ) -> tuple[Fraction, dict]:
    """Exact ||T_M sum parts||_xi, by expansion when small and on runs otherwise."""
    rv = concat(parts)
    coord = _coordinates(L, M)
    F = schreier(xi)
    if rv.count <= 18 or (_cap(F) is None and rv.count <= EXPAND_LIMIT):
        x = rv.to_finvec(coord)
        value, cert = schreier_norm(x, F)
        return value, {"route": "expanded", "set": list(cert.norming_set)}
    value, (k, size) = runvec_schreier_norm(rv, F, coord)
    return value, {"route": "runs", "first_point": k, "points": size}


# ---------------------------------------------------------------------------
# Lemma-style checks and witnesses

@dataclass
class AveragesCheck:
    bound_holds: bool
    value: Fraction
    bound: Fraction
    detail: dict


def lemma_repeated_averages_check(M: Stream, eps, L: Stream, xi, k: int) -> AveragesCheck:
    """Exact ||T_M sum_{n<=k} x_n^{L,xi}||_xi against 1 + eps."""
    eps = Fraction(eps)
    xi = parse_ordinal(xi) if not isinstance(xi, Ordinal) else xi
    h = _hierarchy(L)
    parts = [h.get(xi, n) for n in range(1, k + 1)]
    # the growth condition only matters along positions actually touched
    probe = L.prefix(max(2, L.consumed))
    if not is_fast_growing_prefix(M, eps, probe):
        raise ValueError("L is not (M, eps) fast growing on the consumed prefix")
    value, detail = relabeled_sum_norm(L, M, xi, parts)
    detail.update({"points": sum(p.count for p in parts), "consumed_prefix": L.consumed})
    bound = 1 + eps
    return AveragesCheck(value <= bound, value, bound, detail)


@dataclass
class Counterexample:
    x: FinVec
    y: FinVec
    E: tuple[int, ...]
    value: Fraction


def counterexample_value(n: int, m: int) -> Fraction:
    return Fraction(n, n + 1) + Fraction(m - n, m + n)


def non_fast_growing_counterexample(n: int, m: int, build_vectors: bool = True) -> Counterexample:
    """x = (n+1)^{-1} 1_{{n+1} u I}, y = |J|^{-1} 1_J, E = [m, 2m) with I = [m, m+n)."""
    if n < 2 or m <= n + 1:
        raise ValueError("need n >= 2 and m > n + 1")
    value = counterexample_value(n, m)
    I = range(m, m + n)
    J = range(m + n, 2 * (m + n))
    E = tuple(range(m, 2 * m))
    if not build_vectors:
        return Counterexample(FinVec(), FinVec(), E, value)
    x = FinVec.ones([n + 1, *I], Fraction(1, n + 1))
    y = FinVec.ones(J, Fraction(1, len(J)))
    s = x + y
    direct = sum((s[i] for i in E), Fraction(0))
    if direct != value:
        raise AssertionError("closed form disagrees with the direct sum")
    return Counterexample(x, y, E, value)


@dataclass
class TsirelsonWitness:
    F: tuple[int, ...] | None
    F_count: int
    coeffs: list[Fraction] | None
    value: Fraction
    bound: Fraction
    L_prefix: list[int]
    exact: bool


def tsirelson_thing_witness(m: Callable[[tuple[int, ...]], int], rho, xi, eps) -> TsirelsonWitness:
    """Choose L, M as in the recursive construction and return F = supp x_1^{L, xi+1}.

    ``value`` is the exact norm of sum a_n e_{m(F|_n)} when F is small enough to
    list, otherwise the dominating norm of T_M x_1^{L, xi+1}.
    """
    rho, eps = Fraction(rho), Fraction(eps)
    xi = parse_ordinal(xi) if not isinstance(xi, Ordinal) else xi
    ratio = (1 + 2 * eps) / eps
    first = (1 + eps) / rho
    l1 = first.numerator // first.denominator + 1

    Lvals: list[int] = []
    Mvals: dict[int, int] = {}

    def m_at(j: int) -> int:
        # M is the identity shifted up wherever a prefix of L forced it
        best, base = 0, 0
        for l in Lvals:
            if l <= j:
                best, base = Mvals[l], l
        return j if not base else best + (j - base)

    def gen_L():
        cur = l1
        while True:
            floor = m_at(cur) if not Lvals else m_at(cur - 1) + 1
            prefix = tuple(Lvals) + (cur,)
            forced = m(prefix)
            if len(prefix) >= 2 and not forced > m(prefix[:-1]):
                raise ValueError("node function is not increasing along initial segments")
            Lvals.append(cur)
            Mvals[cur] = max(forced, floor)
            yield cur
            bound = Mvals[cur] * ratio
            cur = bound.numerator // bound.denominator + 1

    L = Stream(f"witnessL({l1},{eps})", gen_L)

    def formula_M(j: int) -> int:
        while not Lvals or Lvals[-1] < j:
            L[len(Lvals) + 1]
        return m_at(j)

    M = Stream("witnessM", formula=formula_M)
    h = AverageHierarchy(L)
    rv = h.get(xi.successor(), 1)
    bound = (1 + eps) / l1
    if rv.count <= EXPAND_LIMIT:
        F = tuple(L[i] for i in rv.positions())
        if not member(schreier(xi.successor()), F):
            raise AssertionError("witness support left the family")
        coeffs = [r.coeff for r in rv.runs for _ in range(r.count)]
        x = FinVec({m(F[:i + 1]): a for i, a in enumerate(coeffs)})
        value, _ = schreier_norm(x, schreier(xi))
        exact = True
    else:
        F, coeffs = None, None
        value, _ = relabeled_sum_norm(L, M, xi, [rv])
        exact = False
    if not value < rho:
        raise AssertionError("witness value is not below rho")
    return TsirelsonWitness(F, rv.count, coeffs, value, bound, list(Lvals), exact)
