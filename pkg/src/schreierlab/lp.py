"""Exact rational linear programming.

A dense two-phase tableau simplex over Fractions with Bland's rule.  Every
optimal answer comes with dual multipliers that are checked for feasibility
and for matching the primal objective exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    optimum: Fraction
    primal: list[Fraction]
    dual: list[Fraction]
    status: str = "optimal"
    problem: tuple | None = field(default=None, repr=False)   # (c, rows, senses, b)

    def to_json(self):
        return {"optimum": str(self.optimum),
                "primal": [str(v) for v in self.primal],
                "dual": [str(v) for v in self.dual]}


def solve_lp(c: Sequence, rows: Sequence[Sequence], senses: Sequence[str], b: Sequence) -> LPResult:
    """Minimise c.x subject to rows[i].x (sense_i) b_i and x >= 0.

    Senses are "<=", ">=" or "=".  Dual multipliers are reported in the
    convention c - A^T y >= 0 after slack columns are added, so y_i <= 0 for
    "<=" rows and y_i >= 0 for ">=" rows.
    """
    n = len(c)
    m = len(rows)
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in r] for r in rows]
    b = [Fraction(v) for v in b]
    if any(len(r) != n for r in A) or len(senses) != m or len(b) != m:
        raise LPError("inconsistent dimensions")

    # standard form: one slack per inequality
    n_slack = sum(1 for s in senses if s != "=")
    width = n + n_slack
    std = []
    k = n
    for r, s in zip(A, senses):
        row = r + [Fraction(0)] * n_slack
        if s == "<=":
            row[k] = Fraction(1)
            k += 1
        elif s == ">=":
            row[k] = Fraction(-1)
            k += 1
        elif s != "=":
            raise LPError(f"unknown sense {s!r}")
        std.append(row)
    cost = c + [Fraction(0)] * n_slack
    rhs = list(b)
    flip = [False] * m
    for i in range(m):
        if rhs[i] < 0:
            std[i] = [-v for v in std[i]]
            rhs[i] = -rhs[i]
            flip[i] = True

    # tableau with one artificial per row
    total = width + m
    T = [std[i] + [Fraction(int(i == j)) for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [width + i for i in range(m)]

    phase1 = [Fraction(0)] * width + [Fraction(1)] * m
    _run_simplex(T, basis, phase1, allowed=total)
    if _objective(T, basis, phase1) != 0:
        return LPResult(Fraction(0), [], [], status="infeasible")
    # drive zero-level artificials out where possible
    for i, bv in enumerate(basis):
        if bv >= width:
            for col in range(width):
                if T[i][col] != 0:
                    _pivot(T, basis, i, col)
                    break
    status = _run_simplex(T, basis, cost + [Fraction(0)] * m, allowed=width)
    if status == "unbounded":
        return LPResult(Fraction(0), [], [], status="unbounded")

    x = [Fraction(0)] * total
    for i, bv in enumerate(basis):
        x[bv] = T[i][-1]
    full_cost = cost + [Fraction(0)] * m
    # y^T = c_B^T B^{-1}; B^{-1} sits under the artificial columns
    y = [sum(full_cost[basis[i]] * T[i][width + r] for i in range(m)) for r in range(m)]
    y = [-v if f else v for v, f in zip(y, flip)]
    opt = sum(cv * xv for cv, xv in zip(c, x[:n]))
    res = LPResult(opt, x[:n], y, problem=(c, A, list(senses), b))
    _check_certificate(c, A, senses, b, res)
    return res


def _objective(T, basis, cost) -> Fraction:
    return sum(cost[bv] * T[i][-1] for i, bv in enumerate(basis))


def _pivot(T, basis, r: int, col: int) -> None:
    pr = T[r]
    pv = pr[col]
    if pv != 1:
        T[r] = pr = [v / pv for v in pr]
    for i, row in enumerate(T):
        if i != r:
            f = row[col]
            if f:
                T[i] = [a - f * p for a, p in zip(row, pr)]
    basis[r] = col


def _run_simplex(T, basis, cost, allowed: int) -> str:
    m = len(T)
    while True:
        # reduced costs; Bland: lowest index with negative reduced cost enters
        in_basis = set(basis)
        enter = None
        for col in range(allowed):
            if col in in_basis:
                continue
            rc = cost[col] - sum(cost[basis[i]] * T[i][col] for i in range(m))
            if rc < 0:
                enter = col
                break
        if enter is None:
            return "optimal"
        best, leave = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded"
        _pivot(T, basis, leave, enter)


def _check_certificate(c, A, senses, b, res: LPResult) -> None:
    x, y = res.primal, res.dual
    for r, s, bv in zip(A, senses, b):
        lhs = sum(a * v for a, v in zip(r, x))
        if (s == "<=" and lhs > bv) or (s == ">=" and lhs < bv) or (s == "=" and lhs != bv):
            raise LPError("primal infeasible answer")
    if any(v < 0 for v in x):
        raise LPError("negative primal value")
    for j in range(len(c)):
        if c[j] - sum(A[i][j] * y[i] for i in range(len(A))) < 0:
            raise LPError("dual infeasible answer")
    for s, yv in zip(senses, y):
        if (s == "<=" and yv > 0) or (s == ">=" and yv < 0):
            raise LPError("dual sign violated")
    if sum(bv * yv for bv, yv in zip(b, y)) != res.optimum:
        raise LPError("duality gap")


def certificate_holds(res: LPResult) -> bool:
    """Recheck primal feasibility, dual feasibility and zero duality gap."""
    if res.status != "optimal" or res.problem is None:
        return False
    c, rows, senses, b = res.problem
    try:
        _check_certificate([Fraction(v) for v in c], [[Fraction(v) for v in r] for r in rows],
                           senses, [Fraction(v) for v in b], res)
    except LPError:
        return False
    return True
