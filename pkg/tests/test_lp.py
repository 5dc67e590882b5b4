import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from schreierlab.lp import LPError, certificate_holds, solve_lp


def _solve_square(A, b):
    """Gaussian elimination over Fractions; None when singular."""
    n = len(A)
    M = [list(r) + [v] for r, v in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def brute_min(c, rows, senses, b):
    """Best vertex: try every choice of n tight constraints; None if infeasible."""
    n = len(c)
    cons = [([Fraction(v) for v in r], Fraction(v)) for r, v in zip(rows, b)]
    cons += [([Fraction(int(i == j)) for i in range(n)], Fraction(0)) for j in range(n)]
    best = None
    for tight in itertools.combinations(range(len(cons)), n):
        x = _solve_square([cons[i][0] for i in tight], [cons[i][1] for i in tight])
        if x is None or any(v < 0 for v in x):
            continue
        ok = True
        for (r, v), s in zip(cons, senses):
            lhs = sum(a * xi for a, xi in zip(r, x))
            ok &= lhs <= v if s == "<=" else lhs >= v if s == ">=" else lhs == v
        if ok:
            val = sum(Fraction(ci) * xi for ci, xi in zip(c, x))
            best = val if best is None else min(best, val)
    return best


def test_small_example():
    # min -x - y with x + 2y <= 4, 3x + y <= 6
    res = solve_lp([-1, -1], [[1, 2], [3, 1]], ["<=", "<="], [4, 6])
    assert res.optimum == Fraction(-14, 5)
    assert res.primal[:2] == [Fraction(8, 5), Fraction(6, 5)]
    assert certificate_holds(res)


def test_equality_and_ge_rows():
    res = solve_lp([1, 2, 0], [[1, 1, 1], [1, 0, -1]], ["=", ">="], [1, Fraction(1, 3)])
    assert res.optimum == Fraction(2, 3)
    assert certificate_holds(res)


def test_infeasible():
    res = solve_lp([1], [[1], [1]], ["<=", ">="], [1, 2])
    assert res.status == "infeasible" and not certificate_holds(res)


def test_unbounded():
    res = solve_lp([-1, 0], [[1, -1]], ["<=",], [1])
    assert res.status == "unbounded"


def test_bad_shapes():
    with pytest.raises(LPError):
        solve_lp([1, 1], [[1]], ["<="], [1])
    with pytest.raises(LPError):
        solve_lp([1], [[1]], ["<"], [1])


def test_tampered_certificate_is_caught():
    res = solve_lp([-1, -1], [[1, 2], [3, 1]], ["<=", "<="], [4, 6])
    res.dual = [d * 2 for d in res.dual]
    assert not certificate_holds(res)


small = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_matches_basis_enumeration(n, m, data):
    c = [data.draw(small) for _ in range(n)]
    rows = [[data.draw(small) for _ in range(n)] for _ in range(m)]
    senses = [data.draw(st.sampled_from(["<=", ">=", "="])) for _ in range(m)]
    b = [data.draw(small) for _ in range(m)]
    # a box row keeps every instance bounded
    rows.append([1] * n)
    senses.append("<=")
    b.append(10)
    res = solve_lp(c, rows, senses, b)
    want = brute_min(c, rows, senses, b)
    if want is None:
        assert res.status == "infeasible"
    else:
        assert res.status == "optimal" and res.optimum == want
        assert certificate_holds(res)
