import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from schreierlab.estimators import (
    basis_domination_on, functional_oracle, james_c0_check, james_l1_blocking, l1_domination_constant,
    l1_oracle, linf_lower_constant, linf_oracle, sampled_sphere_min, schreier_oracle,
    schreier_sharpness_check, spot_check_norm, spreading_model_constant, t1_membership,
    tsirelson_oracle, tsirelson_upper_check, tsirelson_upper_lengths, asymptotic_l1_check,
    w_membership, weighted_oracle,
)
from schreierlab.families import member, repeated_sum, schreier
from schreierlab.normspaces import FinVec, parse_vector
from schreierlab.streams import BudgetExceeded
from schreierlab.suites import random_polyhedral_instance

V = parse_vector
S1 = schreier(1)


def _signed_functionals(sets):
    """Weighted-set norms as plain functionals: one per set and sign pattern."""
    out = []
    for S in sets:
        keys = sorted(S)
        for signs in itertools.product((1, -1), repeat=len(keys)):
            out.append({k: s * S[k] for k, s in zip(keys, signs)})
    return out


def exact_pair_min(x, y, functionals):
    """Min of max_f |f(a x + b y)| over |a| + |b| = 1, edge by edge.

    On each edge of the l_1 sphere every |f| is piecewise linear in t, so the
    minimum sits at an endpoint, a zero of some f, or a crossing of two of them.
    """
    best = None
    for sa, sb in ((1, 1), (1, -1)):
        lines = []
        for f in functionals:
            fx = sum(c * x[k] for k, c in f.items())
            fy = sum(c * y[k] for k, c in f.items())
            # f at (t, 1 - t): sa * t * fx + sb * (1 - t) * fy
            lines.append((sa * fx - sb * fy, sb * fy))
        ts = {Fraction(0), Fraction(1)}
        signed = lines + [(-m, -q) for m, q in lines]
        for (m1, q1), (m2, q2) in itertools.combinations(signed, 2):
            if m1 != m2:
                t = (q2 - q1) / (m1 - m2)
                if 0 <= t <= 1:
                    ts.add(t)
        for t in ts:
            v = max(abs(m * t + q) for m, q in lines)
            best = v if best is None else min(best, v)
    return best


def test_domination_examples():
    basis = [FinVec.basis(j) for j in range(1, 5)]
    assert l1_domination_constant(basis, l1_oracle()).constant == 1
    res = l1_domination_constant([V("e1"), V("e2")], linf_oracle())
    assert res.constant == Fraction(1, 2)
    assert [abs(a) for a in res.coefficients] == [Fraction(1, 2), Fraction(1, 2)]
    assert res.to_json()["certified"]


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_schreier_window_has_constant_one(N):
    vecs = [FinVec.basis(j) for j in range(N, 2 * N)]
    assert l1_domination_constant(vecs, schreier_oracle(S1)).constant == 1


def test_t1_examples():
    basis = [FinVec.basis(j) for j in range(1, 4)]
    assert t1_membership(basis, 1, l1_oracle()).member
    no = t1_membership([V("e1"), V("e2")], Fraction(19, 10), linf_oracle())
    assert not no.member and no.exact and no.value == Fraction(1, 2)
    yes = t1_membership([V("e1"), V("e2")], 2, linf_oracle())
    assert yes.member and yes.value == Fraction(1, 2)


def test_t1_upper_estimate_failure():
    res = t1_membership([V("2e1"), V("e2")], 2, l1_oracle())
    assert not res.member and res.witness == [0]


def test_t1_large_families_fall_back_to_sampling():
    vecs = [FinVec.basis(j) for j in range(1, 15)]
    res = t1_membership(vecs, 1, l1_oracle(), samples=2000)
    assert not res.exact and "sampled" in res.note


def test_w_examples():
    assert w_membership([V("e1"), V("e2"), V("e3")], 1, linf_oracle()).member
    res = w_membership([V("e1"), V("e1")], Fraction(3, 2), linf_oracle())
    assert not res.member and res.value == 2


def test_c0_conversion():
    # e1, e2 and e1 + e2 / 4 under the sup norm sit in W(X, 5/4)
    vecs = [V("e1"), V("e2"), V("e3+1/4e1")]
    assert w_membership(vecs, Fraction(5, 4), linf_oracle()).member
    ok, value = james_c0_check(vecs, Fraction(1, 4), linf_oracle())
    assert ok and value >= Fraction(3, 4)
    assert linf_lower_constant([V("e1"), V("e2")], linf_oracle())[0] == 1
    assert linf_lower_constant([V("e1"), V("e1+e2")], l1_oracle())[0] == 1


def test_c0_conversion_rejects_outside_w():
    with pytest.raises(ValueError):
        james_c0_check([V("e1"), V("e1")], Fraction(1, 4), linf_oracle())


def test_james_window_for_l1_basis():
    basis = [FinVec.basis(j) for j in range(1, 5)]
    res = james_l1_blocking(basis, Fraction(11, 10), l1_oracle())
    assert res.alternative == "window" and res.group == 0
    assert res.vectors == basis[:2] and res.verified


def test_james_averages_when_every_window_collapses():
    sets = [{j: 1} for j in range(1, 5)] + [{j: Fraction(1, 2) for j in range(1, 5)}]
    oracle = weighted_oracle(sets)
    vecs = [FinVec.basis(j) for j in range(1, 5)]
    assert l1_domination_constant(vecs, oracle).constant == Fraction(1, 2)
    C = Fraction(142, 100)
    res = james_l1_blocking(vecs, C, oracle)
    assert res.alternative == "averages"
    assert res.group_constants == [Fraction(1, 2), Fraction(1, 2)]
    assert res.verified and all(oracle(v) <= 1 for v in res.vectors)
    independent = exact_pair_min(*res.vectors, _signed_functionals(sets))
    assert independent == res.constant and independent >= 1 / C


def test_james_rejects_weak_inputs():
    vecs = [FinVec.basis(j) for j in range(1, 5)]
    with pytest.raises(ValueError):
        james_l1_blocking(vecs, Fraction(11, 10), linf_oracle())


def test_pair_minimum_matches_edge_oracle():
    rng = random.Random(11)
    for _ in range(25):
        vecs, oracle, fs = None, None, None
        while vecs is None or len(vecs) != 2:
            vecs, oracle, fs = _polyhedral(rng)
        got = l1_domination_constant(vecs, oracle)
        assert got.constant == exact_pair_min(vecs[0], vecs[1], fs)
        assert got.to_json()["certified"]


def _polyhedral(rng):
    vecs, oracle = random_polyhedral_instance(rng)
    coords = tuple(sorted(set().union(*(v.support for v in vecs))))
    return vecs, oracle, oracle.functionals(coords)


def test_sampling_never_beats_the_lp():
    rng = random.Random(5)
    for _ in range(5):
        vecs, oracle, _ = _polyhedral(rng)
        lp = l1_domination_constant(vecs, oracle).constant
        sampled, _ = sampled_sphere_min(vecs, oracle, samples=5000, seed=1)
        assert sampled >= float(lp) - 1e-12


def test_sharpness_examples():
    two = schreier_sharpness_check(1, 2, Fraction(1, 2))
    assert two.certified and two.value <= Fraction(3, 2) and two.excluded_below >= Fraction(4, 3)
    three = schreier_sharpness_check(1, 3, Fraction(1, 4))
    assert three.certified and three.excluded_below >= Fraction(12, 5)


@pytest.mark.parametrize("n", [2, 3])
def test_sharpness_excluded_bound_over_eps(n):
    bounds = []
    for eps in (Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
        cert = schreier_sharpness_check(1, n, eps)
        assert cert.certified and cert.excluded_below >= n / (1 + eps)
        bounds.append(cert.excluded_below)
    assert bounds == sorted(bounds) and bounds[-1] <= n


def test_positive_side_on_schreier_sets():
    oracle = schreier_oracle(S1)
    for E in [(1,), (2, 3), (3, 4, 7), (5, 6, 8, 9, 12)]:
        assert member(S1, E)
        assert basis_domination_on(E, oracle).constant == 1


def test_tsirelson_upper_examples():
    two = tsirelson_upper_check(Fraction(1, 2), 2, Fraction(1, 2))
    assert two.holds and two.value <= 1
    three = tsirelson_upper_check(Fraction(1, 2), 3, Fraction(1, 4))
    assert three.holds and three.value <= Fraction(5, 6) and three.bound == Fraction(5, 6)
    assert tsirelson_upper_lengths(4, Fraction(1, 4)) == [1, 5, 25, 125]


def test_tsirelson_upper_rejects_slow_lengths():
    with pytest.raises(ValueError):
        tsirelson_upper_check(Fraction(1, 2), 2, Fraction(1, 4), lengths=[4, 4])


def test_asymptotic_l1_examples():
    blocks = [V("e3"), V("1/2e4+1/2e5"), V("e6")]
    ok, lhs, rhs = asymptotic_l1_check(blocks, Fraction(1, 2), S1)
    assert ok and lhs >= rhs
    with pytest.raises(ValueError):
        asymptotic_l1_check([V("e1"), V("e2")], Fraction(1, 2), S1)


def test_spreading_model_examples():
    assert spreading_model_constant(S1, schreier_oracle(S1), 8)[0] == 1
    assert spreading_model_constant(repeated_sum(S1, 2), l1_oracle(), 8)[0] == 1
    K, E = spreading_model_constant(repeated_sum(S1, 2), schreier_oracle(S1), 8)
    assert 1 < K <= 2 and member(repeated_sum(S1, 2), E)


def test_tsirelson_oracle_matches_its_functionals():
    oracle = tsirelson_oracle(Fraction(1, 2), S1)
    x = V("e2+2e3-e4+e5")
    fs = oracle.weighted_sets(x.support)
    assert max(sum(w * abs(x[j]) for j, w in S.items()) for S in fs) == oracle(x)


def test_oracle_budgets():
    with pytest.raises(BudgetExceeded):
        schreier_oracle(S1).weighted_sets(tuple(range(1, 30)))
    with pytest.raises(BudgetExceeded):
        spreading_model_constant(S1, l1_oracle(), 20)


def test_spot_check_catches_non_norms():
    bad = functional_oracle([{1: 1}])
    spot_check_norm(bad, [V("e1"), V("e2")])
    fake = weighted_oracle([{1: 1}])
    fake.evaluate = lambda x: x.l1_norm() ** 2
    with pytest.raises(ValueError):
        spot_check_norm(fake, [V("e1"), V("e1+e2")])


coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.dictionaries(st.integers(1, 6), coef, min_size=1, max_size=3), min_size=2, max_size=2))
def test_lattice_pairs_against_edge_oracle(entries):
    vecs = [FinVec(e) for e in entries]
    if any(v.is_zero() for v in vecs):
        return
    sets = [{j: 1} for j in range(1, 7)] + [{1: Fraction(1, 2), 2: 1, 5: Fraction(1, 3)}]
    oracle = weighted_oracle(sets)
    got = l1_domination_constant(vecs, oracle).constant
    assert got == exact_pair_min(vecs[0], vecs[1], _signed_functionals(sets))
