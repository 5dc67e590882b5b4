import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from schreierlab.families import (
    An, Product, Sum, in_derivative, iota, is_admissible, is_maximal, member, members_within,
    parse_family, relabel, repeated_sum, schreier, spreads,
)
from schreierlab.ordinals import fundamental_seq, parse_ordinal
from schreierlab.streams import fast_growing, identity, parse_stream, power
from schreierlab.suites import brute_schreier, explicit_chain_length

S1, S2 = schreier(1), schreier(2)


@pytest.mark.parametrize("F, E, want", [
    (S1, (2, 3), True), (S1, (1, 2), False), (S2, (2, 3, 4, 6, 7), True),
    (S1, (), True), (An(3), (4, 9, 12), True), (An(3), (1, 2, 3, 4), False),
])
def test_member_examples(F, E, want):
    assert member(F, E) is want


def test_maximal_examples():
    assert is_maximal(S1, (2, 3))
    assert not is_maximal(An(3), (1, 2))
    # {1,2} is not itself in S_2, so the question is out of domain
    assert not member(S2, (1, 2))
    with pytest.raises(ValueError):
        is_maximal(S2, (1, 2))


def test_derivative_examples():
    assert in_derivative(An(2), (), 2)
    assert not in_derivative(An(2), (), 3)
    assert in_derivative(S1, (3,), 2)
    assert not in_derivative(An(1), (5,), 1)


@pytest.mark.parametrize("F, want", [
    (An(3), "3"), (S2, "w^2"), (Sum(An(2), S1), "w+2"), (Product(An(2), An(3)), "6"),
    (repeated_sum(S1, 3), "w*3"),
])
def test_iota_examples(F, want):
    assert iota(F) == parse_ordinal(want)


def test_admissible_examples():
    assert is_admissible(S1, [(2, 3), (5,)])
    assert not is_admissible(S1, [(1,), (2,)])
    assert not is_admissible(An(2), [(1,), (4, 7), (9,)])
    assert not is_admissible(S1, [(4, 7), (5,)])


def test_relabel_examples():
    assert relabel(parse_stream("evens"), (1, 3)) == (2, 6)
    assert relabel(identity(), (4, 5, 9)) == (4, 5, 9)
    assert relabel(power(2), (2, 3)) == (4, 9)


def test_fast_growing_examples():
    assert fast_growing(identity(), Fraction(1, 2), identity()).prefix(4) == [1, 5, 21, 85]
    assert fast_growing(parse_stream("evens"), Fraction(1), identity()).prefix(3) == [1, 7, 43]


@pytest.mark.parametrize("xi", ["1", "2", "w"])
def test_member_matches_definition_on_small_universe(xi):
    universe = 9
    brute = brute_schreier(xi, universe)
    F = schreier(xi)
    for r in range(universe + 1):
        for E in itertools.combinations(range(1, universe + 1), r):
            assert member(F, E) == (E in brute), E


def test_members_within_lists_exactly_the_members():
    got = set(members_within(S2, range(1, 9)))
    assert got == set(brute_schreier("2", 8))


FAMILIES = [S1, S2, schreier("w"), schreier("w+1"), Sum(An(2), S1), Product(An(2), S1), An(4)]
finsets = st.sets(st.integers(1, 14), max_size=8).map(lambda s: tuple(sorted(s)))


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(FAMILIES), finsets)
def test_hereditary(F, E):
    if member(F, E):
        for r in range(len(E)):
            for sub in itertools.combinations(E, r):
                assert member(F, sub)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(FAMILIES), finsets)
def test_spreading(F, E):
    if member(F, E) and E:
        for G in itertools.islice(spreads(E, E[-1] + 3), 40):
            assert member(F, G)


@pytest.mark.parametrize("text", ["A(3)", "S", "S[w+1]", "sum(A(2),S[1])", "prod(A(2),A(3))",
                                  "tail(S[1],3)", "relabel(S[1],evens)"])
def test_parse_format_round_trip(text):
    assert str(parse_family(text)) == text


def test_rep_is_repeated_sum():
    assert parse_family("rep(S[1],3)") == repeated_sum(S1, 3)


@pytest.mark.parametrize("F", [An(4), Sum(An(2), An(3)), Product(An(2), An(2)), Sum(An(1), An(1))])
def test_iota_matches_explicit_chain(F):
    k = int(iota(F))
    assert explicit_chain_length(F, k) == k


@pytest.mark.parametrize("lam", ["w", "w^2"])
def test_ladder_step_is_contained_in_the_next(lam):
    lam = parse_ordinal(lam)
    cache: dict = {}
    for n in range(1, 3):
        lower = brute_schreier(fundamental_seq(lam, n).successor(), 8, cache)
        upper = brute_schreier(fundamental_seq(lam, n + 1), 8, cache)
        assert lower <= upper
