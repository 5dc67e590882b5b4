import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from schreierlab.families import member, schreier
from schreierlab.ordinals import parse_ordinal
from schreierlab.trees import (
    Case1, Case2, FinTree, MinTree, TreeColoring, TreeError, approx_monochromatic, chain,
    check_extended_map, coloring_sums, derive, easy_coloring_search, enumerate_btrees, full_tree,
    incomparable_union, is_monochromatic, is_order_preserving, order_embed, stack, tree_order,
)

P = parse_ordinal
SMALL_TREES = list(enumerate_btrees(7))


def test_order_examples():
    assert tree_order(FinTree()) == 0
    assert tree_order(FinTree([("a",), ("a", "b")])) == 2
    assert tree_order(full_tree(3)) == 3


def test_order_counts_derivations():
    # iterate the derivative by hand and count
    for T in SMALL_TREES[:200]:
        steps, cur = 0, T
        while len(cur):
            inner = {n[:-1] for n in cur.nodes}
            cur = FinTree(n for n in cur.nodes if n in inner)
            steps += 1
        assert steps == tree_order(T)


def test_derive_examples():
    assert derive(chain(3), 1) == chain(2)
    T = full_tree(3)
    assert len(derive(T, tree_order(T))) == 0
    two = incomparable_union([chain(2), chain(3)])
    assert tree_order(derive(two, 2)) == 1 and len(derive(two, 2)) == 1


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(list(enumerate_btrees(9))))
def test_derive_drops_order_by_one(T):
    assert tree_order(derive(T, 1)) == max(tree_order(T) - 1, 0)


def test_stack_examples():
    bottom = chain(2)
    tops = {m: chain(3, start=10) for m in bottom.maximal()}
    assert tree_order(stack(bottom, tops)) == 5
    assert stack(bottom, {m: FinTree() for m in bottom.maximal()}) == bottom
    two = stack(chain(1), {(1,): chain(1, start=2)})
    assert two == chain(2)
    with pytest.raises(TreeError):
        stack(chain(1), {(1,): chain(1)})


def test_incomparable_union_examples():
    assert tree_order(incomparable_union([chain(1), chain(4)])) == 4
    assert len(incomparable_union([])) == 0
    assert tree_order(incomparable_union([chain(2), chain(2)])) == 2


def test_missing_prefix_is_rejected():
    with pytest.raises(TreeError):
        FinTree([(1, 2)])


def test_embed_examples():
    f = order_embed(2, chain(3))
    assert f is not None and is_order_preserving(f)
    assert order_embed(4, chain(3)) is None
    g = order_embed(3, full_tree(3))
    assert g is not None and is_order_preserving(g)
    assert sorted(g.values(), key=len) == [(0,), (0, 0), (0, 0, 0)]


def test_embed_iff_order_on_sweep():
    for T in SMALL_TREES:
        o = tree_order(T)
        for xi in range(o + 2):
            f = order_embed(xi, T)
            assert (f is not None) == (xi <= o)
            if f is not None:
                assert is_order_preserving(f) and all(v in T for v in f.values())


def _best_lengths(T, coloring):
    """Longest monochromatic chain map per color, by scanning every maximal node."""
    best = [0, 0]
    for s in T.maximal():
        for j in (0, 1):
            best[j] = max(best[j], sum(s in coloring.classes[s[:k]][j] for k in range(1, len(s) + 1)))
    return best


def test_coloring_examples():
    c3 = chain(3)
    split = coloring_sums(c3, TreeColoring.from_leaf_colors(c3, {(1, 2, 3): 0}))
    assert split.lengths == (3, 0)
    assert split.maps[0].i == {(3,): (1,), (3, 2): (1, 2), (3, 2, 1): (1, 2, 3)}
    assert split.maps[0].e == {(3, 2, 1): (1, 2, 3)}
    assert split.maps[1].i == {} and split.maps[1].e == {}

    c2 = chain(2)
    col = TreeColoring.from_node_colors(c2, {(1,): 0, (1, 2): 1})
    assert coloring_sums(c2, col).lengths == (1, 1)

    b2 = full_tree(2)
    parity = TreeColoring.from_leaf_colors(b2, {s: s[-1] % 2 for s in b2.maximal()})
    split = coloring_sums(b2, parity)
    assert sum(split.lengths) == 2
    for j in (0, 1):
        assert check_extended_map(b2, split.maps[j])
        assert is_monochromatic(parity, split.maps[j], j)


def test_coloring_against_brute_force():
    for T in SMALL_TREES:
        leaves = T.maximal()
        if len(leaves) > 4:
            continue
        for bits in itertools.product((0, 1), repeat=len(leaves)):
            col = TreeColoring.from_leaf_colors(T, dict(zip(leaves, bits)))
            split = coloring_sums(T, col)
            best = _best_lengths(T, col)
            assert sum(split.lengths) == tree_order(T)
            assert split.lengths[0] <= best[0] and split.lengths[1] <= best[1]
            for j in (0, 1):
                assert check_extended_map(T, split.maps[j])
                assert is_monochromatic(col, split.maps[j], j)


def test_incomplete_coloring_is_rejected():
    c2 = chain(2)
    bad = TreeColoring({(1,): (frozenset(), frozenset()), (1, 2): (frozenset({(1, 2)}), frozenset())})
    with pytest.raises(TreeError):
        coloring_sums(c2, bad)


def test_approx_constant_gives_full_height():
    T = full_tree(3)
    res = approx_monochromatic(T, {t: Fraction(7, 3) for t in T.nodes}, Fraction(1, 10))
    assert res.length == 3 and res.theta == Fraction(7, 3)


def test_approx_single_band():
    T = chain(4)
    f = {t: (Fraction(1) if len(t) % 2 else Fraction(105, 100)) for t in T.nodes}
    res = approx_monochromatic(T, f, Fraction(1, 10))
    assert res.length == 4 and res.theta == 1


def test_approx_two_bands():
    T = chain(6)
    f = {t: Fraction(1 + len(t) % 2) for t in T.nodes}
    res = approx_monochromatic(T, f, Fraction(1, 2))
    assert res.length >= 3
    vals = [f[v] for v in res.i.values()]
    assert max(vals) <= (1 + Fraction(1, 2)) * res.theta and min(vals) >= res.theta


def test_min_tree_children():
    assert list(MinTree(3).children()) == [P(3)]
    assert list(MinTree(3).children([P(3), P(2)])) == [P(1)]
    kids = MinTree("w").children()
    assert list(itertools.islice(kids, 4)) == [P(1), P(2), P(3), P(4)]


def test_min_tree_residual_orders():
    assert MinTree("w").residual_order([P(3)]) == P(2)
    assert MinTree(3).residual_order([P(3), P(2), P(1)]) == P(0)
    assert MinTree("w^2").residual_order([P("w+1")]) == P("w")
    assert not MinTree("w").is_node([P("w")])


@pytest.mark.parametrize("xi", ["w", "w^2", "w^w"])
def test_root_children_climb_to_the_limit(xi):
    T = MinTree(xi)
    orders = [T.residual_order([c]).successor() for c in itertools.islice(T.children(), 6)]
    assert all(a < b for a, b in zip(orders, orders[1:]))
    assert all(o < P(xi) for o in orders)


def test_min_tree_finite_part_has_the_right_height():
    assert tree_order(MinTree(4).finite_part(3, 10)) == 4
    assert tree_order(MinTree("w").finite_part(5, 10)) == 5


def test_easy_coloring_all_ones():
    res = easy_coloring_search(0, lambda E: 1, 20)
    assert isinstance(res, Case1) and res.M == list(range(1, 21))


def test_easy_coloring_all_zeros():
    res = easy_coloring_search(0, lambda E: 0, 20)
    assert isinstance(res, Case2)
    assert all(a[-1] < b[0] for a, b in zip(res.blocks, res.blocks[1:]))
    assert all(len(b) <= res.n for b in res.blocks)
    # every S_1 selection of blocks has its union in S_1
    for r in range(1, 5):
        for E in itertools.combinations(range(1, len(res.blocks) + 1), r):
            if member(schreier(1), E):
                union = tuple(x for i in E for x in res.blocks[i - 1])
                assert member(schreier(1), union)


def test_easy_coloring_diagonal_starts_above_three():
    res = easy_coloring_search(0, lambda E: int(bool(E) and min(E) >= 3), 30)
    assert isinstance(res, Case1) and min(res.M) >= 3
