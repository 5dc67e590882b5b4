"""Finite B-trees, the symbolic minimal trees T_xi and coloring constructions.

A B-tree is a finite set of nonempty label tuples closed under taking
nonempty prefixes.  The empty tuple plays the role of the (implicit) root.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import count
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .families import (FamilyExpr, Schreier, An, member, members_within,
                       relabel)
from .ordinals import Ordinal, ONE, fundamental_seq, omega_pow, parse_ordinal
from .streams import affine, identity

Node = tuple


class TreeError(ValueError):
    pass


class FinTree:
    __slots__ = ("nodes",)

    def __init__(self, nodes: Iterable[Sequence[Hashable]] = ()):
        nodes = frozenset(tuple(n) for n in nodes)
        for n in nodes:
            if not n:
                raise TreeError("the empty sequence is implicit and cannot be a node")
            if len(n) > 1 and n[:-1] not in nodes:
                raise TreeError(f"prefix {n[:-1]!r} of {n!r} is missing")
        self.nodes = nodes

    def __eq__(self, other):
        return isinstance(other, FinTree) and self.nodes == other.nodes

    def __hash__(self):
        return hash(self.nodes)

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, t):
        return tuple(t) in self.nodes

    def __repr__(self):
        return f"FinTree({sorted(self.nodes, key=_sort_key)!r})"

    def labels(self) -> set:
        return {x for n in self.nodes for x in n}

    def children(self, t: Node = ()) -> list[Node]:
        t = tuple(t)
        kids = [n for n in self.nodes if len(n) == len(t) + 1 and n[:len(t)] == t]
        return sorted(kids, key=_sort_key)

    def maximal(self) -> list[Node]:
        inner = {n[:-1] for n in self.nodes}
        return sorted((n for n in self.nodes if n not in inner), key=_sort_key)

    def leaves_above(self, t: Node) -> frozenset:
        t = tuple(t)
        return frozenset(s for s in self.maximal() if s[:len(t)] == t)

    def subtree(self, t: Node) -> "FinTree":
        """T(t): nodes strictly extending t, with the prefix t removed."""
        t = tuple(t)
        return FinTree(n[len(t):] for n in self.nodes if len(n) > len(t) and n[:len(t)] == t)


def _sort_key(node):
    return tuple((type(x).__name__, repr(x) if not isinstance(x, (int, float, Fraction)) else x)
                 for x in node)


def chain(n: int, start: int = 1) -> FinTree:
    labels = list(range(start, start + n))
    return FinTree(tuple(labels[:k]) for k in range(1, n + 1))


def full_tree(depth: int, arity: int = 2) -> FinTree:
    nodes, layer = [], [()]
    for _ in range(depth):
        layer = [t + (a,) for t in layer for a in range(arity)]
        nodes.extend(layer)
    return FinTree(nodes)


def tree_order(T: FinTree) -> int:
    """o(T); for a finite B-tree this is the length of its longest node."""
    return max((len(n) for n in T.nodes), default=0)


def derive(T: FinTree, k: int = 1) -> FinTree:
    nodes = set(T.nodes)
    for _ in range(k):
        if not nodes:
            break
        inner = {n[:-1] for n in nodes}
        nodes = {n for n in nodes if n in inner}
    return FinTree(nodes)


def stack(bottom: FinTree, tops: Mapping[Node, FinTree]) -> FinTree:
    """Place tops[t] above each maximal node t of bottom."""
    maxes = set(bottom.maximal())
    extra = set(map(tuple, tops)) - maxes
    if extra:
        raise TreeError(f"tops attached to non-maximal nodes {sorted(extra, key=_sort_key)}")
    base_labels = bottom.labels()
    nodes = set(bottom.nodes)
    for t, top in tops.items():
        if top.labels() & base_labels:
            raise TreeError("label collision between bottom and top trees")
        nodes.update(tuple(t) + s for s in top.nodes)
    out = FinTree(nodes)
    orders = {tree_order(tp) for t, tp in tops.items()}
    if len(tops) == len(maxes) and len(orders) == 1 and maxes:
        want = orders.pop() + max(len(t) for t in maxes)
        assert tree_order(out) == want
    return out


def incomparable_union(parts: Sequence[FinTree]) -> FinTree:
    """Disjoint union with labels tagged by part index."""
    nodes = []
    for i, T in enumerate(parts):
        nodes.extend(tuple((i, x) for x in n) for n in T.nodes)
    out = FinTree(nodes)
    assert tree_order(out) == max((tree_order(T) for T in parts), default=0)
    return out


def is_prefix(s: Node, t: Node) -> bool:
    return len(s) <= len(t) and t[:len(s)] == s


def is_order_preserving(mapping: Mapping[Node, Node]) -> bool:
    """s strictly below t implies f(s) strictly below f(t)."""
    items = list(mapping.items())
    for s, fs in items:
        for t, ft in items:
            if len(s) < len(t) and is_prefix(s, t):
                if not (len(fs) < len(ft) and is_prefix(fs, ft)):
                    return False
    return True


def chain_nodes(n: int) -> list[Node]:
    """Nodes of the minimal tree T_n for finite n: the chain (n), (n, n-1), ..."""
    return [tuple(range(n, n - k, -1)) for k in range(1, n + 1)]


def _leftmost_branch(T: FinTree, length: int) -> list[Node] | None:
    """Leftmost root-to-node path of the given length (smallest labels first)."""
    if length == 0:
        return []

    def rec(t: Node) -> list[Node] | None:
        if len(t) == length:
            return [t]
        for c in T.children(t):
            r = rec(c)
            if r is not None:
                return ([t] if t else []) + r
        return None
    path = rec(())
    return path


def order_embed(xi: int, T: FinTree) -> dict[Node, Node] | None:
    """Order preserving map of the chain T_xi into T, or None if o(T) < xi."""
    if xi < 0:
        raise TreeError("order must be nonnegative")
    if xi > tree_order(T):
        return None
    path = _leftmost_branch(T, xi)
    return dict(zip(chain_nodes(xi), path))


# ---------------------------------------------------------------------------
# colorings

@dataclass
class TreeColoring:
    """For each node t a pair (C0_t, C1_t) covering the maximal nodes above t."""
    classes: dict[Node, tuple[frozenset, frozenset]]

    @classmethod
    def from_leaf_colors(cls, T: FinTree, color: Mapping[Node, int]) -> "TreeColoring":
        out = {}
        for t in T.nodes:
            E = T.leaves_above(t)
            out[t] = (frozenset(s for s in E if color[s] == 0),
                      frozenset(s for s in E if color[s] == 1))
        return cls(out)

    @classmethod
    def from_node_colors(cls, T: FinTree, color: Mapping[Node, int]) -> "TreeColoring":
        """Each node paints every maximal node above it with its own color."""
        out = {}
        for t in T.nodes:
            E = T.leaves_above(t)
            out[t] = (E, frozenset()) if color[t] == 0 else (frozenset(), E)
        return cls(out)

    def validate(self, T: FinTree) -> None:
        if set(self.classes) != set(T.nodes):
            raise TreeError("coloring must assign a pair to every node")
        for t, (c0, c1) in self.classes.items():
            if c0 | c1 != T.leaves_above(t):
                raise TreeError(f"coloring at {t!r} does not cover the maximal nodes above it")


@dataclass
class ExtendedMap:
    """Extended order preserving map (i, e) from the chain T_length into a tree."""
    length: int
    i: dict[Node, Node] = field(default_factory=dict)
    e: dict[Node, Node] = field(default_factory=dict)


def check_extended_map(T: FinTree, em: ExtendedMap) -> bool:
    src = chain_nodes(em.length)
    if set(em.i) != set(src):
        return False
    if any(v not in T for v in em.i.values()):
        return False
    if not is_order_preserving(em.i):
        return False
    tops = [t for t in src if len(t) == em.length]
    maxes = set(T.maximal())
    if set(em.e) != set(tops):
        return False
    return all(em.e[t] in maxes and is_prefix(em.i[t], em.e[t]) for t in tops)


def is_monochromatic(coloring: TreeColoring, em: ExtendedMap, j: int) -> bool:
    """Every maximal s of the source has e(s) in C^j at i(s|k) for all k."""
    for s, target in em.e.items():
        for k in range(1, len(s) + 1):
            if target not in coloring.classes[em.i[s[:k]]][j]:
                return False
    return True


def _split_chain(colors: list[tuple[bool, bool]]) -> tuple[list[int], list[int]]:
    """Induction on the chain length: root first, rest recursively.

    ``colors[k]`` records whether the chain's leaf lies in C0 / C1 at depth k.
    Returns the depths used by the 0-map and the 1-map.
    """
    if not colors:
        return [], []
    # successor step: the root's pair covers the single leaf, pick its class
    in0, in1 = colors[0]
    rest0, rest1 = _split_chain(colors[1:])
    rest0 = [d + 1 for d in rest0]
    rest1 = [d + 1 for d in rest1]
    if in0:
        return [0] + rest0, rest1
    if in1:
        return rest0, [0] + rest1
    raise TreeError("coloring leaves a maximal node uncolored")


@dataclass
class ColoringSplit:
    maps: tuple[ExtendedMap, ExtendedMap]

    @property
    def lengths(self) -> tuple[int, int]:
        return self.maps[0].length, self.maps[1].length


def coloring_sums(T: FinTree, coloring: TreeColoring) -> ColoringSplit:
    """Monochromatic 0- and 1-maps from chains whose lengths add to o(T)."""
    coloring.validate(T)
    n = tree_order(T)
    if n == 0:
        return ColoringSplit((ExtendedMap(0), ExtendedMap(0)))
    embed = order_embed(n, T)
    branch = [embed[c] for c in chain_nodes(n)]
    leaf = branch[-1]
    colors = [(leaf in coloring.classes[b][0], leaf in coloring.classes[b][1]) for b in branch]
    depths = _split_chain(colors)
    maps = []
    for ds in depths:
        src = chain_nodes(len(ds))
        i = {s: branch[d] for s, d in zip(src, ds)}
        e = {src[-1]: leaf} if src else {}
        maps.append(ExtendedMap(len(ds), i, e))
    out = ColoringSplit((maps[0], maps[1]))
    for j in (0, 1):
        assert check_extended_map(T, out.maps[j]) and is_monochromatic(coloring, out.maps[j], j)
    assert sum(out.lengths) == n
    return out


def _band(value: Fraction, a: Fraction, ratio: Fraction) -> int:
    j, hi = 1, a * ratio
    while value >= hi:
        j += 1
        hi *= ratio
    return j


@dataclass
class ApproxResult:
    theta: Fraction
    bands: int
    length: int
    i: dict[Node, Node]


def approx_monochromatic(T: FinTree, f: Mapping[Node, Fraction], delta: Fraction,
                         a: Fraction | None = None, b: Fraction | None = None) -> ApproxResult:
    """Chain on which f stays inside one band [theta, (1+delta) theta]."""
    delta = Fraction(delta)
    vals = {t: Fraction(f[t]) for t in T.nodes}
    if a is None:
        a = min(vals.values(), default=Fraction(1))
    if b is None:
        b = max(vals.values(), default=a)
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or delta <= 0:
        raise TreeError("need a > 0 and delta > 0")
    if any(v < a or v > b for v in vals.values()):
        raise TreeError("f leaves [a, b]")
    ratio = 1 + delta
    r = _band(b, a, ratio)
    band = {t: _band(v, a, ratio) for t, v in vals.items()}
    best = None
    for j in range(1, r + 1):
        coloring = TreeColoring.from_node_colors(T, {t: 0 if band[t] == j else 1 for t in T.nodes})
        em = coloring_sums(T, coloring).maps[0]
        if best is None or em.length > best[1].length:
            best = (j, em)
    j, em = best
    theta = a * ratio ** (j - 1)
    assert em.length >= -(-tree_order(T) // r)
    assert all(theta <= vals[v] <= ratio * theta for v in em.i.values())
    return ApproxResult(theta, r, em.length, em.i)


# ---------------------------------------------------------------------------
# enumeration of B-tree shapes up to relabeling

@lru_cache(maxsize=None)
def _rooted_trees(n: int) -> tuple:
    """Canonical rooted trees with n nodes, as sorted tuples of child subtrees."""
    return tuple(sorted(_forests(n - 1)))


@lru_cache(maxsize=None)
def _forests(n: int, max_tree=None) -> tuple:
    """Canonical forests with n nodes (nonincreasing tuples of rooted trees)."""
    if n == 0:
        return ((),)
    out = []
    for size in range(n, 0, -1):
        for t in _rooted_trees(size):
            key = (size, t)
            if max_tree is not None and key > max_tree:
                continue
            for rest in _forests(n - size, key):
                out.append(((size, t),) + rest)
    return tuple(out)


def _forest_to_nodes(forest, prefix=()) -> list[Node]:
    out = []
    for idx, (_, kids) in enumerate(forest):
        node = prefix + (idx,)
        out.append(node)
        out.extend(_forest_to_nodes(kids, node))
    return out


def enumerate_btrees(max_nodes: int) -> Iterator[FinTree]:
    """Every nonempty B-tree shape with at most max_nodes nodes, once each."""
    for n in range(1, max_nodes + 1):
        for forest in _forests(n):
            yield FinTree(_forest_to_nodes(forest))


# ---------------------------------------------------------------------------
# symbolic minimal trees

class MinTree:
    """T_xi as a lazily unfolded tree of strictly decreasing ordinal labels.

    A node whose last label is z+1 sits above a copy of T_z.  Below a limit
    residual l the children are 1, l[1]+1, l[2]+1, ...
    """

    def __init__(self, xi):
        self.xi = parse_ordinal(xi) if not isinstance(xi, Ordinal) else xi

    def __repr__(self):
        return f"MinTree({self.xi})"

    @staticmethod
    def _children_of_residual(rho: Ordinal) -> Iterator[Ordinal]:
        if rho.is_zero():
            return
        if rho.is_successor():
            yield rho
            return
        yield ONE
        for n in count(1):
            yield fundamental_seq(rho, n).successor()

    def _residual_after(self, t: Sequence[Ordinal]) -> Ordinal:
        rho = self.xi
        for lab in t:
            lab = parse_ordinal(lab) if not isinstance(lab, Ordinal) else lab
            if not self._is_child(rho, lab):
                raise TreeError(f"{[str(x) for x in t]} is not a node of T_{self.xi}")
            rho = lab.predecessor()
        return rho

    def _is_child(self, rho: Ordinal, lab: Ordinal) -> bool:
        if rho.is_zero() or not lab.is_successor():
            return False
        if rho.is_successor():
            return lab == rho
        if lab == ONE:
            return True
        for n in count(1):
            c = fundamental_seq(rho, n).successor()
            if c == lab:
                return True
            if lab < c:
                return False

    def is_node(self, t: Sequence[Ordinal]) -> bool:
        try:
            self._residual_after(t)
        except TreeError:
            return False
        return len(t) > 0

    def children(self, t: Sequence[Ordinal] = ()) -> Iterator[Ordinal]:
        return self._children_of_residual(self._residual_after(t))

    def residual_order(self, t: Sequence[Ordinal] = ()) -> Ordinal:
        """o(T_xi(t)); the root's residual is xi itself."""
        return self._residual_after(t)

    def finite_part(self, width: int, depth: int) -> FinTree:
        """Finite subtree: at most ``width`` children per node, depth-bounded."""
        nodes = []

        def rec(t: tuple):
            if len(t) >= depth:
                return
            for k, c in enumerate(self.children(t)):
                if k >= width:
                    break
                nodes.append(t + (c,))
                rec(t + (c,))
        rec(())
        return FinTree(nodes)


# ---------------------------------------------------------------------------
# budgeted two-case search for colorings of Schreier sets

@dataclass
class Case1:
    M: list[int]
    tested: int
    exhaustive: bool


@dataclass
class Case2:
    blocks: list[tuple[int, ...]]
    n: int
    tested: int
    exhaustive: bool


@dataclass
class Undecided:
    reason: str


def _ladder_family(xi: Ordinal, n: int) -> FamilyExpr:
    """zeta_n: A_n when xi = 0, otherwise S_{(w^xi)[n]+1}."""
    if xi.is_zero():
        return An(n)
    return Schreier(fundamental_seq(omega_pow(xi), n).successor())


def easy_coloring_search(xi, f: Callable[[tuple], int], budget: int,
                         probe_limit: int = 20000):
    """Run the two-case construction for f on sets drawn from {1..budget}."""
    xi = parse_ordinal(xi) if not isinstance(xi, Ordinal) else xi
    target = Schreier(omega_pow(xi))

    # Case 1: greedy diagonal; keep a candidate m when every tested image is 1
    M: list[int] = []
    known: list[tuple] = [()]
    tested, exhaustive = 0, True
    for cand in range(1, budget + 1):
        k = len(M) + 1
        trial = M + [cand]
        fresh = []
        ok = True
        for E in known:
            if tested >= probe_limit:
                exhaustive = False
                break
            F = E + (k,)
            if not member(target, F):
                continue
            tested += 1
            if f(tuple(trial[i - 1] for i in F)) != 1:
                ok = False
                break
            fresh.append(F)
        if ok:
            M = trial
            if len(known) < probe_limit:
                known.extend(fresh)
    if len(M) >= -(-budget // 2):
        return Case1(M, tested, exhaustive)

    # Case 2: successive blocks from zeta_n with f = 0 whose unions stay in S_{w^xi}
    for n in range(1, budget + 1):
        zeta = _ladder_family(xi, n)
        for L in (identity(), affine(n, 0)):
            blocks = _zero_blocks(zeta, f, n, L, budget, probe_limit)
            if len(blocks) < 2:
                continue
            ok, checks, full = _unions_stay(target, blocks, probe_limit)
            if ok:
                return Case2(blocks, n, checks, full)
    return Undecided(f"no case settled within budget {budget}")


def _zero_blocks(zeta: FamilyExpr, f, n: int, L, budget: int, probe_limit: int) -> list[tuple]:
    blocks: list[tuple] = []
    start = n
    probes = 0
    while True:
        found = None
        # candidate index sets F >= start with min F >= n, smallest max first
        for top in range(start, budget + 1):
            if L[top] > budget:
                break
            for F in members_within(zeta, range(start, top)):
                probes += 1
                if probes > probe_limit:
                    return blocks
                F = F + (top,)
                if min(F) < n or not member(zeta, F):
                    continue
                E = relabel(L, F)
                if f(E) == 0:
                    found = E
                    break
            if found:
                break
        if not found:
            return blocks
        blocks.append(found)
        start = L.first_index_at_least(found[-1] + 1)


def _unions_stay(target: FamilyExpr, blocks: list[tuple], probe_limit: int):
    checks = 0
    for E in members_within(target, range(1, len(blocks) + 1)):
        if not E:
            continue
        checks += 1
        if checks > probe_limit:
            return True, checks, False
        union = tuple(x for i in E for x in blocks[i - 1])
        if not member(target, union):
            return False, checks, True
    return True, checks, True
