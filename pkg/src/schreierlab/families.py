"""Regular families of finite subsets of the positive integers.

Finite sets are sorted tuples.  A family is a small immutable expression
tree; membership, maximality, Cantor-Bendixson derivatives and the iota
index are computed from the expression.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .ordinals import (Ordinal, OMEGA, fundamental_seq, omega_pow,
                       ord_add, ord_mul, parse_ordinal)
from .streams import Stream, parse_stream

FinSet = tuple


def finset(items: Iterable[int]) -> FinSet:
    s = tuple(sorted(set(int(i) for i in items)))
    if s and s[0] < 1:
        raise ValueError("finite sets live in the positive integers")
    return s


def precedes(E: FinSet, F: FinSet) -> bool:
    """E < F, meaning max E < min F (vacuous when either is empty)."""
    return not E or not F or E[-1] < F[0]


def parse_set(text: str) -> FinSet:
    body = text.strip()
    if body.startswith("{") and body.endswith("}"):
        body = body[1:-1]
    body = body.strip()
    if not body:
        return ()
    return finset(int(t) for t in re.split(r"[,\s]+", body) if t)


def format_set(E: FinSet) -> str:
    return "{" + ",".join(map(str, E)) + "}"


# ---------------------------------------------------------------------------
# expressions

class FamilyExpr:
    def __str__(self):
        return format_family(self)


@dataclass(frozen=True)
class An(FamilyExpr):
    n: int


@dataclass(frozen=True)
class SBase(FamilyExpr):
    pass


@dataclass(frozen=True)
class Schreier(FamilyExpr):
    xi: Ordinal


@dataclass(frozen=True)
class Sum(FamilyExpr):
    first: FamilyExpr
    second: FamilyExpr


@dataclass(frozen=True)
class Product(FamilyExpr):
    outer: FamilyExpr
    inner: FamilyExpr


@dataclass(frozen=True)
class Relabel(FamilyExpr):
    base: FamilyExpr
    M: Stream


@dataclass(frozen=True)
class Tail(FamilyExpr):
    base: FamilyExpr
    m: int


def schreier(xi) -> Schreier:
    return Schreier(parse_ordinal(xi) if not isinstance(xi, Ordinal) else xi)


def repeated_sum(F: FamilyExpr, n: int) -> FamilyExpr:
    """(F, F, ..., F) with n copies."""
    if n < 1:
        raise ValueError("need at least one copy")
    out = F
    for _ in range(n - 1):
        out = Sum(F, out)
    return out


# ---------------------------------------------------------------------------
# membership

def member(F: FamilyExpr, E: Sequence[int]) -> bool:
    return _member(F, tuple(E))


@lru_cache(maxsize=1 << 20)
def _member(F: FamilyExpr, E: FinSet) -> bool:
    if not E:
        return True
    if isinstance(F, An):
        return len(E) <= F.n
    if isinstance(F, SBase):
        return len(E) <= E[0]
    if isinstance(F, Schreier):
        xi = F.xi
        if xi.is_zero():
            return len(E) <= 1
        if xi.is_successor():
            return _product_member(SBase(), Schreier(xi.predecessor()), E)
        return _member(Schreier(fundamental_seq(xi, E[0]).successor()), E)
    if isinstance(F, Sum):
        # both parts are hereditary: good prefixes and good suffixes are intervals
        n = len(E)
        lo, hi = 0, n
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if _member(F.first, E[:mid]):
                lo = mid
            else:
                hi = mid - 1
        longest_prefix = lo
        lo, hi = 0, n
        while lo < hi:
            mid = (lo + hi) // 2
            if _member(F.second, E[mid:]):
                hi = mid
            else:
                lo = mid + 1
        return lo <= longest_prefix
    if isinstance(F, Product):
        return _product_member(F.outer, F.inner, E)
    if isinstance(F, Relabel):
        pre = F.M.preimage(E)
        return pre is not None and _member(F.base, pre)
    if isinstance(F, Tail):
        return E[0] >= F.m and _member(F.base, E)
    raise TypeError(f"unknown family {F!r}")


def _longest_prefix(G: FamilyExpr, E: FinSet, start: int) -> int:
    """End index of the longest block E[start:end] lying in G."""
    end = start + 1
    while end < len(E) and _member(G, E[start:end + 1]):
        end += 1
    return end


def _product_member(F: FamilyExpr, G: FamilyExpr, E: FinSet) -> bool:
    # greedy: longest initial segments first
    mins, i = [], 0
    while i < len(E):
        if not _member(G, E[i:i + 1]):
            break
        mins.append(E[i])
        i = _longest_prefix(G, E, i)
    if i == len(E) and _member(F, tuple(mins)):
        return True
    if isinstance(F, (SBase, An)) and i == len(E):
        # greedy uses the fewest blocks, and only the count matters here
        return False
    return _product_member_exhaustive(F, G, E)


def _product_member_exhaustive(F: FamilyExpr, G: FamilyExpr, E: FinSet) -> bool:
    n = len(E)
    if isinstance(F, (SBase, An)):
        # the outer condition only sees the block count, so minimise it
        INF = n + 1
        best = [INF] * (n + 1)
        best[n] = 0
        for i in range(n - 1, -1, -1):
            for j in range(i + 1, n + 1):
                if best[j] + 1 < best[i] and _member(G, E[i:j]):
                    best[i] = best[j] + 1
        cap = E[0] if isinstance(F, SBase) else F.n
        return best[0] <= cap

    seen: set[tuple[int, tuple[int, ...]]] = set()

    def search(i: int, mins: tuple[int, ...]) -> bool:
        if i == n:
            return True
        if (i, mins) in seen:
            return False
        seen.add((i, mins))
        nm = mins + (E[i],)
        if not _member(F, nm):
            return False
        for j in range(n, i, -1):
            if _member(G, E[i:j]) and search(j, nm):
                return True
        return False

    return search(0, ())


def is_maximal(F: FamilyExpr, E: Sequence[int]) -> bool:
    E = tuple(E)
    if not _member(F, E):
        raise ValueError(f"{format_set(E)} is not in {F}")
    nxt = _next_candidate(F, E, 1)
    return not _member(F, E + (nxt,))


def _next_candidate(F: FamilyExpr, E: FinSet, k: int) -> int:
    """The single extension point probed when testing E against F^{(k)}.

    For a spreading family, adding a larger point is never harder, so a
    nonempty E is probed with max E + 1 and the empty set with a point
    large enough for the first k derivatives of the singletons.
    """
    if isinstance(F, Tail) and not E:
        return max(F.m, k)
    if E:
        return E[-1] + 1
    return max(1, k)


def in_derivative(F: FamilyExpr, E: Sequence[int], k: int) -> bool:
    """E belongs to the k-th Cantor-Bendixson derivative of F."""
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    return _in_derivative(F, tuple(E), k)


@lru_cache(maxsize=1 << 18)
def _in_derivative(F: FamilyExpr, E: FinSet, k: int) -> bool:
    if isinstance(F, Relabel):
        pre = F.M.preimage(E)
        return pre is not None and _in_derivative(F.base, pre, k)
    if k == 0:
        return _member(F, E)
    if not _in_derivative(F, E, k - 1):
        return False
    ext = E + (_next_candidate(F, E, k),)
    return _in_derivative(F, ext, k - 1)


def iota(F: FamilyExpr) -> Ordinal:
    if isinstance(F, An):
        return Ordinal.of(F.n)
    if isinstance(F, SBase):
        return OMEGA
    if isinstance(F, Schreier):
        return omega_pow(F.xi)
    if isinstance(F, Sum):
        return ord_add(iota(F.second), iota(F.first))
    if isinstance(F, Product):
        return ord_mul(iota(F.inner), iota(F.outer))
    if isinstance(F, (Relabel, Tail)):
        return iota(F.base)
    raise TypeError(f"unknown family {F!r}")


def is_admissible(F: FamilyExpr, blocks: Sequence[Sequence[int]]) -> bool:
    blocks = [tuple(b) for b in blocks]
    if not blocks or any(not b for b in blocks):
        raise ValueError("blocks must be nonempty")
    if any(not precedes(a, b) for a, b in zip(blocks, blocks[1:])):
        return False
    return _member(F, tuple(b[0] for b in blocks))


def relabel(M: Stream, E: Sequence[int]) -> FinSet:
    return tuple(M[n] for n in E)


def spreads(E: FinSet, bound: int) -> Iterator[FinSet]:
    """Every coordinatewise-larger increasing set with entries <= bound."""
    def rec(i: int, low: int, acc: tuple):
        if i == len(E):
            yield acc
            return
        for v in range(max(low, E[i]), bound - (len(E) - i - 1) + 1):
            yield from rec(i + 1, v + 1, acc + (v,))
    yield from rec(0, 1, ())


def subsets(universe: Sequence[int], max_size: int | None = None) -> Iterator[FinSet]:
    u = tuple(sorted(universe))
    top = len(u) if max_size is None else min(max_size, len(u))
    for r in range(top + 1):
        yield from combinations(u, r)


def members_within(F: FamilyExpr, universe: Sequence[int]) -> Iterator[FinSet]:
    """Members of F inside a finite universe, grown with hereditary pruning."""
    u = tuple(sorted(universe))

    def rec(start: int, acc: FinSet):
        yield acc
        for i in range(start, len(u)):
            nxt = acc + (u[i],)
            if _member(F, nxt):
                yield from rec(i + 1, nxt)
    yield from rec(0, ())


# ---------------------------------------------------------------------------
# text syntax: A(3), S, S[1], S[w^2], sum(F,G), prod(F,G), tail(F,m), relabel(F,M)

def format_family(F: FamilyExpr) -> str:
    if isinstance(F, An):
        return f"A({F.n})"
    if isinstance(F, SBase):
        return "S"
    if isinstance(F, Schreier):
        return f"S[{F.xi}]"
    if isinstance(F, Sum):
        return f"sum({format_family(F.first)},{format_family(F.second)})"
    if isinstance(F, Product):
        return f"prod({format_family(F.outer)},{format_family(F.inner)})"
    if isinstance(F, Tail):
        return f"tail({format_family(F.base)},{F.m})"
    if isinstance(F, Relabel):
        return f"relabel({format_family(F.base)},{F.M.desc})"
    raise TypeError(f"unknown family {F!r}")


def _split_top(body: str) -> list[str]:
    depth, start, out = 0, 0, []
    for i, ch in enumerate(body):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append(body[start:i])
            start = i + 1
    out.append(body[start:])
    return [a.strip() for a in out]


def parse_family(text: str) -> FamilyExpr:
    t = text.strip()
    if t == "S":
        return SBase()
    m = re.fullmatch(r"A\(\s*(\d+)\s*\)", t)
    if m:
        return An(int(m.group(1)))
    m = re.fullmatch(r"S\[(.*)\]", t)
    if m:
        return Schreier(parse_ordinal(m.group(1)))
    m = re.fullmatch(r"(\w+)\((.*)\)", t, re.S)
    if not m:
        raise ValueError(f"cannot parse family {text!r}")
    name, args = m.group(1), _split_top(m.group(2))
    if name == "sum" and len(args) >= 2:
        fams = [parse_family(a) for a in args]
        out = fams[-1]
        for f in reversed(fams[:-1]):
            out = Sum(f, out)
        return out
    if name == "prod" and len(args) == 2:
        return Product(parse_family(args[0]), parse_family(args[1]))
    if name == "rep" and len(args) == 2:
        return repeated_sum(parse_family(args[0]), int(args[1]))
    if name == "tail" and len(args) == 2:
        return Tail(parse_family(args[0]), int(args[1]))
    if name == "relabel" and len(args) == 2:
        return Relabel(parse_family(args[0]), parse_stream(args[1]))
    raise ValueError(f"cannot parse family {text!r}")
