"""Exact and certified norms on finitely supported rational vectors.

Covers l_p, Schreier (sup of l_1 mass over a family), Tsirelson-type
implicit norms T(theta, F), the Schlumprecht norm and the Mazur map.
Everything is exact rational arithmetic except the irrational Schlumprecht
weights and p-th roots, which are enclosed in rational intervals obtained
from directed-rounding interval arithmetic.
"""
from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from mpmath import iv
from mpmath.libmp import to_man_exp

from .families import (An, FamilyExpr, SBase, Schreier, member, format_set)
from .ordinals import ONE
from .streams import BudgetExceeded, Stream

SCHREIER_EXHAUSTIVE_LIMIT = 18
GENERIC_DP_LIMIT = 14
FAST_DP_LIMIT = 400
SCHLUMPRECHT_LIMIT = 40


def default_precision() -> int:
    return int(os.environ.get("SCHREIERLAB_PRECISION", "40"))


# ---------------------------------------------------------------------------
# vectors

class FinVec:
    """Finitely supported vector {index: Fraction} without stored zeros."""
    __slots__ = ("entries",)

    def __init__(self, entries: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        out: dict[int, Fraction] = {}
        for k, v in items:
            k = int(k)
            if k < 1:
                raise ValueError("indices are positive integers")
            v = Fraction(v)
            if v:
                out[k] = out.get(k, Fraction(0)) + v
                if not out[k]:
                    del out[k]
        self.entries = dict(sorted(out.items()))

    @classmethod
    def basis(cls, n: int, coeff=1) -> "FinVec":
        return cls({n: coeff})

    @classmethod
    def ones(cls, indices: Iterable[int], coeff=1) -> "FinVec":
        return cls({i: coeff for i in indices})

    def __repr__(self):
        return f"FinVec({format_vector(self)})"

    def __eq__(self, other):
        return isinstance(other, FinVec) and self.entries == other.entries

    def __hash__(self):
        return hash(tuple(self.entries.items()))

    def __getitem__(self, i: int) -> Fraction:
        return self.entries.get(i, Fraction(0))

    def __add__(self, other: "FinVec") -> "FinVec":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, Fraction(0)) + v
        return FinVec(out)

    def __sub__(self, other: "FinVec") -> "FinVec":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "FinVec":
        c = Fraction(c)
        return FinVec({k: c * v for k, v in self.entries.items()})

    def abs(self) -> "FinVec":
        return FinVec({k: abs(v) for k, v in self.entries.items()})

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.entries)

    def values(self) -> list[Fraction]:
        return list(self.entries.values())

    def sup_norm(self) -> Fraction:
        return max((abs(v) for v in self.entries.values()), default=Fraction(0))

    def l1_norm(self) -> Fraction:
        return sum((abs(v) for v in self.entries.values()), Fraction(0))

    def is_zero(self) -> bool:
        return not self.entries


def restrict(x: FinVec, E: Iterable[int]) -> FinVec:
    E = set(E)
    return FinVec({k: v for k, v in x.entries.items() if k in E})


def relabel_vector(M: Stream, x: FinVec) -> FinVec:
    """Push e_n to e_{m_n}."""
    return FinVec({M[k]: v for k, v in x.entries.items()})


_TERM = re.compile(r"([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?e(\d+)")


def parse_vector(text: str) -> FinVec:
    """``e3+e4``, ``3/4*e1 - 2e5`` or ``{1: 3/4, 5: -2}``."""
    t = text.strip()
    if t.startswith("{"):
        body = t[1:-1].strip()
        out = {}
        for part in filter(None, (p.strip() for p in body.split(","))):
            k, v = part.split(":")
            out[int(k.strip().strip('"'))] = Fraction(v.strip().strip('"'))
        return FinVec(out)
    t = t.replace(" ", "")
    pos, out = 0, {}
    while pos < len(t):
        m = _TERM.match(t, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse vector near {t[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        k = int(m.group(3))
        out[k] = out.get(k, Fraction(0)) + sign * coeff
        pos = m.end()
    return FinVec(out)


def format_vector(x: FinVec) -> str:
    if x.is_zero():
        return "0"
    parts = []
    for k, v in x.entries.items():
        sign = "-" if v < 0 else "+"
        a = abs(v)
        parts.append(f"{sign}e{k}" if a == 1 else f"{sign}{a}*e{k}")
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


def vector_to_json(x: FinVec) -> dict:
    return {"entries": {str(k): str(v) for k, v in x.entries.items()}}


def vector_from_json(obj: Mapping) -> FinVec:
    return FinVec({int(k): Fraction(v) for k, v in obj["entries"].items()})


# ---------------------------------------------------------------------------
# interval helpers

def _raw_to_fraction(raw) -> Fraction:
    man, exp = to_man_exp(raw)
    man = int(man)
    return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** (-exp))


def _iv_bounds(v) -> tuple[Fraction, Fraction]:
    lo, hi = v._mpi_
    return _raw_to_fraction(lo), _raw_to_fraction(hi)


def _iv_rational(q: Fraction):
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi


def _with_precision(bits: int, fn):
    old = iv.prec
    iv.prec = bits
    try:
        return fn()
    finally:
        iv.prec = old


def _root_interval(base: Fraction, p: Fraction, precision: int) -> Interval:
    """Enclosure of base**(1/p) of width <= 2**-precision."""
    if base == 0:
        return Interval(Fraction(0), Fraction(0))
    bits = precision + 32 + max(0, base.numerator.bit_length() - base.denominator.bit_length())
    while True:
        lo, hi = _with_precision(bits, lambda: _iv_bounds(
            _iv_rational(base) ** (iv.mpf(p.denominator) / iv.mpf(p.numerator))))
        if hi - lo <= Fraction(1, 2 ** precision):
            return Interval(lo, hi)
        bits += 32


# ---------------------------------------------------------------------------
# l_p

@dataclass
class LpValue:
    p: object
    exact: Fraction | None
    power: Fraction | None
    interval: Interval


def lp_norm(x: FinVec, p, precision: int | None = None) -> LpValue:
    precision = default_precision() if precision is None else precision
    if p in ("inf", "oo", float("inf")):
        v = x.sup_norm()
        return LpValue("inf", v, None, Interval(v, v))
    p = Fraction(p)
    if p < 1:
        raise ValueError("p must be at least 1")
    if p == 1:
        v = x.l1_norm()
        return LpValue(p, v, v, Interval(v, v))
    if p.denominator == 1:
        power = sum((abs(v) ** int(p) for v in x.values()), Fraction(0))
        root = _root_interval(power, p, precision)
        exact = root.lo if root.lo == root.hi else None
        return LpValue(p, exact, power, root)
    # non-integer p: enclose the sum of powers, then the root
    bits = precision + 48
    while True:
        def go():
            s = iv.mpf(0)
            for v in x.values():
                s += _iv_rational(abs(v)) ** _iv_rational(p)
            return _iv_bounds(s ** (1 / _iv_rational(p)))
        lo, hi = _with_precision(bits, go)
        if hi - lo <= Fraction(1, 2 ** precision):
            return LpValue(p, None, None, Interval(lo, hi))
        bits += 32


# ---------------------------------------------------------------------------
# certificates

@dataclass
class CertNode:
    """Norming structure: a leaf picks one coordinate, a split carries pieces."""
    support: tuple[int, ...]
    leaf: int | None = None
    children: list["CertNode"] = field(default_factory=list)

    def to_json(self):
        if self.leaf is not None:
            return {"leaf": self.leaf}
        return {"support": list(self.support), "pieces": [c.to_json() for c in self.children]}


@dataclass
class NormCertificate:
    kind: str          # schreier_set | tsirelson_tree | schlumprecht_tree | lp_trivial
    norming_set: tuple[int, ...] | None = None
    tree: CertNode | None = None
    theta: Fraction | None = None
    family: str | None = None

    def to_json(self):
        out = {"kind": self.kind}
        if self.norming_set is not None:
            out["set"] = format_set(self.norming_set)
        if self.tree is not None:
            out["tree"] = self.tree.to_json()
        if self.theta is not None:
            out["theta"] = str(self.theta)
        if self.family is not None:
            out["family"] = self.family
        return out


# ---------------------------------------------------------------------------
# Schreier norm

def _mass(x: FinVec, E) -> Fraction:
    return sum((abs(x[i]) for i in E), Fraction(0))


def schreier_norm(x: FinVec, F: FamilyExpr) -> tuple[Fraction, NormCertificate]:
    """max of sum_{i in E} |x_i| over E in F, with an attaining E."""
    if x.is_zero():
        return Fraction(0), NormCertificate("schreier_set", norming_set=(), family=str(F))
    if _is_sbase(F) or isinstance(F, An):
        E = _top_mass_set(x, F)
    else:
        E = _schreier_search(x, F)
    return _mass(x, E), NormCertificate("schreier_set", norming_set=E, family=str(F))


def _is_sbase(F: FamilyExpr) -> bool:
    return isinstance(F, SBase) or (isinstance(F, Schreier) and F.xi == ONE)


def _top_mass_set(x: FinVec, F: FamilyExpr) -> tuple[int, ...]:
    """For families cut out by a size cap: the cap's worth of heaviest coordinates.

    For S the cap is min E, so every support point is tried as the minimum.
    """
    supp = x.support
    if isinstance(F, An):
        order = sorted(supp, key=lambda i: (-abs(x[i]), i))
        return tuple(sorted(order[:F.n]))
    best, best_E = Fraction(-1), ()
    for pos, first in enumerate(supp):
        later = sorted(supp[pos + 1:], key=lambda i: (-abs(x[i]), i))
        E = tuple(sorted((first,) + tuple(later[:first - 1])))
        m = _mass(x, E)
        if m > best:
            best, best_E = m, E
    return best_E


def _schreier_search(x: FinVec, F: FamilyExpr) -> tuple[int, ...]:
    supp = x.support
    if len(supp) > SCHREIER_EXHAUSTIVE_LIMIT:
        raise BudgetExceeded(
            f"support of size {len(supp)} exceeds the exhaustive limit {SCHREIER_EXHAUSTIVE_LIMIT}")
    weights = [abs(x[i]) for i in supp]
    suffix = [Fraction(0)] * (len(supp) + 1)
    for k in range(len(supp) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + weights[k]
    best = [Fraction(-1), ()]

    def rec(k: int, acc: tuple, m: Fraction):
        if m > best[0]:
            best[0], best[1] = m, acc
        if k == len(supp) or m + suffix[k] <= best[0]:
            return
        nxt = acc + (supp[k],)
        if member(F, nxt):
            rec(k + 1, nxt, m + weights[k])
        rec(k + 1, acc, m)

    rec(0, (), Fraction(0))
    return best[1]


def check_schreier_certificate(x: FinVec, F: FamilyExpr, value: Fraction, cert: NormCertificate) -> bool:
    E = cert.norming_set
    return member(F, E) and _mass(x, E) == value


# ---------------------------------------------------------------------------
# Tsirelson-type norms
#
# A norming split of an interval of the support is described by the positions
# a_1 < ... < a_s (s >= 2) where its pieces start; the pieces run up to the
# next start and the last one to the right end.  Points before a_1 are dropped.
# Since the norm is 1-unconditional and monotone, nothing is lost by letting
# pieces fill the gaps between starts.

def _count_cap(F: FamilyExpr):
    """Membership cap for families that only look at (|E|, min E)."""
    if _is_sbase(F):
        return lambda first: first
    if isinstance(F, An):
        return lambda first: F.n
    if isinstance(F, Schreier) and F.xi.is_zero():
        return lambda first: 1
    return None


def tsirelson_norm(x: FinVec, theta, F: FamilyExpr, *, route: str = "auto"
                   ) -> tuple[Fraction, NormCertificate]:
    """Exact value of max(|x|_inf, theta * sup sum ||E_i x||) over F-admissible splits.

    ``route`` is "auto", "capped" (only for cap-style families) or "generic".
    """
    theta = Fraction(theta)
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    if x.is_zero():
        return Fraction(0), NormCertificate("tsirelson_tree", theta=theta, family=str(F))
    cap = _count_cap(F)
    if route == "generic" or (route == "auto" and cap is None):
        if len(x.support) > GENERIC_DP_LIMIT:
            raise BudgetExceeded(f"support of size {len(x.support)} exceeds {GENERIC_DP_LIMIT}")
        value, tree = _tsirelson_generic(x, theta, F)
    else:
        if cap is None:
            raise ValueError(f"{F} is not a cap-style family")
        if len(x.support) > FAST_DP_LIMIT:
            raise BudgetExceeded(f"support of size {len(x.support)} exceeds {FAST_DP_LIMIT}")
        value, tree = _tsirelson_capped(x, theta, cap)
    return value, NormCertificate("tsirelson_tree", tree=tree, theta=theta, family=str(F))


def _argmax_coord(w, i: int, j: int) -> int:
    return max(range(i, j + 1), key=lambda t: (w[t], -t))


def _tsirelson_generic(x: FinVec, theta: Fraction, F: FamilyExpr):
    """Search over every admissible sequence of piece starts."""
    supp = x.support
    w = [abs(x[i]) for i in supp]
    n = len(supp)

    @lru_cache(maxsize=None)
    def N(i: int, j: int):
        k = _argmax_coord(w, i, j)
        best_split = [Fraction(-1), None]

        def extend(starts: tuple, acc: Fraction):
            last = starts[-1]
            if len(starts) >= 2:
                total = acc + N(last, j)[0]
                if total > best_split[0]:
                    best_split[0], best_split[1] = total, starts
            for nxt in range(last + 1, j + 1):
                if member(F, tuple(supp[s] for s in starts) + (supp[nxt],)):
                    extend(starts + (nxt,), acc + N(last, nxt - 1)[0])

        for a in range(i, j):
            if member(F, (supp[a],)):
                extend((a,), Fraction(0))
        if best_split[1] is not None and theta * best_split[0] > w[k]:
            starts = best_split[1]
            return theta * best_split[0], list(zip(starts, [s - 1 for s in starts[1:]] + [j]))
        return w[k], k

    def build(i: int, j: int) -> CertNode:
        c = N(i, j)[1]
        if isinstance(c, int):
            return CertNode((supp[c],), leaf=supp[c])
        return CertNode(tuple(supp[i:j + 1]), children=[build(a, b) for a, b in c])

    return N(0, n - 1)[0], build(0, n - 1)


def _tsirelson_capped(x: FinVec, theta: Fraction, cap):
    """Interval DP for cap-style families.

    For a fixed right end j, P[a][t] is the best sum over splits of positions
    a..j into between 2 and t pieces starting exactly at a, and Q[a][t] also
    allows a single piece.  Values are integers over the common scale
    den * q**n, which absorbs every factor theta = p/q along a nesting chain.
    """
    supp = x.support
    n = len(supp)
    den = 1
    for v in x.values():
        den = math.lcm(den, v.denominator)
    p, q = theta.numerator, theta.denominator
    scale = den * q ** n
    w = [int(abs(x[i]) * scale) for i in supp]
    caps = [cap(s) for s in supp]

    N = [[0] * n for _ in range(n)]
    how: list[list] = [[None] * n for _ in range(n)]   # leaf index or (start, t)
    Pcut: list[dict] = [None] * n                      # Pcut[j][(a, t)] -> end of first piece
    for j in range(n):
        Q: list[list | None] = [None] * (j + 2)
        cuts: dict = {}
        best_from = [(-1, None)] * (j + 2)    # best split with start >= a
        for a in range(j, -1, -1):
            length = j - a + 1
            P = [0, 0]
            for t in range(2, length + 1):
                best, arg = -1, None
                for c in range(a, j):
                    row = Q[c + 1]
                    val = N[a][c] + row[min(t - 1, len(row) - 1)]
                    if val > best:
                        best, arg = val, c
                P.append(best)
                cuts[(a, t)] = (arg, best)
            # N[a][j]: max of the largest coordinate and the best theta-split
            if length >= 2:
                t = min(caps[a], length)
                here = (P[t], (a, t)) if t >= 2 else (-1, None)
            else:
                here = (-1, None)
            best_from[a] = here if here[0] > best_from[a + 1][0] else best_from[a + 1]
            k = _argmax_coord(w, a, j)
            sval, sarg = best_from[a]
            if sarg is not None and sval * p > w[k] * q:
                num = sval * p
                if num % q:
                    raise ArithmeticError("scale does not absorb theta")
                N[a][j], how[a][j] = num // q, sarg
            else:
                N[a][j], how[a][j] = w[k], k
            Q[a] = [None, N[a][j]] + [max(N[a][j], P[t]) for t in range(2, length + 1)]
        Pcut[j] = cuts

    def pieces(a: int, j: int, t: int) -> list[tuple[int, int]]:
        # the split counted by P[a][t] at right end j
        c = Pcut[j][(a, t)][0]
        b, tt = c + 1, min(t - 1, j - c)
        if tt >= 2 and Pcut[j][(b, tt)][1] > N[b][j]:
            return [(a, c)] + pieces(b, j, tt)
        return [(a, c), (b, j)]

    def build(i: int, j: int) -> CertNode:
        h = how[i][j]
        if isinstance(h, int):
            return CertNode((supp[h],), leaf=supp[h])
        a, t = h
        return CertNode(tuple(supp[i:j + 1]), children=[build(s, e) for s, e in pieces(a, j, t)])

    return Fraction(N[0][n - 1], scale), build(0, n - 1)


def evaluate_tsirelson_tree(x: FinVec, theta: Fraction, F: FamilyExpr, node: CertNode) -> Fraction:
    """Value certified by a tree; raises if the tree is not admissible."""
    if node.leaf is not None:
        return abs(x[node.leaf])
    kids = node.children
    if len(kids) < 2:
        raise ValueError("a split needs at least two pieces")
    mins = []
    for a, b in zip(kids, kids[1:]):
        if not max(a.support) < min(b.support):
            raise ValueError("pieces are not order separated")
    for c in kids:
        if not set(c.support) <= set(node.support):
            raise ValueError("piece leaves its parent")
        mins.append(min(c.support))
    if not member(F, tuple(mins)):
        raise ValueError(f"piece minima {mins} are not admissible")
    return Fraction(theta) * sum(evaluate_tsirelson_tree(x, theta, F, c) for c in kids)


# ---------------------------------------------------------------------------
# Schlumprecht norm

def schlumprecht_weight_bounds(s: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational enclosure of theta_s = 1 / log2(s + 1)."""
    return _with_precision(bits, lambda: _iv_bounds(iv.log(iv.mpf(2)) / iv.log(iv.mpf(s + 1))))


def _schlumprecht_dp(w: list[Fraction], thetas: dict[int, Fraction]):
    n = len(w)
    N = [[Fraction(0)] * n for _ in range(n)]
    choice: list[list] = [[None] * n for _ in range(n)]
    for j in range(n):
        # R[a][s]: best split of w[a..j] into exactly s nonempty pieces
        R: dict[int, list] = {}
        Rc: dict[int, list] = {}
        for a in range(j, -1, -1):
            length = j - a + 1
            row = [None, None]
            crow = [None, None]
            for s in range(2, length + 1):
                best, arg = Fraction(-1), None
                for c in range(a, j - s + 2):
                    rest = N[c + 1][j] if s == 2 else R[c + 1][s - 1]
                    val = N[a][c] + rest
                    if val > best:
                        best, arg = val, c
                row.append(best)
                crow.append(arg)
            k = max(range(a, j + 1), key=lambda t: (w[t], -t))
            best_v, best_c = w[k], ("leaf", k)
            for s in range(2, length + 1):
                v = thetas[s] * row[s]
                if v > best_v:
                    best_v, best_c = v, ("split", s)
            N[a][j] = best_v
            choice[a][j] = best_c
            R[a] = row
            Rc[a] = crow
        for a in range(j + 1):
            if choice[a][j][0] == "split":
                choice[a][j] = ("split", choice[a][j][1], {b: Rc[b] for b in range(a, j + 1)})
    return N, choice


def _schlumprecht_tree(supp, N, choice, i: int, j: int) -> CertNode:
    c = choice[i][j]
    if c[0] == "leaf":
        return CertNode((supp[c[1]],), leaf=supp[c[1]])
    s, Rc = c[1], c[2]
    pieces, start = [], i
    while s > 1:
        cut = Rc[start][s]
        pieces.append((start, cut))
        start, s = cut + 1, s - 1
    pieces.append((start, j))
    return CertNode(tuple(supp[i:j + 1]),
                    children=[_schlumprecht_tree(supp, N, choice, a, b) for a, b in pieces])


@dataclass
class SchlumprechtValue:
    interval: Interval
    certificate: NormCertificate
    precision: int


def schlumprecht_norm(x: FinVec, precision: int | None = None) -> SchlumprechtValue:
    """Certified enclosure of sup over the weighted functionals with theta_s = 1/log2(s+1)."""
    precision = default_precision() if precision is None else precision
    if x.is_zero():
        z = Fraction(0)
        return SchlumprechtValue(Interval(z, z), NormCertificate("schlumprecht_tree"), precision)
    supp = x.support
    n = len(supp)
    if n > SCHLUMPRECHT_LIMIT:
        raise BudgetExceeded(f"support of size {n} exceeds {SCHLUMPRECHT_LIMIT}")
    w = [abs(x[i]) for i in supp]
    mass = sum(w)
    bits = precision + 16 + 2 * n.bit_length() + max(0, mass.numerator.bit_length() - mass.denominator.bit_length())
    while True:
        bounds = {s: schlumprecht_weight_bounds(s, bits) for s in range(2, n + 1)}
        lo_N, lo_choice = _schlumprecht_dp(w, {s: b[0] for s, b in bounds.items()})
        hi_N, _ = _schlumprecht_dp(w, {s: b[1] for s, b in bounds.items()})
        lo, hi = lo_N[0][n - 1], hi_N[0][n - 1]
        if hi - lo <= Fraction(1, 2 ** precision):
            break
        bits += 32
    tree = _schlumprecht_tree(supp, lo_N, lo_choice, 0, n - 1)
    return SchlumprechtValue(Interval(lo, hi), NormCertificate("schlumprecht_tree", tree=tree), precision)


def evaluate_schlumprecht_tree(x: FinVec, node: CertNode, bits: int = 96) -> Interval:
    """Interval value of a weight tree: a split with s pieces carries theta_s."""
    if node.leaf is not None:
        v = abs(x[node.leaf])
        return Interval(v, v)
    kids = node.children
    if len(kids) < 2:
        raise ValueError("a split needs at least two pieces")
    for a, b in zip(kids, kids[1:]):
        if not max(a.support) < min(b.support):
            raise ValueError("pieces are not order separated")
    lo_t, hi_t = schlumprecht_weight_bounds(len(kids), bits)
    vals = [evaluate_schlumprecht_tree(x, c, bits) for c in kids]
    return Interval(lo_t * sum(v.lo for v in vals), hi_t * sum(v.hi for v in vals))


# ---------------------------------------------------------------------------
# Mazur map

def mazur_map(x: FinVec, p, precision: int | None = None) -> dict[int, Interval]:
    """Entrywise sgn(x_i) |x_i|^(1/p) on the l_1 unit sphere."""
    precision = default_precision() if precision is None else precision
    p = Fraction(p)
    if p <= 1:
        raise ValueError("p must exceed 1")
    if x.l1_norm() != 1:
        raise ValueError("the Mazur map is defined on the l_1 unit sphere")
    out = {}
    for k, v in x.entries.items():
        r = _root_interval(abs(v), p, precision)
        out[k] = r if v > 0 else Interval(-r.hi, -r.lo)
    return out
