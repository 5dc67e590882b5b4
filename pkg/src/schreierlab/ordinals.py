"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is a tuple of ``(exponent, coefficient)`` terms with strictly
decreasing exponents; the empty tuple is 0.  Exponents are ordinals again,
so every value is a finite hereditary term.
"""
from __future__ import annotations

import re
from functools import total_ordering, lru_cache
from itertools import product
from typing import Iterable, Iterator


class OrdinalError(ValueError):
    pass


@total_ordering
class Ordinal:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable[tuple["Ordinal", int]] = ()):
        terms = tuple(terms)
        prev = None
        for e, c in terms:
            if not isinstance(e, Ordinal) or not isinstance(c, int) or c < 1:
                raise OrdinalError(f"bad term ({e!r}, {c!r})")
            if prev is not None and not e < prev:
                raise OrdinalError("exponents must strictly decrease")
            prev = e
        self.terms = terms
        self._hash = hash(terms)

    @classmethod
    def of(cls, value: "int | Ordinal") -> "Ordinal":
        if isinstance(value, Ordinal):
            return value
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise OrdinalError(f"cannot make an ordinal from {value!r}")
        return ZERO if value == 0 else cls(((ZERO, value),))

    # comparisons ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            other = Ordinal.of(other) if other >= 0 else None
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return ord_cmp(self, other) < 0

    def __hash__(self):
        return self._hash

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        return ord_add(self, Ordinal.of(other))

    def __radd__(self, other):
        return ord_add(Ordinal.of(other), self)

    def __mul__(self, other):
        return ord_mul(self, Ordinal.of(other))

    def __rmul__(self, other):
        return ord_mul(Ordinal.of(other), self)

    # classification ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or self.terms[0][0].is_zero()

    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero()

    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero()

    def __int__(self):
        if not self.is_finite():
            raise OrdinalError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def predecessor(self) -> "Ordinal":
        if not self.is_successor():
            raise OrdinalError(f"{self} has no predecessor")
        *head, (e, c) = self.terms
        if c > 1:
            head.append((e, c - 1))
        return Ordinal(head)

    def successor(self) -> "Ordinal":
        return ord_add(self, ONE)

    def leading_exponent(self) -> "Ordinal":
        return self.terms[0][0] if self.terms else ZERO

    # text ---------------------------------------------------------------
    def __str__(self):
        return format_ordinal(self)

    def __repr__(self):
        return f"Ordinal({format_ordinal(self)!r})"


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def ord_cmp(a: Ordinal, b: Ordinal) -> int:
    """-1, 0 or 1; lexicographic on term lists."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = ord_cmp(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def ord_add(a: Ordinal, b: Ordinal) -> Ordinal:
    if b.is_zero():
        return a
    lead = b.terms[0][0]
    keep = [t for t in a.terms if ord_cmp(t[0], lead) > 0]
    same = [c for e, c in a.terms if e == lead]
    first = (lead, b.terms[0][1] + (same[0] if same else 0))
    return Ordinal(keep + [first] + list(b.terms[1:]))


def omega_pow(a: "Ordinal | int") -> Ordinal:
    return Ordinal(((Ordinal.of(a), 1),))


def ord_mul(a: Ordinal, b: Ordinal) -> Ordinal:
    if a.is_zero() or b.is_zero():
        return ZERO
    lead = a.terms[0][0]
    out = ZERO
    for e, c in b.terms:
        if e.is_zero():
            # finite factor: multiply the leading coefficient only
            piece = Ordinal(((lead, a.terms[0][1] * c),) + a.terms[1:])
        else:
            piece = Ordinal(((ord_add(lead, e), c),))
        out = ord_add(out, piece)
    return out


def hessenberg_sum(a: Ordinal, b: Ordinal) -> Ordinal:
    coeffs: dict[Ordinal, int] = {}
    for e, c in a.terms + b.terms:
        coeffs[e] = coeffs.get(e, 0) + c
    exps = sorted(coeffs, reverse=True)
    return Ordinal((e, coeffs[e]) for e in exps)


def hessenberg_decompositions(x: Ordinal) -> set[tuple[Ordinal, Ordinal]]:
    """All ordered pairs (a, b) with a (+) b == x."""
    splits = [[(k, c - k) for k in range(c + 1)] for _, c in x.terms]
    out = set()
    for choice in product(*splits):
        left = Ordinal((e, k) for (e, _), (k, _) in zip(x.terms, choice) if k)
        right = Ordinal((e, r) for (e, _), (_, r) in zip(x.terms, choice) if r)
        out.add((left, right))
    return out


@lru_cache(maxsize=None)
def fundamental_seq(x: Ordinal, n: int) -> Ordinal:
    """n-th element of the canonical ladder below the limit ``x``.

    (g + w^(a+1))[n] = g + w^a * n and (g + w^l)[n] = g + w^(l[n]).
    """
    if not x.is_limit():
        raise OrdinalError(f"{x} is not a limit ordinal")
    if n < 1:
        raise OrdinalError("ladder index must be positive")
    *head, (e, c) = x.terms
    if c > 1:
        head.append((e, c - 1))
    base = Ordinal(head)
    if e.is_successor():
        step = ord_mul(omega_pow(e.predecessor()), Ordinal.of(n))
    else:
        step = omega_pow(fundamental_seq(e, n))
    return ord_add(base, step)


def ladder(x: Ordinal) -> Iterator[Ordinal]:
    n = 1
    while True:
        yield fundamental_seq(x, n)
        n += 1


# ---------------------------------------------------------------------------
# text syntax: 0, 5, w, w^2*3 + w + 4, w^(w*2)

def format_ordinal(x: Ordinal) -> str:
    if x.is_zero():
        return "0"
    parts = []
    for e, c in x.terms:
        if e.is_zero():
            parts.append(str(c))
            continue
        if e == ONE:
            base = "w"
        elif e.is_finite() or e == OMEGA:
            base = f"w^{format_ordinal(e)}"
        else:
            base = f"w^({format_ordinal(e)})"
        parts.append(base if c == 1 else f"{base}*{c}")
    return "+".join(parts)


_TOKEN = re.compile(r"\s*(\d+|[wω]|\^|\*|\+|\(|\))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise OrdinalError(f"unexpected character at {pos} in {text!r}")
        out.append("w" if m.group(1) == "ω" else m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, tok=None):
        t = self.peek()
        if t is None or (tok is not None and t != tok):
            raise OrdinalError(f"expected {tok or 'token'}, got {t!r}")
        self.i += 1
        return t

    def expr(self) -> Ordinal:
        v = self.term()
        while self.peek() == "+":
            self.take()
            v = ord_add(v, self.term())
        return v

    def term(self) -> Ordinal:
        v = self.factor()
        while self.peek() == "*":
            self.take()
            v = ord_mul(v, self.factor())
        return v

    def factor(self) -> Ordinal:
        t = self.peek()
        if t == "(":
            self.take()
            v = self.expr()
            self.take(")")
            if self.peek() == "^":
                raise OrdinalError("only w may be raised to a power")
            return v
        if t == "w":
            self.take()
            if self.peek() == "^":
                self.take()
                return omega_pow(self.factor())
            return OMEGA
        if t is not None and t.isdigit():
            self.take()
            if self.peek() == "^":
                raise OrdinalError("only w may be raised to a power")
            return Ordinal.of(int(t))
        raise OrdinalError(f"unexpected token {t!r}")


def parse_ordinal(text: "str | int | Ordinal") -> Ordinal:
    if isinstance(text, (Ordinal, int)):
        return Ordinal.of(text)
    p = _Parser(_tokenize(text))
    if not p.toks:
        raise OrdinalError("empty ordinal")
    v = p.expr()
    if p.peek() is not None:
        raise OrdinalError(f"trailing input {p.peek()!r}")
    return v


def enumerate_cnf(exponents: Iterable[Ordinal], max_coeff: int) -> list[Ordinal]:
    """Every CNF ordinal built from the given exponents with coefficients <= max_coeff."""
    exps = sorted(set(exponents), reverse=True)
    out = []
    for coeffs in product(range(max_coeff + 1), repeat=len(exps)):
        out.append(Ordinal((e, c) for e, c in zip(exps, coeffs) if c))
    return out
