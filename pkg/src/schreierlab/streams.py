"""Lazy strictly increasing integer streams with memoized prefixes.

Streams are 1-indexed (``s[1]`` is the first element) and identified by a
descriptor string, which also serves as their hash key.
"""
from __future__ import annotations

import bisect
import re
import threading
from fractions import Fraction
from typing import Callable, Iterator


class BudgetExceeded(RuntimeError):
    """A computation would exceed its configured size or time budget."""


DEFAULT_INDEX_LIMIT = 200_000


class Stream:
    def __init__(self, desc: str, factory: Callable[[], Iterator[int]] | None = None,
                 index_limit: int = DEFAULT_INDEX_LIMIT, formula: Callable[[int], int] | None = None,
                 inverse: Callable[[int], int] | None = None):
        """Either a generator factory or a closed-form ``formula(n)``.

        Closed-form streams are evaluated directly at any index; generated
        streams memoize their prefix and stop at ``index_limit``.  An optional
        ``inverse(v)`` gives the least n with formula(n) >= v.
        """
        if factory is None and formula is None:
            raise ValueError("a stream needs a factory or a formula")
        self.desc = desc
        self.formula = formula
        self.inverse = inverse
        if factory is None:
            factory = _counter(formula)
        self._factory = factory
        self._it: Iterator[int] | None = None
        self._memo: list[int] = []
        self._lock = threading.Lock()
        self._max_seen = 0
        self.index_limit = index_limit

    def __repr__(self):
        return f"Stream({self.desc!r})"

    def __str__(self):
        return self.desc

    def __eq__(self, other):
        return isinstance(other, Stream) and other.desc == self.desc

    def __hash__(self):
        return hash(("stream", self.desc))

    @property
    def consumed(self) -> int:
        return max(len(self._memo), self._max_seen)

    def _fill(self, n: int) -> None:
        if n > self.index_limit:
            shown = n if n < 10**12 else f"~2^{n.bit_length()}"
            raise BudgetExceeded(f"stream {self.desc} index {shown} exceeds limit {self.index_limit}")
        with self._lock:
            if self._it is None:
                self._it = self._factory()
            while len(self._memo) < n:
                v = next(self._it)
                if self._memo and v <= self._memo[-1]:
                    raise ValueError(f"stream {self.desc} is not strictly increasing")
                if v < 1:
                    raise ValueError(f"stream {self.desc} produced {v}")
                self._memo.append(v)

    def __getitem__(self, n: int) -> int:
        if n < 1:
            raise IndexError("streams are 1-indexed")
        if self.formula is not None:
            if n > self._max_seen:
                self._max_seen = n
            return self.formula(n)
        if n > len(self._memo):
            self._fill(n)
        return self._memo[n - 1]

    def prefix(self, k: int) -> list[int]:
        if self.formula is not None:
            return [self[i] for i in range(1, k + 1)]
        if k > len(self._memo):
            self._fill(k)
        return self._memo[:k]

    def first_index_at_least(self, value: int) -> int:
        """Least index n with s[n] >= value."""
        if self.inverse is not None:
            n = max(1, self.inverse(value))
            self[n]
            return n
        if self.formula is not None:
            hi = 1
            while self.formula(hi) < value:
                hi *= 2
            lo = hi // 2 + 1 if hi > 1 else 1
            while lo < hi:
                mid = (lo + hi) // 2
                if self.formula(mid) < value:
                    lo = mid + 1
                else:
                    hi = mid
            return lo
        k = max(1, len(self._memo))
        while self[k] < value:
            k *= 2
        self._fill(k)
        return bisect.bisect_left(self._memo, value, 0, k) + 1

    def index_of(self, value: int) -> int | None:
        n = self.first_index_at_least(value)
        return n if self[n] == value else None

    def contains(self, value: int) -> bool:
        return self.index_of(value) is not None

    def image(self, E) -> tuple[int, ...]:
        return tuple(self[n] for n in E)

    def preimage(self, E) -> tuple[int, ...] | None:
        out = []
        for v in E:
            n = self.index_of(v)
            if n is None:
                return None
            out.append(n)
        return tuple(out)

    def tail(self, skip: int) -> "Stream":
        """The stream with its first ``skip`` elements removed."""
        if skip == 0:
            return self
        parent = self
        if parent.formula is not None:
            return Stream(f"drop({self.desc},{skip})", index_limit=self.index_limit,
                          formula=lambda n: parent[n + skip])

        def gen():
            n = skip + 1
            while True:
                yield parent[n]
                n += 1
        return Stream(f"drop({self.desc},{skip})", gen, self.index_limit)

    def compose(self, inner: "Stream") -> "Stream":
        """n -> self[inner[n]]."""
        outer = self
        if outer.formula is not None and inner.formula is not None:
            return Stream(f"comp({self.desc},{inner.desc})", formula=lambda n: outer[inner[n]])

        def gen():
            n = 1
            while True:
                yield outer[inner[n]]
                n += 1
        return Stream(f"comp({self.desc},{inner.desc})", gen,
                      max(self.index_limit, inner.index_limit))


def _counter(f: Callable[[int], int]) -> Callable[[], Iterator[int]]:
    def gen():
        n = 1
        while True:
            yield f(n)
            n += 1
    return gen


def identity() -> Stream:
    return Stream("id", formula=lambda n: n, inverse=lambda v: v)


def affine(a: int, b: int) -> Stream:
    if a < 1 or a + b < 1:
        raise ValueError("affine stream must be increasing and positive")
    return Stream(f"affine({a},{b})", formula=lambda n: a * n + b,
                  inverse=lambda v: -((b - v) // a))


def power(k: int) -> Stream:
    if k < 1:
        raise ValueError("exponent must be positive")
    return Stream(f"pow({k})", formula=lambda n: n ** k, inverse=lambda v: _ceil_root(v, k))


def starting_at(k: int) -> Stream:
    if k < 1:
        raise ValueError("streams live in the positive integers")
    return Stream(f"from({k})", formula=lambda n: n + k - 1, inverse=lambda v: v - k + 1)


def _ceil_root(v: int, k: int) -> int:
    """Least n >= 1 with n**k >= v."""
    if v <= 1:
        return 1
    n = 1 << -(-v.bit_length() // k)
    while True:
        # Newton steps from above settle on the floor root
        m = ((k - 1) * n + v // n ** (k - 1)) // k
        if m >= n:
            break
        n = m
    return n if n ** k >= v else n + 1


def from_list(values) -> Stream:
    vals = [int(v) for v in values]

    def gen():
        yield from vals
        raise BudgetExceeded("finite stream exhausted")
    return Stream("list(" + ",".join(map(str, vals)) + ")", gen)


def fast_growing(M: Stream, eps: Fraction, N: Stream | None = None) -> Stream:
    """Greedy (M, eps) fast growing subsequence of N.

    l_1 = n_1 and l_{k+1} is the least element of N exceeding
    m_{l_k} (1 + 2 eps) / eps.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    N = N or identity()
    ratio = (1 + 2 * eps) / eps

    def gen():
        cur = N[1]
        while True:
            yield cur
            bound = M[cur] * ratio
            nxt = bound.numerator // bound.denominator + 1
            cur = N[N.first_index_at_least(nxt)]
    return Stream(f"fastgrow({M.desc},{eps},{N.desc})", gen,
                  max(M.index_limit, N.index_limit))


def is_fast_growing_prefix(M: Stream, eps: Fraction, L_prefix) -> bool:
    """Check m_{l_n} / l_{n+1} < eps / (1 + 2 eps) along a finite prefix."""
    eps = Fraction(eps)
    bound = eps / (1 + 2 * eps)
    return all(Fraction(M[a], b) < bound for a, b in zip(L_prefix, L_prefix[1:]))


_NAMED = {
    "id": identity,
    "identity": identity,
    "evens": lambda: Stream("evens", formula=lambda n: 2 * n, inverse=lambda v: -(-v // 2)),
    "odds": lambda: Stream("odds", formula=lambda n: 2 * n - 1, inverse=lambda v: v // 2 + 1),
    "squares": lambda: Stream("squares", formula=lambda n: n * n, inverse=lambda v: _ceil_root(v, 2)),
}


def _split_args(body: str) -> list[str]:
    depth, start, out = 0, 0, []
    for i, ch in enumerate(body):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append(body[start:i].strip())
            start = i + 1
    out.append(body[start:].strip())
    return [a for a in out if a]


def parse_stream(text: str) -> Stream:
    """Parse ``id``, ``evens``, ``squares``, ``from(k)``, ``affine(a,b)``,
    ``pow(k)``, ``list(...)``, ``fastgrow(M,eps[,N])``."""
    text = text.strip().replace(" ", "")
    if text in _NAMED:
        return _NAMED[text]()
    m = re.fullmatch(r"(\w+)\((.*)\)", text)
    if not m:
        raise ValueError(f"unknown stream {text!r}")
    name, args = m.group(1), _split_args(m.group(2))
    if name == "from" and len(args) == 1:
        return starting_at(int(args[0]))
    if name == "affine" and len(args) == 2:
        return affine(int(args[0]), int(args[1]))
    if name == "pow" and len(args) == 1:
        return power(int(args[0]))
    if name == "list":
        return from_list(args)
    if name == "fastgrow" and len(args) in (2, 3):
        N = parse_stream(args[2]) if len(args) == 3 else None
        return fast_growing(parse_stream(args[0]), Fraction(args[1]), N)
    raise ValueError(f"unknown stream {text!r}")
