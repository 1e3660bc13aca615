"""Exact continued fraction arithmetic.

Streams of partial quotients, convergent tables, continuants, the mirror
formula and certified rational enclosures of the limit of a stream. Every
verdict here is decided with integers or ``Fraction``; nothing is rounded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .enclosure import RationalEnclosure, as_fraction

__all__ = [
    "StreamExhausted",
    "InsufficientPrefix",
    "PrefixMismatch",
    "PartialQuotientStream",
    "ConvergentTable",
    "ProximityCertificate",
    "GrowthVerdict",
    "convergents",
    "table_from_quotients",
    "enclose",
    "enclose_stream",
    "expand_rational",
    "evaluate",
    "canonical_word",
    "continuant",
    "mirror_ratio",
    "mirror_word",
    "check_proximity",
    "growth_bounds",
]


class StreamExhausted(LookupError):
    """A finite stream (or schedule) ran out before the requested index."""


class InsufficientPrefix(ArithmeticError):
    """The materialized prefix cannot reach the requested enclosure width."""

    def __init__(self, message: str, best: RationalEnclosure | None):
        super().__init__(message)
        self.best = best


class PrefixMismatch(ValueError):
    def __init__(self, index: int, left: int, right: int):
        super().__init__(f"streams disagree at index {index}: {left} != {right}")
        self.index = index


class PartialQuotientStream:
    """Lazily materialized sequence ``a_0, a_1, a_2, ...`` of partial quotients.

    ``head`` is ``a_0`` (may be 0); ``tail`` yields ``a_1, a_2, ...`` which
    must all be positive. The tail iterator is consumed at most once and its
    values are cached, so reading an index twice is deterministic. A stream is
    not thread-safe; confine each instance to one thread.
    """

    def __init__(self, head: int, tail: Iterable[int] = (), rule: str = ""):
        if not isinstance(head, int) or head < 0:
            raise ValueError(f"head a_0 must be a non-negative integer, got {head!r}")
        self.head = head
        self.rule = rule
        self._tail: Iterator[int] = iter(tail)
        self._known: list[int] = [head]
        self._exhausted = False

    @classmethod
    def from_quotients(cls, quotients: Sequence[int], rule: str = "finite") -> "PartialQuotientStream":
        if not quotients:
            raise ValueError("need at least a_0")
        return cls(quotients[0], list(quotients[1:]), rule=rule)

    @classmethod
    def constant(cls, head: int, value: int) -> "PartialQuotientStream":
        return cls(head, itertools.repeat(value), rule=f"constant {value}")

    @classmethod
    def periodic(cls, prefix: Sequence[int], block: Sequence[int]) -> "PartialQuotientStream":
        """Stream for ``[prefix, block, block, ...]``."""
        if not block:
            raise ValueError("periodic block must be nonempty")
        seq = itertools.chain(prefix, itertools.cycle(block))
        head = next(seq)
        return cls(head, seq, rule=f"periodic {list(prefix)} ({list(block)})^inf")

    @classmethod
    def from_function(cls, f: Callable[[int], int]) -> "PartialQuotientStream":
        return cls(f(0), (f(i) for i in itertools.count(1)), rule=getattr(f, "__name__", "function"))

    def _pull(self, n: int) -> None:
        while len(self._known) <= n and not self._exhausted:
            try:
                value = next(self._tail)
            except StopIteration:
                self._exhausted = True
                break
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"partial quotient a_{len(self._known)} = {value!r} is not a positive integer")
            self._known.append(value)

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError("negative index")
        self._pull(i)
        if i >= len(self._known):
            raise StreamExhausted(f"stream has only {len(self._known)} terms, index {i} requested")
        return self._known[i]

    def prefix(self, n: int) -> list[int]:
        """The terms ``a_0 .. a_n``; raises StreamExhausted if unavailable."""
        self[n]
        return self._known[: n + 1]

    def segment(self, n: int) -> tuple[list[int], bool]:
        """Up to ``a_0 .. a_n`` plus whether the stream is known to end there.

        One term of lookahead is pulled so that a stream terminating exactly at
        index ``n`` is reported as complete.
        """
        self._pull(n + 1)
        terms = self._known[: n + 1]
        complete = self._exhausted and len(self._known) <= n + 1
        return terms, complete

    @property
    def materialized(self) -> int:
        return len(self._known)

    def __repr__(self) -> str:
        return f"PartialQuotientStream({self.rule or 'custom'}, materialized={len(self._known)})"


@dataclass(frozen=True)
class ConvergentTable:
    """Convergents ``p_n/q_n`` for ``n = 0 .. depth``.

    ``complete`` marks a table holding the whole (terminating) expansion, in
    which case the last convergent is the exact value.
    """

    quotients: tuple[int, ...]
    ps: tuple[int, ...]
    qs: tuple[int, ...]
    complete: bool = False

    @property
    def depth(self) -> int:
        return len(self.qs) - 1

    def __len__(self) -> int:
        return len(self.qs)

    def p(self, n: int) -> int:
        # p_{-1} = 1, p_{-2} = 0
        if n < 0:
            return {-1: 1, -2: 0}[n]
        return self.ps[n]

    def q(self, n: int) -> int:
        # q_{-1} = 0, q_{-2} = 1
        if n < 0:
            return {-1: 0, -2: 1}[n]
        return self.qs[n]

    def a(self, n: int) -> int:
        return self.quotients[n]

    def value(self, n: int) -> Fraction:
        return Fraction(self.ps[n], self.qs[n])

    @property
    def entries(self) -> list[tuple[int, int, int]]:
        return [(n, p, q) for n, (p, q) in enumerate(zip(self.ps, self.qs))]

    def check_invariants(self) -> bool:
        """Recurrence, determinant identity and monotonicity of q_n."""
        for n in range(len(self.qs)):
            a = self.quotients[n]
            if self.ps[n] != a * self.p(n - 1) + self.p(n - 2):
                return False
            if self.qs[n] != a * self.q(n - 1) + self.q(n - 2):
                return False
            if n >= 1:
                if self.ps[n] * self.qs[n - 1] - self.ps[n - 1] * self.qs[n] != (-1) ** (n - 1):
                    return False
                if n >= 2 and self.qs[n] <= self.qs[n - 1]:
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "complete": self.complete,
            "entries": [{"n": n, "a": str(a), "p": str(p), "q": str(q)}
                        for n, (a, p, q) in enumerate(zip(self.quotients, self.ps, self.qs))],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ConvergentTable":
        entries = sorted(obj["entries"], key=lambda e: int(e["n"]))
        if [int(e["n"]) for e in entries] != list(range(len(entries))):
            raise ValueError("table dump must list indices 0..N without gaps")
        if all("a" in e for e in entries):
            table = table_from_quotients([int(e["a"]) for e in entries], complete=bool(obj.get("complete", False)))
            if any(int(e["p"]) != table.ps[i] or int(e["q"]) != table.qs[i] for i, e in enumerate(entries)):
                raise ValueError("table dump is inconsistent with its partial quotients")
            return table
        ps = tuple(int(e["p"]) for e in entries)
        qs = tuple(int(e["q"]) for e in entries)
        quotients = _recover_quotients(ps, qs)
        return cls(quotients, ps, qs, complete=bool(obj.get("complete", False)))


def _recover_quotients(ps: Sequence[int], qs: Sequence[int]) -> tuple[int, ...]:
    def p(n):
        return ps[n] if n >= 0 else (1 if n == -1 else 0)

    def q(n):
        return qs[n] if n >= 0 else (0 if n == -1 else 1)

    out = [ps[0]]
    if qs[0] != 1:
        raise ValueError("table dump must start with q_0 = 1")
    for n in range(1, len(qs)):
        a, rem = divmod(q(n) - q(n - 2), q(n - 1))
        if rem or a < 1 or p(n) != a * p(n - 1) + p(n - 2):
            raise ValueError(f"table dump violates the convergent recurrence at n={n}")
        out.append(a)
    return tuple(out)


def table_from_quotients(quotients: Sequence[int], complete: bool = False) -> ConvergentTable:
    ps, qs = [], []
    p1, p2, q1, q2 = 1, 0, 0, 1
    for a in quotients:
        p1, p2 = a * p1 + p2, p1
        q1, q2 = a * q1 + q2, q1
        ps.append(p1)
        qs.append(q1)
    return ConvergentTable(tuple(quotients), tuple(ps), tuple(qs), complete)


def convergents(stream: PartialQuotientStream, n: int) -> ConvergentTable:
    """Exact convergents ``(p_i, q_i)`` for ``i <= n``."""
    terms, complete = stream.segment(n)
    if len(terms) <= n:
        raise StreamExhausted(f"stream ends at index {len(terms) - 1}, convergents up to {n} requested")
    return table_from_quotients(terms, complete=complete)


def enclose(table: ConvergentTable, width_bound) -> RationalEnclosure:
    """Enclosure of the limit by the first consecutive pair with gap <= width_bound.

    Consecutive convergents bracket the limit and differ by exactly
    ``1/(q_n q_{n+1})``.
    """
    width_bound = as_fraction(width_bound)
    if width_bound <= 0:
        raise ValueError("width bound must be positive")
    if table.complete:
        return RationalEnclosure.point(table.value(table.depth))
    if len(table) < 2:
        raise ValueError("need at least two consecutive convergents")
    for n in range(table.depth):
        if Fraction(1, table.qs[n] * table.qs[n + 1]) <= width_bound:
            return RationalEnclosure.spanning(table.value(n), table.value(n + 1))
    best = RationalEnclosure.spanning(table.value(table.depth - 1), table.value(table.depth))
    raise InsufficientPrefix(f"prefix of depth {table.depth} reaches width {best.width}, wanted {width_bound}", best)


def enclose_stream(stream: PartialQuotientStream, width_bound, start_depth: int = 8,
                   max_depth: int = 1 << 20) -> RationalEnclosure:
    """Enclose the limit of a stream, doubling the materialized depth as needed."""
    depth = max(1, start_depth)
    while True:
        terms, complete = stream.segment(depth)
        if complete:
            return enclose(table_from_quotients(terms, complete=True), width_bound)
        try:
            return enclose(table_from_quotients(terms), width_bound)
        except InsufficientPrefix:
            if depth >= max_depth:
                raise
        depth = min(depth * 2, max_depth)


def evaluate(quotients: Sequence[int]) -> Fraction:
    """Exact value of a finite continued fraction ``[a_0; a_1, ..., a_m]``."""
    if not quotients:
        raise ValueError("empty continued fraction")
    value = Fraction(quotients[-1])
    for a in reversed(quotients[:-1]):
        value = a + 1 / value
    return value


def expand_rational(p: int, q: int) -> list[int]:
    """Canonical continued fraction of ``p/q`` (last quotient >= 2 unless length 1)."""
    if q < 1:
        raise ValueError("denominator must be positive")
    out = []
    while q:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


def canonical_word(word: Sequence[int]) -> list[int]:
    """Resolve ``[..., a, 1]`` to ``[..., a + 1]`` so equal values compare equal."""
    word = list(word)
    while len(word) > 1 and word[-1] == 1:
        word.pop()
        word[-1] += 1
    return word


def continuant(seq: Sequence[int]) -> int:
    """``K_m(a_1, ..., a_m)``: the denominator of ``[0; a_1, ..., a_m]``."""
    k1, k2 = 1, 0
    for a in seq:
        if a < 1:
            raise ValueError(f"continuant entries must be positive, got {a}")
        k1, k2 = a * k1 + k2, k1
    return k1


def mirror_ratio(table: ConvergentTable, n: int) -> list[int]:
    """Canonical expansion of ``q_n / q_{n-1}``."""
    if n < 2:
        raise ValueError("mirror formula needs n >= 2")
    return expand_rational(table.q(n), table.q(n - 1))


def mirror_word(table: ConvergentTable, n: int) -> list[int]:
    """The reversed quotient word ``[a_n; a_{n-1}, ..., a_1]`` in canonical form."""
    return canonical_word(reversed(table.quotients[1 : n + 1]))


@dataclass(frozen=True)
class ProximityCertificate:
    n: int
    q_n: int
    bound: Fraction
    gap_upper: Fraction
    xi: RationalEnclosure
    eta: RationalEnclosure

    @property
    def holds(self) -> bool:
        return self.gap_upper <= self.bound


def _best_enclosure(terms: list[int], complete: bool) -> RationalEnclosure:
    table = table_from_quotients(terms, complete=complete)
    if complete:
        return RationalEnclosure.point(table.value(table.depth))
    return RationalEnclosure.spanning(table.value(table.depth - 1), table.value(table.depth))


def check_proximity(x: PartialQuotientStream, y: PartialQuotientStream, n: int) -> ProximityCertificate:
    """Certify ``|xi - eta| <= q_n^-2`` for streams sharing ``a_0 .. a_n``.

    Both limits are enclosed from two further quotients and the hull of the
    two enclosures is compared exactly with ``1/q_n^2``.
    """
    tx, cx = x.segment(n + 2)
    ty, cy = y.segment(n + 2)
    if len(tx) <= n or len(ty) <= n:
        raise StreamExhausted(f"both streams must reach index {n}")
    for i in range(n + 1):
        if tx[i] != ty[i]:
            raise PrefixMismatch(i, tx[i], ty[i])
    q_n = table_from_quotients(tx[: n + 1]).q(n)
    ex, ey = _best_enclosure(tx, cx), _best_enclosure(ty, cy)
    hull = ex.hull(ey)
    return ProximityCertificate(n, q_n, Fraction(1, q_n * q_n), hull.width, ex, ey)


@dataclass(frozen=True)
class GrowthVerdict:
    n: int
    q_n: int
    lower: bool  # sqrt(2)^(n-1) <= q_n
    upper: bool  # q_n <= (M+1)^n

    @property
    def holds(self) -> bool:
        return self.lower and self.upper


def growth_bounds(table: ConvergentTable, M: int) -> list[GrowthVerdict]:
    """Check ``sqrt(2)^(n-1) <= q_n <= (M+1)^n`` for every stored ``n >= 1``.

    Only ``a_1, a_2, ...`` enter ``q_n``, so ``a_0`` is not required to be at
    most ``M``.
    """
    if M < 1:
        raise ValueError("M must be a positive integer")
    for i in range(1, len(table)):
        if table.a(i) > M:
            raise ValueError(f"partial quotient a_{i} = {table.a(i)} exceeds M = {M}")
    out = []
    two_pow, m_pow = 1, M + 1  # 2^(n-1), (M+1)^n at n = 1
    for n in range(1, len(table)):
        q = table.q(n)
        out.append(GrowthVerdict(n, q, two_pow <= q * q, q <= m_pow))
        two_pow *= 2
        m_pow *= M + 1
    return out
