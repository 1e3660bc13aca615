"""Exact real quadratic irrationals ``(P + sqrt(D)) / Q``.

A surd is stored in a canonical triple derived from its primitive minimal
polynomial and the branch (sign of ``Q``), so two surds are equal exactly
when their triples are equal. Expansion uses the classical ``(P, Q)`` orbit
algorithm, which needs ``Q | D - P^2``; the canonical triple satisfies it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cf import PartialQuotientStream, table_from_quotients
from .enclosure import RationalEnclosure, Real, as_fraction

__all__ = [
    "QuadraticSurd",
    "PeriodicExpansion",
    "expand_surd",
    "purely_periodic_value",
    "tail_periodicize",
    "surd_enclose",
    "primitive_period",
    "compare_surds",
]


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class QuadraticSurd:
    """The real number ``(P + sqrt(D)) / Q`` with ``D`` a positive non-square."""

    P: int
    D: int
    Q: int

    def __post_init__(self):
        P, D, Q = self.P, self.D, self.Q
        if Q == 0:
            raise ValueError("Q must be nonzero")
        if D <= 0:
            raise ValueError("D must be positive")
        if _is_square(D):
            raise ValueError(f"D = {D} is a perfect square; the value is rational")
        a, b, c = Q * Q, -2 * P * Q, P * P - D
        g = math.gcd(math.gcd(a, b), c)
        a, b, c = a // g, b // g, c // g
        if b % 2 == 0:
            P2, D2, Q2 = -b // 2, (b // 2) ** 2 - a * c, a
        else:
            P2, D2, Q2 = -b, b * b - 4 * a * c, 2 * a
        if Q < 0:
            P2, Q2 = -P2, -Q2
        object.__setattr__(self, "P", P2)
        object.__setattr__(self, "D", D2)
        object.__setattr__(self, "Q", Q2)

    # exact structure -------------------------------------------------------

    def min_poly(self) -> tuple[int, int, int]:
        """Primitive ``(a, b, c)``, ``a > 0``, with ``a x^2 + b x + c = 0``."""
        P, D, Q = self.P, self.D, self.Q
        a, b, c = Q * Q, -2 * P * Q, P * P - D
        g = math.gcd(math.gcd(a, b), c)
        return a // g, b // g, c // g

    @property
    def height(self) -> int:
        return max(abs(x) for x in self.min_poly())

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(-self.P, self.D, -self.Q)

    def compare(self, r) -> int:
        """Exact sign of ``self - r`` for a rational ``r``."""
        r = as_fraction(r)
        A = self.P - r * self.Q
        # sign(A + sqrt(D)); D == A^2 is impossible for non-square D
        s = 1 if A >= 0 else _sign(self.D - A * A)
        return s * _sign(self.Q)

    def floor(self) -> int:
        r = math.isqrt(self.D)
        if self.Q > 0:
            return (self.P + r) // self.Q
        return (-self.P - r - 1) // (-self.Q)

    def evaluate_poly(self, coeffs: Sequence[int]) -> tuple[Fraction, Fraction]:
        """``f(self) = u + v sqrt(D)`` for integer coefficients (highest degree first)."""
        P, Q = Fraction(self.P, self.Q), Fraction(1, self.Q)
        u, v = Fraction(0), Fraction(0)
        for c in coeffs:
            # (u + v s)(P + Q s) + c with s^2 = D
            u, v = u * P + v * Q * self.D + c, u * Q + v * P
        return u, v

    def is_root_of(self, coeffs: Sequence[int]) -> bool:
        u, v = self.evaluate_poly(coeffs)
        return u == 0 and v == 0

    def mobius(self, a: int, b: int, c: int, d: int) -> "QuadraticSurd":
        """Exact image ``(a x + b) / (c x + d)`` for an integer matrix with ``ad - bc != 0``."""
        det = a * d - b * c
        if det == 0:
            raise ValueError("singular Mobius matrix")
        P, D, Q = self.P, self.D, self.Q
        U, V = a * P + b * Q, c * P + d * Q
        X = U * V - a * c * D
        Y = det * Q
        Z = V * V - c * c * D
        s = _sign(Y)
        return QuadraticSurd(s * X, Y * Y * D, s * Z)

    def real(self) -> Real:
        return (Real.of(self.P) + Real.of(self.D).sqrt()) / self.Q

    def __float__(self) -> float:
        return float(surd_enclose(self, Fraction(1, 10**20)).mid)

    def to_json(self) -> dict:
        return {"P": str(self.P), "D": str(self.D), "Q": str(self.Q)}

    def __repr__(self) -> str:
        return f"QuadraticSurd(({self.P} + sqrt({self.D}))/{self.Q})"


def compare_surds(x: QuadraticSurd, y: QuadraticSurd) -> int:
    """Exact sign of ``x - y``."""
    if x == y:
        return 0
    width = Fraction(1, 2)
    while True:
        ex, ey = surd_enclose(x, width), surd_enclose(y, width)
        if ex.hi < ey.lo:
            return -1
        if ey.hi < ex.lo:
            return 1
        width /= 1 << 32


def surd_enclose(s: QuadraticSurd, width_bound) -> RationalEnclosure:
    """Enclosure of ``s`` of width at most ``width_bound``.

    ``sqrt(D)`` is bracketed by ``isqrt(D m^2) / m`` and its successor, with
    ``m`` chosen so the final width is ``1 / (m |Q|)``.
    """
    width_bound = as_fraction(width_bound)
    if width_bound <= 0:
        raise ValueError("width bound must be positive")
    m = math.ceil(1 / (width_bound * abs(s.Q)))
    r = math.isqrt(s.D * m * m)
    lo = (s.P + Fraction(r, m)) / s.Q
    hi = (s.P + Fraction(r + 1, m)) / s.Q
    return RationalEnclosure.spanning(lo, hi)


def primitive_period(word: Sequence[int]) -> tuple[int, ...]:
    """Shortest word whose power is ``word``."""
    word = tuple(word)
    n = len(word)
    for d in range(1, n):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


@dataclass(frozen=True)
class PeriodicExpansion:
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        object.__setattr__(self, "period", primitive_period(self.period))

    def stream(self) -> PartialQuotientStream:
        return PartialQuotientStream.periodic(self.preperiod, self.period)

    def terms(self, count: int) -> list[int]:
        out = list(self.preperiod[:count])
        i = 0
        while len(out) < count:
            out.append(self.period[i % len(self.period)])
            i += 1
        return out


def expand_surd(s: QuadraticSurd) -> PeriodicExpansion:
    """Preperiod and primitive period of the continued fraction of ``s``."""
    D = s.D
    if _is_square(D):
        raise ValueError("rational input")
    r = math.isqrt(D)
    P, Q = s.P, s.Q
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(terms)
        a = (P + r) // Q if Q > 0 else (-P - r - 1) // (-Q)
        terms.append(a)
        P = a * Q - P
        num = D - P * P
        if num % Q:
            raise ArithmeticError("orbit left the Q | D - P^2 lattice")
        Q = num // Q
    start = seen[(P, Q)]
    return PeriodicExpansion(tuple(terms[:start]), tuple(terms[start:]))


def _word_matrix(word: Sequence[int]) -> tuple[int, int, int, int]:
    """``[[p, p'], [q, q']]`` = product of ``[[a, 1], [1, 0]]`` over the word."""
    table = table_from_quotients(word)
    m = table.depth
    return table.p(m), table.p(m - 1), table.q(m), table.q(m - 1)


def purely_periodic_value(block: Sequence[int]) -> QuadraticSurd:
    """The surd ``x = [B; x]`` for a block ``B`` of positive quotients."""
    if not block:
        raise ValueError("block must be nonempty")
    if any(b < 1 for b in block):
        raise ValueError("block entries must be positive")
    p, p1, q, q1 = _word_matrix(block)
    # x = (p x + p1) / (q x + q1)  =>  q x^2 + (q1 - p) x - p1 = 0, positive root
    disc = (q1 - p) ** 2 + 4 * q * p1
    return QuadraticSurd(p - q1, disc, 2 * q)


def tail_periodicize(prefix: Sequence[int], block: Sequence[int]) -> QuadraticSurd:
    """The surd ``[prefix, block, block, ...]``."""
    alpha = purely_periodic_value(block)
    if not prefix:
        return alpha
    if any(a < 1 for a in prefix[1:]) or prefix[0] < 0:
        raise ValueError("invalid prefix quotients")
    p, p1, q, q1 = _word_matrix(prefix)
    return alpha.mobius(p, p1, q, q1)
