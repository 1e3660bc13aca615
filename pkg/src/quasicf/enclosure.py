"""Exact rational intervals and certified real numbers.

``RationalEnclosure`` is a closed interval with ``Fraction`` endpoints; all
arithmetic on it is exact. ``Real`` represents a real number by a rule that
returns outward-rounded binary intervals at any requested precision (backed by
mpmath's ``libmpi``), so transcendental quantities such as logarithms can be
bracketed and compared with a certificate instead of a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Union

from mpmath.libmp import from_rational, libmpi, round_ceiling, round_floor, to_rational

__all__ = [
    "RationalEnclosure",
    "Real",
    "Undecided",
    "as_fraction",
    "iroot",
    "ceil_root",
    "format_rational",
    "parse_rational",
]

RationalLike = Union[int, Fraction]

DEFAULT_START_PREC = 64
DEFAULT_MAX_PREC = 1 << 15


class Undecided(ArithmeticError):
    """Raised when a certified comparison is still ambiguous at the precision cap."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def parse_rational(text: str) -> Fraction:
    """Parse ``"7/10"``, ``"-3"`` or ``"0.3333"`` into an exact Fraction."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    return Fraction(text)


def format_rational(x: RationalLike) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def iroot(x: int, n: int) -> int:
    """Floor of the real n-th root of a non-negative integer."""
    if x < 0 or n < 1:
        raise ValueError("iroot needs x >= 0 and n >= 1")
    if x < 2 or n == 1:
        return x
    guess = 1 << -(-x.bit_length() // n)
    while True:
        nxt = ((n - 1) * guess + x // guess ** (n - 1)) // n
        if nxt >= guess:
            break
        guess = nxt
    while guess**n > x:
        guess -= 1
    while (guess + 1) ** n <= x:
        guess += 1
    return guess


def ceil_root(x: Fraction, n: int) -> int:
    """Smallest integer m >= 0 with m**n >= x, for rational x >= 0."""
    x = Fraction(x)
    if x <= 0:
        return 0
    m = iroot(x.numerator // x.denominator, n)
    while m**n * x.denominator < x.numerator:
        m += 1
    return m


@dataclass(frozen=True)
class RationalEnclosure:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty enclosure: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: RationalLike) -> "RationalEnclosure":
        x = as_fraction(x)
        return cls(x, x)

    @classmethod
    def spanning(cls, *values: RationalLike) -> "RationalEnclosure":
        vals = [as_fraction(v) for v in values]
        return cls(min(vals), max(vals))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, RationalEnclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        x = as_fraction(x)
        return self.lo <= x <= self.hi

    def hull(self, other: "RationalEnclosure") -> "RationalEnclosure":
        return RationalEnclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def _coerce(self, other) -> "RationalEnclosure":
        if isinstance(other, RationalEnclosure):
            return other
        return RationalEnclosure.point(other)

    def __add__(self, other):
        o = self._coerce(other)
        return RationalEnclosure(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RationalEnclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalEnclosure(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalEnclosure":
        if not self.excludes_zero():
            raise ZeroDivisionError("enclosure contains zero")
        return RationalEnclosure(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RationalEnclosure(Fraction(0), max(-self.lo, self.hi))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are exact")
        if n == 0:
            return RationalEnclosure.point(1)
        if n % 2 == 1 or self.lo >= 0:
            cands = (self.lo**n, self.hi**n)
            return RationalEnclosure(min(cands), max(cands))
        a = abs(self)
        return RationalEnclosure(a.lo**n, a.hi**n)

    def certainly_lt(self, x) -> bool:
        return self.hi < as_fraction(x) if not isinstance(x, RationalEnclosure) else self.hi < x.lo

    def certainly_le(self, x) -> bool:
        return self.hi <= as_fraction(x) if not isinstance(x, RationalEnclosure) else self.hi <= x.lo

    def certainly_gt(self, x) -> bool:
        return self.lo > as_fraction(x) if not isinstance(x, RationalEnclosure) else self.lo > x.hi

    def to_json(self) -> dict:
        return {"lo": format_rational(self.lo), "hi": format_rational(self.hi)}

    @classmethod
    def from_json(cls, obj: dict) -> "RationalEnclosure":
        return cls(parse_rational(obj["lo"]), parse_rational(obj["hi"]))

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"RationalEnclosure({format_rational(self.lo)}, {format_rational(self.hi)})"


# -- certified reals -------------------------------------------------------

_MPI = tuple  # (mpf, mpf) pair in libmp raw format
_GUARD = 16


def _mpi_from_fraction(x: Fraction, prec: int) -> _MPI:
    p, q = x.numerator, x.denominator
    return (from_rational(p, q, prec, round_floor), from_rational(p, q, prec, round_ceiling))


def _enclosure_from_mpi(iv: _MPI) -> RationalEnclosure:
    lo = Fraction(*map(int, to_rational(iv[0])))
    hi = Fraction(*map(int, to_rational(iv[1])))
    return RationalEnclosure(lo, hi)


class Real:
    """A real number known through certified interval enclosures.

    ``rule(prec)`` must return an mpmath interval (pair of raw mpf values)
    containing the number, whose width shrinks as ``prec`` grows. When the
    value is known to be rational, ``exact`` carries it and every operation
    short-circuits to exact arithmetic.
    """

    __slots__ = ("_rule", "exact", "label", "_cache")

    def __init__(self, rule: Callable[[int], _MPI] | None = None, exact: Fraction | None = None, label: str = ""):
        if rule is None and exact is None:
            raise ValueError("Real needs a rule or an exact value")
        self.exact = None if exact is None else as_fraction(exact)
        if rule is None:
            value = self.exact
            rule = lambda prec: _mpi_from_fraction(value, prec)  # noqa: E731
        self._rule = rule
        self.label = label
        self._cache: dict[int, _MPI] = {}

    @classmethod
    def of(cls, x) -> "Real":
        if isinstance(x, Real):
            return x
        return cls(exact=as_fraction(x), label=format_rational(as_fraction(x)))

    def mpi(self, prec: int) -> _MPI:
        iv = self._cache.get(prec)
        if iv is None:
            iv = self._rule(prec)
            self._cache[prec] = iv
        return iv

    def enclose(self, prec: int = DEFAULT_START_PREC) -> RationalEnclosure:
        if self.exact is not None:
            return RationalEnclosure.point(self.exact)
        return _enclosure_from_mpi(self.mpi(prec))

    def within(self, width, max_prec: int = DEFAULT_MAX_PREC) -> RationalEnclosure:
        """Enclosure of width at most ``width``, raising precision as needed."""
        width = as_fraction(width)
        if width <= 0:
            raise ValueError("width must be positive")
        prec = DEFAULT_START_PREC
        while True:
            enc = self.enclose(prec)
            if enc.width <= width:
                return enc
            if prec >= max_prec:
                raise Undecided(f"could not reach width {width} for {self.label or 'real'}")
            prec *= 2

    def sign(self, max_prec: int = DEFAULT_MAX_PREC) -> int:
        if self.exact is not None:
            return (self.exact > 0) - (self.exact < 0)
        prec = DEFAULT_START_PREC
        while True:
            enc = self.enclose(prec)
            if enc.lo > 0:
                return 1
            if enc.hi < 0:
                return -1
            if prec >= max_prec:
                raise Undecided(f"sign of {self.label or 'real'} not decided at {max_prec} bits")
            prec *= 2

    def compare(self, other, max_prec: int = DEFAULT_MAX_PREC) -> int:
        return (self - Real.of(other)).sign(max_prec)

    def __float__(self) -> float:
        return float(self.enclose(DEFAULT_START_PREC).mid)

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"Real({format_rational(self.exact)})"
        return f"Real({self.label or float(self)!r})"

    # arithmetic ------------------------------------------------------------

    def _binary(self, other, exact_op, mpi_op, sym: str) -> "Real":
        other = Real.of(other)
        if self.exact is not None and other.exact is not None:
            return Real.of(exact_op(self.exact, other.exact))
        a, b = self, other
        return Real(lambda prec: mpi_op(a.mpi(prec + _GUARD), b.mpi(prec + _GUARD), prec),
                    label=f"({a.label}{sym}{b.label})")

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y, libmpi.mpi_add, "+")

    def __radd__(self, other):
        return Real.of(other) + self

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y, libmpi.mpi_sub, "-")

    def __rsub__(self, other):
        return Real.of(other) - self

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y, libmpi.mpi_mul, "*")

    def __rmul__(self, other):
        return Real.of(other) * self

    def __truediv__(self, other):
        other = Real.of(other)
        if other.sign() == 0:
            raise ZeroDivisionError("division by an exact zero")
        return self._binary(other, lambda x, y: x / y, libmpi.mpi_div, "/")

    def __rtruediv__(self, other):
        return Real.of(other) / self

    def __neg__(self):
        if self.exact is not None:
            return Real.of(-self.exact)
        a = self
        return Real(lambda prec: libmpi.mpi_neg(a.mpi(prec)), label=f"-{a.label}")

    def log(self) -> "Real":
        if self.sign() <= 0:
            raise ValueError("logarithm of a non-positive real")
        if self.exact == 1:
            return Real.of(0)
        a = self

        def rule(prec):
            iv = a.mpi(prec + _GUARD)
            # tighten until the argument interval is strictly positive
            p = prec + _GUARD
            while not _positive(iv):
                p *= 2
                iv = a.mpi(p)
            return libmpi.mpi_log(iv, prec)

        return Real(rule, label=f"log({a.label})")

    def exp(self) -> "Real":
        if self.exact == 0:
            return Real.of(1)
        a = self
        return Real(lambda prec: libmpi.mpi_exp(a.mpi(prec + _GUARD), prec), label=f"exp({a.label})")

    def sqrt(self) -> "Real":
        if self.exact is not None:
            x = self.exact
            if x < 0:
                raise ValueError("square root of a negative rational")
            rn, rd = iroot(x.numerator, 2), iroot(x.denominator, 2)
            if rn * rn == x.numerator and rd * rd == x.denominator:
                return Real.of(Fraction(rn, rd))
        a = self
        return Real(lambda prec: libmpi.mpi_sqrt(a.mpi(prec + _GUARD), prec), label=f"sqrt({a.label})")

    def __pow__(self, exponent):
        """Real power ``self ** exponent`` for a positive base."""
        exponent = Real.of(exponent)
        if exponent.exact is not None:
            e = exponent.exact
            if e.denominator == 1 and e.numerator >= 0 and self.exact is not None:
                return Real.of(self.exact ** e.numerator)
            if self.exact is not None and self.exact > 0:
                exact = rational_power(self.exact, e)
                if exact is not None:
                    return Real.of(exact)
        return (exponent * self.log()).exp()


def _positive(iv: _MPI) -> bool:
    lo = to_rational(iv[0])
    return lo[0] > 0


def rational_power(base: Fraction, exponent: Fraction) -> Fraction | None:
    """``base ** exponent`` when the result is rational, else None."""
    base, exponent = as_fraction(base), as_fraction(exponent)
    if base <= 0:
        return None
    u, v = exponent.numerator, exponent.denominator
    num, den = base.numerator, base.denominator
    # a non-trivial v-th power needs at least 2**v
    if v > 1 and ((num > 1 and num.bit_length() <= v) or (den > 1 and den.bit_length() <= v)):
        return None
    rn, rd = iroot(num, v), iroot(den, v)
    if rn**v != num or rd**v != den:
        return None
    return Fraction(rn, rd) ** u
