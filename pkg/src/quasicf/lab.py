"""Exact reproduction of the approximation inequalities behind the criteria.

Everything here is certified with exact integers or rational enclosures. The
implied constants of asymptotic bounds are never asserted: they are reported
as measured ratios (on a log scale, as floats) next to the exact data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .cf import (
    PartialQuotientStream,
    canonical_word,
    check_proximity,
    continuant,
    expand_rational,
)
from .enclosure import RationalEnclosure, as_fraction, format_rational
from .qpspec import QuasiPeriodicSpec, StageInfo, generate
from .surd import (
    PeriodicExpansion,
    QuadraticSurd,
    purely_periodic_value,
    surd_enclose,
    tail_periodicize,
)

__all__ = [
    "NoDisagreement",
    "Indeterminate",
    "ApproxQuadruple",
    "B123Report",
    "EpsilonPoint",
    "AuxPolynomial",
    "FormProductReport",
    "PkReport",
    "Amel4Report",
    "XiSource",
    "quadruple",
    "check_b1_b2_b3",
    "epsilon_decay",
    "aux_polynomial",
    "j_select",
    "pk_exponent_report",
    "amel1_forms",
    "amel3_forms",
    "amel4_chain",
    "run_check",
    "CHECKS",
]

MAX_REFINEMENTS = 12


class NoDisagreement(LookupError):
    """No index ``j < n_k`` with ``a_j != a_{j + r_k}``: the prefix looks periodic."""


class Indeterminate(ArithmeticError):
    """An enclosure could not be refined enough to decide an inequality."""


def _log(x) -> float:
    """Natural log of a positive rational, safe for huge numerators and denominators."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("log of a non-positive number")
    return math.log(x.numerator) - math.log(x.denominator)


def _enc_json(e: RationalEnclosure) -> dict:
    return e.to_json()


def _min_abs(e: RationalEnclosure) -> Fraction:
    if e.lo > 0:
        return e.lo
    if e.hi < 0:
        return -e.hi
    return Fraction(0)


def _tight(e: RationalEnclosure, bits: int = 16) -> bool:
    """Nonzero with relative width at most ``2^-bits``."""
    m = _min_abs(e)
    return m > 0 and e.width * (1 << bits) <= m


class XiSource:
    """Convergents and enclosures of the limit of a spec, from one cached stream."""

    def __init__(self, spec: QuasiPeriodicSpec):
        self.spec = spec
        self.stream: PartialQuotientStream = generate(spec, 0)

    def quotients(self, n: int) -> list[int]:
        return self.stream.prefix(n)

    def convergents_at(self, indices) -> dict[int, tuple[int, int]]:
        """``{n: (p_n, q_n)}`` for the requested indices (``-1`` and ``-2`` allowed)."""
        wanted = set(indices)
        out = {i: v for i, v in {-2: (0, 1), -1: (1, 0)}.items() if i in wanted}
        top = max(wanted)
        p1, p2, q1, q2 = 1, 0, 0, 1
        for n in range(top + 1):
            a = self.stream[n]
            p1, p2 = a * p1 + p2, p1
            q1, q2 = a * q1 + q2, q1
            if n in wanted:
                out[n] = (p1, q1)
        return out

    def enclosure(self, width) -> RationalEnclosure:
        """Two consecutive convergents with ``1/(q_n q_{n+1}) <= width``."""
        width = as_fraction(width)
        target = math.ceil(1 / width)
        bits = target.bit_length()
        p1, p2, q1, q2 = 1, 0, 0, 1
        n = 0
        while True:
            a = self.stream[n]
            p1, p2 = a * p1 + p2, p1
            q1, q2 = a * q1 + q2, q1
            # cheap bit-length screen before the exact product comparison
            if n > 0 and q1.bit_length() + q2.bit_length() >= bits and q1 * q2 >= target:
                return RationalEnclosure.spanning(Fraction(p2, q2), Fraction(p1, q1))
            n += 1


def _refine(xi: XiSource, start_width: Fraction, compute: Callable[[RationalEnclosure], Any],
            decided: Callable[[Any], bool], rounds: int = MAX_REFINEMENTS):
    """Shrink the enclosure of xi (squaring the width each round) until ``decided``."""
    w = min(as_fraction(start_width), Fraction(1, 1 << 16))
    result = None
    for _ in range(rounds):
        result = compute(xi.enclosure(w))
        if decided(result):
            return result, w, True
        w = min(w * w, w / (1 << 64))
    return result, w, False


def _stage(spec: QuasiPeriodicSpec, k: int) -> StageInfo:
    return spec.stage(k)


# -- quadruples and (b1)-(b3) ------------------------------------------------------


@dataclass(frozen=True)
class ApproxQuadruple:
    k: int
    n: int
    r: int
    lam: int
    N: int
    Q: int
    Qp: int
    P: int
    Pp: int
    S: int
    block: tuple[int, ...]
    alpha: QuadraticSurd
    mirror_word: tuple[int, ...]

    def check_invariants(self) -> bool:
        return (
            self.Q > self.Qp >= 1
            and math.gcd(self.P, self.Q) == 1
            and self.P * self.Qp - self.Pp * self.Q == (-1) ** (self.N - 1)
        )

    def mirror_ok(self, header: Sequence[int]) -> bool:
        """Q/Q' expands as lam copies of the reversed block, then a_{n-1}, ..., a_1."""
        rev = tuple(reversed(self.block))
        expected = canonical_word(list(rev * self.lam) + list(reversed(header[1 : self.n])))
        return tuple(expand_rational(self.Q, self.Qp)) == tuple(expected) == self.mirror_word

    def to_json(self) -> dict:
        return {
            "k": self.k, "n_k": self.n, "r_k": self.r, "lambda_k": str(self.lam), "N": self.N,
            "Q": str(self.Q), "Qp": str(self.Qp), "P": str(self.P), "Pp": str(self.Pp), "S": str(self.S),
            "block": [str(b) for b in self.block], "alpha": self.alpha.to_json(),
        }


def quadruple(spec: QuasiPeriodicSpec, k: int, xi: XiSource | None = None) -> ApproxQuadruple:
    """``Q = q_N, Q' = q_{N-1}, P = p_N, P' = p_{N-1}`` with ``N = n_k + lambda_k r_k - 1``.

    ``alpha`` is the purely periodic number with period the *reversed* stage
    block and ``S = s_{r lambda - 1}`` is the matching convergent denominator
    of ``alpha``.
    """
    info = _stage(spec, k)
    N = info.end - 1
    if N < 2:
        raise ValueError(f"stage {k} ends at index {N}; need N >= 2")
    xi = xi or XiSource(spec)
    cv = xi.convergents_at((N - 1, N))
    (Pp, Qp), (P, Q) = cv[N - 1], cv[N]
    rev = tuple(reversed(info.block))
    alpha = purely_periodic_value(rev)
    m = info.r * info.lam
    alpha_terms = PeriodicExpansion((), rev).terms(m)
    S = continuant(alpha_terms[1:m])
    word = tuple(canonical_word(list(reversed(xi.quotients(N)[1 : N + 1]))))
    return ApproxQuadruple(k, info.n, info.r, info.lam, N, Q, Qp, P, Pp, S, info.block, alpha, word)


@dataclass
class B123Report:
    k: int
    b1: bool | None
    b1_prime: bool | None
    b2: bool | None
    b3: bool | None
    forms: list[RationalEnclosure]
    product: RationalEnclosure | None
    bound: Fraction
    bb_gap: RationalEnclosure
    xi_width: Fraction
    alpha_width: Fraction
    approx_bb_gap: float = 0.0

    @property
    def certified(self) -> bool:
        return self.b1 is True and self.b1_prime is True and self.b2 is True and self.b3 is True

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "b1": self.b1, "b1_prime": self.b1_prime, "b2": self.b2, "b3": self.b3,
            "certified": self.certified,
            "forms": [_enc_json(e) for e in self.forms],
            "product": None if self.product is None else _enc_json(self.product),
            "product_bound": format_rational(self.bound),
            "bb_gap": _enc_json(self.bb_gap),
            "approx_bb_gap": self.approx_bb_gap,
            "xi_width": format_rational(self.xi_width),
            "alpha_width": format_rational(self.alpha_width),
        }


def _strict_below(e: RationalEnclosure, bound: Fraction) -> bool | None:
    if e.hi < bound:
        return True
    if e.lo >= bound:
        return False
    return None


def check_b1_b2_b3(q: ApproxQuadruple, spec: QuasiPeriodicSpec, alpha: QuadraticSurd | None = None,
                   xi: XiSource | None = None) -> B123Report:
    """Certify ``|Q xi - P| < 1/Q``, ``|Q' xi - P'| < 1/Q'``, ``|Q' alpha - Q| < Q'/S^2``
    and ``|xi Q - P| |xi Q' - P'| |alpha Q' - Q| Q < 1/S^2``.

    Enclosures start at width ``1/(10 S^2)`` and are refined until every
    inequality is decided; an undecided inequality is reported as None.
    """
    alpha = alpha if alpha is not None else q.alpha
    xi = xi or XiSource(spec)
    bound = Fraction(1, q.S * q.S)

    def alpha_form(w):
        return abs(surd_enclose(alpha, w) * q.Qp - q.Q)

    aw = Fraction(1, 10 * q.S * q.S)
    l3 = alpha_form(aw)
    b2 = _strict_below(l3, Fraction(q.Qp, q.S * q.S))
    for _ in range(MAX_REFINEMENTS):
        if b2 is not None and _tight(l3, 8):
            break
        aw = min(aw * aw, aw / (1 << 64))
        l3 = alpha_form(aw)
        b2 = _strict_below(l3, Fraction(q.Qp, q.S * q.S))

    def compute(enc):
        l1 = abs(enc * q.Q - q.P)
        l2 = abs(enc * q.Qp - q.Pp)
        prod = l1 * l2 * l3 * q.Q
        return l1, l2, prod

    def decided(res):
        l1, l2, prod = res
        return (_strict_below(l1, Fraction(1, q.Q)) is not None
                and _strict_below(l2, Fraction(1, q.Qp)) is not None
                and _strict_below(prod, bound) is not None)

    (l1, l2, prod), xw, _ = _refine(xi, Fraction(1, 10 * q.S * q.S), compute, decided)
    gap = abs(surd_enclose(alpha, aw) - Fraction(q.Q, q.Qp))
    return B123Report(
        q.k,
        _strict_below(l1, Fraction(1, q.Q)),
        _strict_below(l2, Fraction(1, q.Qp)),
        b2,
        _strict_below(prod, bound),
        [l1, l2, l3, RationalEnclosure.point(q.Q)],
        prod,
        bound,
        gap,
        xw,
        aw,
        float(gap.mid),
    )


@dataclass(frozen=True)
class EpsilonPoint:
    k: int
    measured: float
    predicted: float
    s_lower_ok: bool
    q_upper_ok: bool

    @property
    def holds(self) -> bool:
        return self.s_lower_ok and self.q_upper_ok and self.measured >= self.predicted

    def to_json(self) -> dict:
        return {"k": self.k, "measured": self.measured, "predicted": self.predicted,
                "S_squared_ge_2_pow": self.s_lower_ok, "Q_le_M_plus_1_pow": self.q_upper_ok,
                "holds": self.holds}


def epsilon_decay(series: Sequence[ApproxQuadruple], M: int) -> list[EpsilonPoint]:
    """Exponents ``2 log S / log Q`` against ``2 (log sqrt2 / log(M+1)) (r lam - 2)/(n + r lam)``.

    The two exact facts ``S^2 >= 2^(r lam - 2)`` and ``Q <= (M+1)^(n + r lam)``
    imply measured >= predicted; both are checked with integers.
    """
    if not series:
        raise ValueError("series must be nonempty")
    if M < 1:
        raise ValueError("M must be positive")
    out = []
    for q in series:
        m = q.r * q.lam
        s_ok = m < 2 or q.S * q.S >= 1 << (m - 2)
        q_ok = q.Q <= (M + 1) ** (q.n + m)
        measured = 2 * math.log(q.S) / math.log(q.Q)
        predicted = 2 * (math.log(2) / 2 / math.log(M + 1)) * (m - 2) / (q.n + m)
        out.append(EpsilonPoint(q.k, measured, predicted, s_ok, q_ok))
    return out


# -- auxiliary polynomials -----------------------------------------------------


def j_select(spec: QuasiPeriodicSpec, k: int, xi: XiSource | None = None) -> int:
    """Largest ``j < n_k`` with ``a_j != a_{j + r_k}``."""
    info = _stage(spec, k)
    xi = xi or XiSource(spec)
    a = xi.quotients(info.n + info.r)
    for j in range(info.n - 1, -1, -1):
        if a[j] != a[j + info.r]:
            return j
    raise NoDisagreement(f"no disagreement below n_{k} = {info.n}: prefix looks periodic")


@dataclass(frozen=True)
class AuxPolynomial:
    k: int
    variant: str
    c2: int
    c1: int
    c0: int
    indices: tuple[int, int, int, int]
    xi_k: QuadraticSurd

    @property
    def coeffs(self) -> tuple[int, int, int]:
        return (self.c2, self.c1, self.c0)

    def root_check(self) -> bool:
        return self.xi_k.is_root_of(self.coeffs)

    def to_json(self) -> dict:
        return {"k": self.k, "variant": self.variant, "c2": str(self.c2), "c1": str(self.c1),
                "c0": str(self.c0), "indices": list(self.indices), "xi_k": self.xi_k.to_json(),
                "root_check": self.root_check()}


def _xi_k(spec: QuasiPeriodicSpec, info: StageInfo, xi: XiSource) -> QuadraticSurd:
    prefix = xi.quotients(info.n - 1) if info.n > 0 else []
    return tail_periodicize(prefix[: info.n], info.block)


def aux_polynomial(spec: QuasiPeriodicSpec, k: int, variant: str = "amel1",
                   xi: XiSource | None = None) -> AuxPolynomial:
    """Quadratic with root ``xi_k``, built from four convergents.

    ``amel1`` uses indices ``(n-2, n-1, n+r-2, n+r-1)``; ``amel3`` uses
    ``(j-1, j, j+r-1, j+r)`` with ``j`` from :func:`j_select`.
    """
    info = _stage(spec, k)
    xi = xi or XiSource(spec)
    if variant == "amel1":
        a, b, c, d = info.n - 2, info.n - 1, info.n + info.r - 2, info.n + info.r - 1
    elif variant == "amel3":
        j = j_select(spec, k, xi)
        a, b, c, d = j - 1, j, j + info.r - 1, j + info.r
    else:
        raise ValueError("variant must be 'amel1' or 'amel3'")
    cv = xi.convergents_at((a, b, c, d))
    (pa, qa), (pb, qb), (pc, qc), (pd, qd) = cv[a], cv[b], cv[c], cv[d]
    c2 = qa * qd - qb * qc
    c1 = -(qa * pd - qb * pc + pa * qd - pb * qc)
    c0 = pa * pd - pb * pc
    if c2 == 0:
        raise ArithmeticError(f"degenerate leading coefficient at stage {k}")
    poly = AuxPolynomial(k, variant, c2, c1, c0, (a, b, c, d), _xi_k(spec, info, xi))
    if not poly.root_check():
        raise AssertionError(f"P_k(xi_k) != 0 at stage {k} ({variant})")
    return poly


@dataclass
class PkReport:
    k: int
    variant: str
    poly: AuxPolynomial
    value: RationalEnclosure
    certified: bool
    pair: tuple[int, int]
    K: int
    big_index: int
    continuant_bound: bool
    approx_log_value: float
    approx_log_pair: float
    exponent: float
    d: int | None = None
    exceeds_d: bool | None = None

    def to_json(self) -> dict:
        return {
            "k": self.k, "variant": self.variant, "polynomial": self.poly.to_json(),
            "abs_P_xi": _enc_json(self.value), "certified": self.certified,
            "pair_indices": list(self.pair), "K_k": str(self.K), "big_index": self.big_index,
            "continuant_bound": self.continuant_bound,
            "approx_log_abs_P_xi": self.approx_log_value, "approx_log_pair_product": self.approx_log_pair,
            "liouville_exponent": self.exponent, "d": self.d, "exponent_below_minus_d": self.exceeds_d,
        }


def pk_exponent_report(spec: QuasiPeriodicSpec, k: int, variant: str = "amel1", d: int | None = None,
                       xi: XiSource | None = None) -> PkReport:
    """Certified ``|P_k(xi)|``, the continuant lower bound on the big denominator and the
    exponent ``log |P_k(xi)| / log(q_a q_b)``.

    ``P_k(xi) = (xi - xi_k)(c2 (xi + xi_k) + c1)`` since ``P_k(xi_k) = 0``, which
    avoids cancellation between the large coefficients.
    """
    info = _stage(spec, k)
    xi = xi or XiSource(spec)
    poly = aux_polynomial(spec, k, variant, xi)
    K = continuant(info.block)
    if variant == "amel1":
        pair = (info.n - 1, info.n + info.r - 1)
        big = info.n + info.lam * info.r - 1
        cv = xi.convergents_at(pair + (big,))
        # q_{n + lam r - 1} >= q_{n-1} K^lam
        bound_ok = cv[big][1] >= cv[pair[0]][1] * K**info.lam
    else:
        j = poly.indices[1]
        pair = (j, j + info.r)
        big = j + info.lam * info.r
        cv = xi.convergents_at(pair + (big,))
        # q_{j + lam r} >= q_j (K/2)^lam
        bound_ok = 2**info.lam * cv[big][1] >= cv[pair[0]][1] * K**info.lam
    qbig = cv[big][1]
    xk = poly.xi_k

    def compute(enc):
        sw = enc.width / 4 if enc.width > 0 else Fraction(1, 1 << 64)
        s = surd_enclose(xk, sw)
        return abs((enc - s) * (poly.c2 * (enc + s) + poly.c1))

    value, _, ok = _refine(xi, Fraction(1, qbig * qbig * (1 << 32)), compute, _tight)
    log_value = _log(value.mid) if value.mid > 0 else float("-inf")
    log_pair = math.log(cv[pair[0]][1]) + math.log(cv[pair[1]][1])
    exponent = log_value / log_pair if log_pair > 0 else float("-inf")
    return PkReport(k, variant, poly, value, ok, pair, K, big, bound_ok, log_value, log_pair, exponent,
                    d, None if d is None else exponent < -d)


# -- linear forms ------------------------------------------------------------------


@dataclass
class FormProductReport:
    k: int
    variant: str
    z: tuple[int, int, int, int]
    forms: list[RationalEnclosure]
    product: RationalEnclosure
    certified: bool
    comparisons: dict[str, Any] = field(default_factory=dict)
    eta: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "k": self.k, "variant": self.variant, "z": [str(x) for x in self.z],
            "forms": [_enc_json(e) for e in self.forms], "product": _enc_json(self.product),
            "certified": self.certified, "eta": None if self.eta is None else format_rational(self.eta),
            "comparisons": self.comparisons,
        }


def _product(forms: Sequence[RationalEnclosure]) -> RationalEnclosure:
    out = RationalEnclosure.point(1)
    for f in forms:
        out = out * abs(f)
    return out


def amel1_forms(q: ApproxQuadruple, spec: QuasiPeriodicSpec, xi: XiSource | None = None) -> FormProductReport:
    """``L1 = xi Q - P``, ``L2 = xi Q' - P'``, ``L3 = alpha Q' - Q``, ``L4 = Q`` and ``Pi < 1/S^2``."""
    xi = xi or XiSource(spec)
    rep = check_b1_b2_b3(q, spec, xi=xi)
    forms = rep.forms
    prod = _product(forms)
    bound = Fraction(1, q.S * q.S)
    log_q = math.log(q.Q)
    return FormProductReport(
        q.k, "amel1", (q.Q, q.Qp, q.P, q.Pp), forms, prod, prod.hi < bound,
        {
            "bound": format_rational(bound),
            "b1": rep.b1, "b1_prime": rep.b1_prime, "b2": rep.b2,
            "L4_equals_Q": forms[3].is_point and forms[3].lo == q.Q,
            "approx_log_Pi_over_log_Q": _log(prod.hi) / log_q,
        },
    )


def amel3_forms(spec: QuasiPeriodicSpec, k: int, eta=Fraction(1, 10), xi: XiSource | None = None) -> FormProductReport:
    """The four forms on ``z_k`` and ``Pi`` against ``(q_j q_{j+r})^{2+eta} q_{j+lam r}^{-2}``.

    All four values are enclosed independently from the same enclosure of xi.
    """
    eta = as_fraction(eta)
    info = _stage(spec, k)
    xi = xi or XiSource(spec)
    poly = aux_polynomial(spec, k, "amel3", xi)
    a, b, c, d = poly.indices  # j-1, j, j+r-1, j+r
    j = b
    big = j + info.lam * info.r
    cv = xi.convergents_at((a, b, c, d, big))
    (pa, qa), (pb, qb), (pc, qc), (pd, qd) = cv[a], cv[b], cv[c], cv[d]
    z1 = qa * qd - qb * qc
    z2 = qa * pd - qb * pc
    z3 = pa * qd - pb * qc
    z4 = pa * pd - pb * pc

    def compute(x):
        return [x * x * z1 - x * (z2 + z3) + z4, x * z1 - z2, x * z1 - z3, RationalEnclosure.point(z1)]

    def decided(fs):
        return all(_tight(f, 8) for f in fs)

    qbig = cv[big][1]
    forms, _, ok = _refine(xi, Fraction(1, (qbig * qbig * qd * qd) << 32), compute, decided)
    prod = _product(forms)
    log_pair = math.log(qb) + math.log(qd)
    log_ref = float(2 + eta) * log_pair - 2 * math.log(qbig)
    log_pi = _log(prod.mid) if prod.mid > 0 else float("-inf")
    return FormProductReport(
        k, "amel3", (z1, z2, z3, z4), forms, prod, ok,
        {
            "j_k": j,
            "L4_identity": z1 == qa * qd - qb * qc,
            "z1_le_qj_qjr": abs(z1) <= qb * qd,
            "approx_log_Pi": log_pi,
            "approx_log_reference": log_ref,
            "approx_log_ratio": log_pi - log_ref,
        },
        eta,
    )


# -- the position-based chain ---------------------------------------------------------


@dataclass
class Amel4Report:
    k: int
    n: int
    r: int
    lam: int
    N: int
    proximity: bool
    gap: RationalEnclosure
    bound: Fraction
    K: int
    split_lower: bool
    split_upper: bool
    power_lower: bool
    approx_log_two_power_ratio: float
    lam_over_log_q: float
    height: int
    height_bound: int
    d: int

    @property
    def height_ok(self) -> bool:
        return self.height <= self.height_bound

    def to_json(self) -> dict:
        return {
            "k": self.k, "n_k": self.n, "r_k": self.r, "lambda_k": str(self.lam), "N": self.N,
            "proximity_certified": self.proximity, "abs_xi_minus_xi_k": _enc_json(self.gap),
            "proximity_bound": format_rational(self.bound), "K_k": str(self.K),
            "split_lower": self.split_lower, "split_upper": self.split_upper,
            "power_lower": self.power_lower,
            "approx_log_two_power_ratio": self.approx_log_two_power_ratio,
            "lambda_over_log_q_n": self.lam_over_log_q, "height": str(self.height),
            "height_bound": str(self.height_bound), "height_ok": self.height_ok, "d": self.d,
        }


def amel4_chain(spec: QuasiPeriodicSpec, k: int, d: int = 2, xi: XiSource | None = None) -> Amel4Report:
    """Exact pieces of the chain ending in ``lambda_k << log q_{n_k}``.

    Certifies ``|xi - xi_k| <= q_N^-2`` with ``N = n + lam r - 1`` from the shared
    prefix, checks ``q_{n-1} K <= q_{n+r-1} <= 2 q_{n-1} K`` and
    ``q_N >= q_{n-1} K^lam`` exactly, compares the gap with
    ``q_{n-1}^-2 K^-2d 2^(-lam/2)`` as a measured log ratio and reports
    ``lam / log q_n`` and the height of ``xi_k`` against ``2 q_{n+r-1}^2``.
    """
    info = _stage(spec, k)
    n, r, lam = info.n, info.r, info.lam
    N = info.end - 1
    if N < 1:
        raise ValueError("stage too short for the proximity bound")
    xi = xi or XiSource(spec)
    xk = _xi_k(spec, info, xi)
    exp_k = PartialQuotientStream.periodic(xi.quotients(n - 1)[:n], info.block)
    cert = check_proximity(xi.stream, exp_k, N)
    cv = xi.convergents_at((n - 1, n, n + r - 1, N))
    q_prev, q_n, q_split, q_N = cv[n - 1][1], cv[n][1], cv[n + r - 1][1], cv[N][1]
    K = continuant(info.block)

    def compute(enc):
        return abs(enc - surd_enclose(xk, enc.width / 4 if enc.width else Fraction(1, 1 << 64)))

    gap, _, _ = _refine(xi, Fraction(1, (q_N * q_N) << 32), compute, _tight)
    log_ref = -2 * math.log(q_prev) - 2 * d * math.log(K) - lam / 2 * math.log(2)
    return Amel4Report(
        k, n, r, lam, N, cert.holds, gap, cert.bound, K,
        q_split >= q_prev * K, q_split <= 2 * q_prev * K, q_N >= q_prev * K**lam,
        _log(gap.mid) - log_ref,
        lam / math.log(q_n) if q_n > 1 else float("inf"),
        xk.height, 2 * q_split * q_split, d,
    )


# -- dispatch for the command line ----------------------------------------------------

CHECKS = ("b123", "forms-amel1", "forms-amel3", "pk", "amel4-chain", "quadruple")


def run_check(spec: QuasiPeriodicSpec, k: int, check: str, variant: str = "amel1",
              eta=Fraction(1, 10), d: int = 2) -> dict:
    """One stage of one lab check, as a JSON-ready record."""
    xi = XiSource(spec)
    try:
        if check == "quadruple":
            q = quadruple(spec, k, xi)
            return {"k": k, "check": check, "quadruple": q.to_json(), "invariants": q.check_invariants(),
                    "mirror": q.mirror_ok(xi.quotients(q.n))}
        if check == "b123":
            q = quadruple(spec, k, xi)
            return {"k": k, "check": check, "quadruple": q.to_json(),
                    "report": check_b1_b2_b3(q, spec, xi=xi).to_json()}
        if check == "forms-amel1":
            q = quadruple(spec, k, xi)
            return {"k": k, "check": check, "report": amel1_forms(q, spec, xi).to_json()}
        if check == "forms-amel3":
            return {"k": k, "check": check, "report": amel3_forms(spec, k, eta, xi).to_json()}
        if check == "pk":
            return {"k": k, "check": check, "report": pk_exponent_report(spec, k, variant, d, xi).to_json()}
        if check == "amel4-chain":
            return {"k": k, "check": check, "report": amel4_chain(spec, k, d, xi).to_json()}
    except (NoDisagreement, ValueError) as exc:
        return {"k": k, "check": check, "error": str(exc)}
    raise ValueError(f"unknown check {check!r}; expected one of {CHECKS}")
