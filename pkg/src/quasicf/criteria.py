"""Hypothesis certification for the quasi-periodic transcendence criteria.

Every criterion is a conjunction of named hypotheses. Each hypothesis is
decided symbolically from the schedule algebra when possible, otherwise from
finite data over the tail window of stages ``[ceil(K/2), K]``. A criterion
holds symbolically only when all of its hypotheses do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .cf import table_from_quotients
from .enclosure import RationalEnclosure, Real, as_fraction, format_rational
from .qpspec import (
    AsymptoticFacts,
    Limit,
    QuasiPeriodicSpec,
    periodicity_status,
    schedule_asymptotics,
)

__all__ = [
    "THEOREMS",
    "VERDICTS",
    "B_real",
    "B_of_A",
    "CriterionCertificate",
    "HorizonStats",
    "horizon_stats",
    "certify",
    "certificate_report",
]

THEOREMS = (
    "T2.1-baker0",
    "T2.2-baker1",
    "T2.3-baker2",
    "T3.1-amel4",
    "T3.2-amel1",
    "C3.3-amel2",
    "T3.4-amel3",
)
VERDICTS = ("holds-symbolically", "holds-at-horizon", "fails", "not-applicable")

PACKED_ONLY = {"T2.3-baker2", "C3.3-amel2", "T3.4-amel3"}
DEFAULT_EPSILON = Fraction(1, 100)
GROWTH_DEPTH_CAP = 2048
WITNESS_WIDTH = Fraction(1, 10**12)


def B_real(A: int) -> Real:
    """``B(A) = 2 log((A + sqrt(A^2 + 4)) / 2) / log(golden ratio) - 1`` as a certified real."""
    if int(A) != A or A < 2:
        raise ValueError("A must be an integer >= 2")
    A = int(A)
    top = ((Real.of(A) + Real.of(A * A + 4).sqrt()) / 2).log()
    phi = ((Real.of(1) + Real.of(5).sqrt()) / 2).log()
    return Real.of(2) * top / phi - 1


def B_of_A(A: int, width=Fraction(1, 10**9)) -> RationalEnclosure:
    return B_real(A).within(as_fraction(width))


@dataclass
class CriterionCertificate:
    theorem_id: str
    verdict: str
    witnesses: dict[str, Any]
    caveats: list[str]
    horizon: int
    window: tuple[int, int] | None

    def to_json(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "caveats": list(self.caveats),
            "horizon": self.horizon,
            "window": None if self.window is None else list(self.window),
        }

    @property
    def holds(self) -> bool:
        return self.verdict in ("holds-symbolically", "holds-at-horizon")


@dataclass
class HorizonStats:
    """Finite-horizon quantities over the tail window of stages."""

    requested: int
    computed: int
    truncated: str | None
    window: tuple[int, int] | None
    min_ratio: Fraction | None = None
    max_lam_over_n: Fraction | None = None
    max_r_over_n: Fraction | None = None
    amel_stat: list[float] = field(default_factory=list)
    baker_stat: list[float] = field(default_factory=list)
    growth_depth: int = 0
    growth_max_root: float | None = None
    growth_certified: bool | None = None

    def to_json(self) -> dict:
        def fr(x):
            return None if x is None else format_rational(x)

        return {
            "requested_horizon": self.requested,
            "computed_stages": self.computed,
            "truncated": self.truncated,
            "window": None if self.window is None else list(self.window),
            "min_lambda_ratio": fr(self.min_ratio),
            "max_lambda_over_n": fr(self.max_lam_over_n),
            "max_r_over_n": fr(self.max_r_over_n),
            "hypgenamel_statistic": self.amel_stat,
            "hypgen_statistic": self.baker_stat,
            "growth_depth": self.growth_depth,
            "approx_max_q_root": self.growth_max_root,
            "growth_bound_certified": self.growth_certified,
        }


def _rising(values: list[float]) -> bool:
    """Heuristic divergence signal: the window maximum is attained strictly at the end."""
    return len(values) >= 2 and all(v < values[-1] for v in values[:-1])


def horizon_stats(spec: QuasiPeriodicSpec, horizon: int, epsilon=DEFAULT_EPSILON) -> HorizonStats:
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    epsilon = as_fraction(epsilon)
    infos, truncated = spec.feasible_stages(horizon + 1)
    stats = HorizonStats(horizon, len(infos), truncated, None)
    K = min(horizon, len(infos) - 1)
    if K < 1:
        return stats
    lo = math.ceil(K / 2)
    stats.window = (lo, K)
    window = infos[lo : K + 1]
    stats.max_lam_over_n = max(Fraction(i.lam, i.n) for i in window)
    stats.max_r_over_n = max(Fraction(i.r, i.n) for i in window)
    ratios = [Fraction(infos[k + 1].lam, infos[k].lam) for k in range(lo, K)]
    if ratios:
        stats.min_ratio = min(ratios)
    power = float(epsilon) + 2 / 3
    for i in window:
        log_lam, n = math.log(i.lam), i.n
        stats.amel_stat.append(round(log_lam / n**power, 12))
        stats.baker_stat.append(round(log_lam * math.sqrt(math.log(n)) / n if n > 1 else 0.0, 12))

    # q_n <= (M+1)^n on the materialized prefix, with the measured maximum of q_n^(1/n)
    M = spec.quotient_bound()
    depth = min(window[-1].end, GROWTH_DEPTH_CAP)
    terms = []
    for a in spec.quotients():
        terms.append(a)
        if len(terms) > depth:
            break
    table = table_from_quotients(terms)
    bound, best, ok = 1, 0.0, True
    for n in range(1, table.depth + 1):
        bound *= M + 1
        q = table.q(n)
        ok = ok and q <= bound
        best = max(best, math.log(q) / n)
    stats.growth_depth = table.depth
    stats.growth_max_root = round(math.exp(best), 12)
    stats.growth_certified = ok
    return stats


def _limit_json(x: Limit | None):
    return None if x is None else x.to_json()


def _real_json(x: Real) -> dict:
    if x.exact is not None:
        return {"value": format_rational(x.exact)}
    enc = x.within(WITNESS_WIDTH)
    return {"enclosure": enc.to_json(), "approx": float(enc.mid)}


class _Checker:
    """Decides the individual hypotheses for one spec."""

    def __init__(self, spec, facts: AsymptoticFacts, stats: HorizonStats, symbolic: bool):
        self.spec, self.facts, self.stats, self.symbolic = spec, facts, stats, symbolic

    # each returns (status, witness) with status in
    # {"symbolic-true", "symbolic-false", "horizon-true", "horizon-false"}

    def ratio_gt(self, threshold) -> tuple[str, dict]:
        t = Real.of(threshold)
        if self.symbolic:
            lim = self.facts.ratio_liminf
            return ("symbolic-true" if lim.exceeds(t) else "symbolic-false"), {
                "liminf_lambda_ratio": _limit_json(lim), "threshold": _real_json(t)}
        m = self.stats.min_ratio
        ok = m is not None and m > as_fraction(threshold)
        return ("horizon-true" if ok else "horizon-false"), {
            "window_min_lambda_ratio": None if m is None else format_rational(m), "threshold": _real_json(t)}

    def lam_over_n_gt(self, threshold: Real) -> tuple[str, dict]:
        if self.symbolic:
            lim = self.facts.lam_over_n_limsup
            return ("symbolic-true" if lim.exceeds(threshold) else "symbolic-false"), {
                "limsup_lambda_over_n": _limit_json(lim), "threshold": _real_json(threshold)}
        m = self.stats.max_lam_over_n
        ok = m is not None and Real.of(m).compare(threshold) > 0
        return ("horizon-true" if ok else "horizon-false"), {
            "window_max_lambda_over_n": None if m is None else format_rational(m), "threshold": _real_json(threshold)}

    def diverges(self, name: str, symbolic_value: bool | None, series: list[float]) -> tuple[str, dict]:
        if self.symbolic and symbolic_value is not None:
            return ("symbolic-true" if symbolic_value else "symbolic-false"), {name: "diverges" if symbolic_value else "bounded"}
        ok = _rising(series)
        return ("horizon-true" if ok else "horizon-false"), {
            f"window_{name}_statistic": series, "rule": "maximum attained at the last window stage"}

    def bounded_r(self) -> tuple[str, dict]:
        # finitely many stage descriptors
        return "symbolic-true", {"r_max": max(len(st.block) for st in self.spec.stages)}

    def bounded_a(self) -> tuple[str, dict]:
        return "symbolic-true", {"M": self.spec.quotient_bound(), "a_0": self.spec.header[0]}

    def q_growth(self) -> tuple[str, dict]:
        M = self.spec.quotient_bound()
        return "symbolic-true", {
            "M": M,
            "q_root_bound": M + 1,
            "approx_measured_max_q_root": self.stats.growth_max_root,
            "measured_depth": self.stats.growth_depth,
            "bound_checked_on_prefix": self.stats.growth_certified,
        }

    def borne(self) -> tuple[str, dict]:
        m = self.stats.max_r_over_n
        return "symbolic-true", {"r_over_n_bounded": True,
                                 "window_max_r_over_n": None if m is None else format_rational(m)}


def _combine(statuses: list[str]) -> str:
    if any(s.endswith("false") for s in statuses):
        return "fails"
    if all(s == "symbolic-true" for s in statuses):
        return "holds-symbolically"
    return "holds-at-horizon"


def certify(spec: QuasiPeriodicSpec, horizon: int = 64, epsilon=DEFAULT_EPSILON,
            mode: str = "auto") -> list[CriterionCertificate]:
    """One certificate per criterion, in the order of ``THEOREMS``.

    ``mode="auto"`` uses the symbolic asymptotics whenever the schedule is
    closed-form, ``mode="horizon"`` forces the finite-horizon statistics.
    """
    if mode not in ("auto", "horizon"):
        raise ValueError("mode must be 'auto' or 'horizon'")
    epsilon = as_fraction(epsilon)
    facts = schedule_asymptotics(spec, epsilon)
    stats = horizon_stats(spec, horizon, epsilon)
    symbolic = mode == "auto" and facts.closed_form
    chk = _Checker(spec, facts, stats, symbolic)
    period_status, period_caveats = periodicity_status(spec)
    A = max(2, spec.max_quotient())
    B = B_real(A)

    plans = {
        "T2.1-baker0": [("borne", chk.borne()),
                        ("hypgen", chk.diverges("hypgen", facts.hypgen, stats.baker_stat))],
        "T2.2-baker1": [("quotients_at_most_A", ("symbolic-true", {"A": A})),
                        ("bounded_r", chk.bounded_r()),
                        ("limsup_lambda_over_n_gt_B", chk.lam_over_n_gt(B))],
        "T2.3-baker2": [("bounded_a", chk.bounded_a()),
                        ("bounded_r", chk.bounded_r()),
                        ("liminf_ratio_gt_2", chk.ratio_gt(2))],
        "T3.1-amel4": [("hypgenamel", chk.diverges("hypgenamel", facts.hypgenamel, stats.amel_stat))],
        "T3.2-amel1": [("q_root_bounded", chk.q_growth()),
                       ("limsup_lambda_over_n_positive", chk.lam_over_n_gt(Real.of(0)))],
        "C3.3-amel2": [("q_root_bounded", chk.q_growth()),
                       ("bounded_r", chk.bounded_r()),
                       ("liminf_ratio_gt_1", chk.ratio_gt(1))],
        "T3.4-amel3": [("liminf_ratio_gt_2", chk.ratio_gt(2))],
    }

    out = []
    for tid in THEOREMS:
        hyps = plans[tid]
        witnesses: dict[str, Any] = {
            "hypotheses": {name: {"status": status, **w} for name, (status, w) in hyps},
            "non_periodicity": period_status,
            "path": "symbolic" if symbolic else "horizon",
        }
        if tid == "T2.2-baker1":
            witnesses["B(A)"] = _real_json(B)
        if tid == "T3.1-amel4":
            witnesses["epsilon"] = format_rational(epsilon)
        caveats: list[str] = []
        if not symbolic:
            caveats.append(facts.reason or "horizon statistics requested")
        if stats.truncated:
            caveats.append(f"horizon truncated: {stats.truncated}")
        if period_status in ("provably-periodic", "unasserted"):
            verdict = "not-applicable"
            caveats.extend(period_caveats)
        elif tid in PACKED_ONLY and spec.layout != "packed":
            verdict = "not-applicable"
            caveats.append("criterion requires the packed layout n_{k+1} = n_k + lambda_k r_k")
        else:
            verdict = _combine([status for _, (status, _) in hyps])
            if period_status == "asserted":
                caveats.extend(period_caveats)
        if tid == "T2.1-baker0":
            caveats.append("(borne) is checked as a separate flag; its removal is not decided")
        out.append(CriterionCertificate(tid, verdict, witnesses, caveats, horizon, stats.window))
    return out


def certificate_report(spec: QuasiPeriodicSpec, horizon: int = 64, epsilon=DEFAULT_EPSILON,
                       mode: str = "auto") -> dict:
    """Self-contained, deterministic JSON-ready report."""
    certs = certify(spec, horizon, epsilon, mode)
    period_status, caveats = periodicity_status(spec)
    return {
        "spec": spec.to_json(),
        "horizon": horizon,
        "epsilon": format_rational(as_fraction(epsilon)),
        "mode": mode,
        "periodicity": {"status": period_status, "caveats": caveats},
        "asymptotics": schedule_asymptotics(spec, epsilon).to_json(),
        "horizon_statistics": horizon_stats(spec, horizon, epsilon).to_json(),
        "certificates": [c.to_json() for c in certs],
    }
