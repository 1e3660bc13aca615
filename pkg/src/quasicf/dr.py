"""Multi-level counting bound on the growth of convergent denominators.

For ``nu = 3/(1 - eps)`` and ``k`` the least integer above ``log(1/eps)``, the
levels ``delta_j = N^(-e_j)`` with ``e_j = (nu^k - nu^(j-1)) / (nu^(k+1) - 1)``
split ``{1..N}`` into the sets ``S_j = {n : q_{n+1} > q_n^(1 + delta_j)}``.
The resulting bound on ``log log q_N`` has the shape ``k N^((nu-1)/(nu-nu^-k))``.
Unknown constants are never evaluated: every quantity here is constant-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cf import ConvergentTable
from .enclosure import RationalEnclosure, Real, as_fraction, format_rational

__all__ = [
    "DRSchedule",
    "PartitionCounts",
    "build_schedule",
    "schedule_exponent",
    "partition_counts",
    "evertse_budget",
    "bound_report",
]

REPORT_WIDTH = Fraction(1, 10**12)


def _nu(epsilon: Fraction) -> Fraction:
    return 3 / (1 - epsilon)


def _k_for(epsilon: Fraction) -> int:
    """Least integer strictly greater than ``log(1/eps)``."""
    L = Real.of(1 / epsilon).log()
    k = math.floor(float(L)) + 1
    # pin the float guess down exactly: k - 1 <= L < k
    while L.compare(k) >= 0:
        k += 1
    while k > 1 and L.compare(k - 1) < 0:
        k -= 1
    return k


def schedule_exponent(nu: Fraction, k: int) -> Fraction:
    """``(nu - 1) / (nu - nu^-k)``, exact for rational ``nu``."""
    nu = as_fraction(nu)
    return (nu - 1) / (nu - nu ** (-k))


@dataclass(frozen=True, eq=False)
class DRSchedule:
    N: int
    epsilon: Fraction
    nu: Fraction
    k: int
    exponents: tuple[Fraction, ...]  # e_j, so delta_j = N^-e_j
    deltas: tuple[Real, ...]
    exponent: Fraction

    def delta_enclosures(self, width=REPORT_WIDTH) -> list[RationalEnclosure]:
        return [d.within(width) for d in self.deltas]

    def ordering_certified(self) -> bool:
        """``0 < delta_1 < ... < delta_k < 1`` via enclosures and, independently, the exponents."""
        es = self.exponents
        exact = all(a > b for a, b in zip(es, es[1:])) and es[-1] > 0 and self.N >= 2
        encs = self.delta_enclosures(Fraction(1, 10**30))
        by_enclosure = (
            encs[0].lo > 0
            and all(a.hi < b.lo for a, b in zip(encs, encs[1:]))
            and encs[-1].hi < 1
        )
        return exact and by_enclosure

    def to_json(self) -> dict:
        return {
            "N": str(self.N),
            "epsilon": format_rational(self.epsilon),
            "nu": format_rational(self.nu),
            "k": self.k,
            "delta_exponents": [format_rational(e) for e in self.exponents],
            "deltas": [e.to_json() for e in self.delta_enclosures()],
            "approx_deltas": [float(e.mid) for e in self.delta_enclosures()],
            "exponent": format_rational(self.exponent),
            "approx_exponent": float(self.exponent),
            "ordering_certified": self.ordering_certified(),
        }


def build_schedule(N: int, epsilon) -> DRSchedule:
    epsilon = as_fraction(epsilon)
    if not 0 < epsilon <= Fraction(1, 3):
        raise ValueError(f"epsilon must lie in (0, 1/3], got {format_rational(epsilon)}")
    if int(N) != N or N < 2:
        raise ValueError("N must be an integer >= 2")
    N = int(N)
    nu = _nu(epsilon)
    k = _k_for(epsilon)
    top = nu ** (k + 1) - 1
    exps = tuple((nu**k - nu ** (j - 1)) / top for j in range(1, k + 1))
    deltas = tuple(Real.of(N) ** (-e) for e in exps)
    return DRSchedule(N, epsilon, nu, k, exps, deltas, schedule_exponent(nu, k))


@dataclass(frozen=True)
class PartitionCounts:
    N: int
    counts: tuple[int, ...]  # |S_0| = N, |S_1|, ..., |S_k|
    members: tuple[tuple[int, ...], ...]  # S_1 .. S_k

    @property
    def nested(self) -> bool:
        sets = [set(range(1, self.N + 1))] + [set(m) for m in self.members]
        return all(b <= a for a, b in zip(sets, sets[1:]))

    def to_json(self) -> dict:
        return {"N": self.N, "counts": list(self.counts), "members": [list(m) for m in self.members],
                "nested": self.nested}


def _exceeds(q_next: int, q: int, delta: Real, log_q: Real, log_next: Real) -> bool:
    """Exact truth of ``q_next > q^(1 + delta)``; equality counts as False."""
    if q == 1:
        return q_next > 1
    if delta.exact is not None:
        e = 1 + delta.exact
        u, v = e.numerator, e.denominator
        return q_next**v > q**u
    return (log_next - (1 + delta) * log_q).sign() > 0


def partition_counts(table: ConvergentTable, N: int, deltas: Sequence) -> PartitionCounts:
    """Cardinalities of ``S_j = {1 <= n <= N : q_{n+1} > q_n^(1 + delta_j)}``."""
    if table.depth < N + 1:
        raise ValueError(f"table depth {table.depth} < N + 1 = {N + 1}")
    deltas = [Real.of(d) for d in deltas]
    logs: dict[int, Real] = {}

    def log_q(n):
        if n not in logs:
            logs[n] = Real.of(table.q(n)).log()
        return logs[n]

    members = []
    for d in deltas:
        level = []
        for n in range(1, N + 1):
            q, qn = table.q(n), table.q(n + 1)
            if q == 1:
                hit = qn > 1
            else:
                hit = _exceeds(qn, q, d, log_q(n), log_q(n + 1))
            if hit:
                level.append(n)
        members.append(tuple(level))
    return PartitionCounts(N, (N,) + tuple(len(m) for m in members), tuple(members))


def evertse_budget(delta) -> Real:
    """Constant-free shape ``delta^-3 (1 + log(1/delta))^2``."""
    d = Real.of(delta)
    if d.sign() <= 0 or d.compare(1) >= 0:
        raise ValueError("delta must lie in (0, 1)")
    inv = Real.of(1) / d
    t = Real.of(1) + inv.log()
    return inv * inv * inv * t * t


def _approx(x: Real) -> float:
    if x.exact is not None:
        return float(x.exact)
    return float(x.within(REPORT_WIDTH).mid) if abs(float(x)) < 1e300 else float(x)


def bound_report(N: int, epsilon, table: ConvergentTable | None = None) -> dict:
    """Constant-free evaluation of the multi-level bound at ``N``.

    Includes the level-sum shape, ``k N^exponent``, the target ``N^(2/3+eps)``,
    the exact comparison of the exponent with ``2/3 + eps`` and, given a
    convergent table, the partition counts and measured ``log log q_N``.
    """
    sched = build_schedule(N, epsilon)
    nu, k, eps = sched.nu, sched.k, sched.epsilon
    d = sched.deltas
    level_sum = Real.of(N) * (Real.of(1) + d[0]).log()
    for j in range(1, k):
        level_sum = level_sum + (Real.of(N) ** (sched.exponents[j - 1] * nu)) * (Real.of(1) + d[j]).log()
    level_sum = level_sum + Real.of(N) ** (sched.exponents[-1] * nu)
    bornenu = Real.of(k) * Real.of(N) ** sched.exponent
    target_exp = Fraction(2, 3) + eps
    target = Real.of(N) ** target_exp
    limit = (nu - 1) / nu
    by_k = [schedule_exponent(nu, i) for i in range(1, 11)]
    logN = math.log(N)
    report = {
        "schedule": sched.to_json(),
        "level_sum_shape": _approx(level_sum),
        "bornenu_shape": _approx(bornenu),
        "target_shape": _approx(target),
        "target_exponent": format_rational(target_exp),
        "exponent_le_target": sched.exponent <= target_exp,
        "exponent_gt_two_thirds": sched.exponent > Fraction(2, 3),
        "exponent_slack": format_rational(target_exp - sched.exponent),
        "approx_exponent_slack": float(target_exp - sched.exponent),
        "exponent_limit": format_rational(limit),
        "exponent_decreasing_in_k": all(a > b for a, b in zip(by_k, by_k[1:])) and by_k[-1] > limit,
        "reference_curves": {
            "liouville_n": float(N),
            "davenport_roth_n_over_sqrt_log_n": N / math.sqrt(logN),
            "evertse_n_3_4_sqrt_log_n": N**0.75 * math.sqrt(logN),
        },
    }
    if table is not None:
        counts = partition_counts(table, N, d)
        qN = table.q(N)
        report["partition"] = counts.to_json()
        report["approx_log_log_q_N"] = math.log(math.log(qN)) if qN > 2 else None
    return report
