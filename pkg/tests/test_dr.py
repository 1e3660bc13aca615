import random
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest

from quasicf.cf import table_from_quotients
from quasicf.dr import bound_report, build_schedule, evertse_budget, partition_counts, schedule_exponent

getcontext().prec = 120


def dec(x: Fraction) -> Decimal:
    return Decimal(x.numerator) / Decimal(x.denominator)


def brute_force(table, N, exps):
    """Partition membership in 120-digit decimal logarithms."""
    logN = Decimal(N).ln()
    out = []
    for e in exps:
        delta = (-dec(e) * logN).exp()
        out.append(tuple(n for n in range(1, N + 1)
                         if Decimal(table.q(n + 1)).ln() > (1 + delta) * Decimal(table.q(n)).ln()))
    return out


def test_third_schedule_exact():
    s = build_schedule(100, Fraction(1, 3))
    assert s.nu == Fraction(9, 2) and s.k == 2
    nu = Fraction(9, 2)
    oracle = (nu - 1) / (nu - 1 / nu**2)
    assert oracle == Fraction(567, 721) == s.exponent
    assert s.exponents == ((nu**2 - 1) / (nu**3 - 1), (nu**2 - nu) / (nu**3 - 1))


@pytest.mark.parametrize("eps,k,exponent", [
    (Fraction(1, 10), 3, None),
    (Fraction(1, 100), 5, Fraction(10000000000, 14906097493)),
])
def test_k_and_exponent(eps, k, exponent):
    s = build_schedule(10**4, eps)
    assert s.k == k
    if exponent is not None:
        assert s.exponent == exponent
    assert s.exponent <= Fraction(2, 3) + eps


def test_k_boundary_is_strict():
    # e^-2 = 0.1353352832...; k jumps from 2 to 3 as eps crosses it
    assert build_schedule(10, Fraction(1353352833, 10**10)).k == 2
    assert build_schedule(10, Fraction(1353352832, 10**10)).k == 3
    assert build_schedule(10, Fraction(1, 3)).k == 2


@pytest.mark.parametrize("N", [10**2, 10**4, 10**8])
def test_delta_ordering(N):
    assert build_schedule(N, Fraction(1, 3)).ordering_certified()
    assert build_schedule(N, Fraction(1, 100)).ordering_certified()


def test_schedule_errors():
    with pytest.raises(ValueError):
        build_schedule(10, Fraction(1, 2))
    with pytest.raises(ValueError):
        build_schedule(1, Fraction(1, 3))


def test_exponent_decreasing_in_k():
    nu = Fraction(9, 2)
    vals = [schedule_exponent(nu, k) for k in range(1, 15)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > (nu - 1) / nu


def test_partition_matches_brute_force():
    rng = random.Random(20240601)
    for _ in range(100):
        depth = rng.randint(3, 100)
        quotients = [rng.randint(0, 3)] + [rng.choice([1, 1, 1, 2, 3, 7, 50, 1000]) for _ in range(depth)]
        table = table_from_quotients(quotients)
        N = depth - 1
        eps = rng.choice([Fraction(1, 3), Fraction(1, 10), Fraction(1, 50)])
        sched = build_schedule(max(N, 2), eps)
        counts = partition_counts(table, N, sched.deltas)
        assert list(counts.members) == brute_force(table, N, sched.exponents)
        assert counts.nested


def test_rational_delta_uses_exact_powers():
    # q_1 = 4, q_2 = 9; 4^(3/2) = 8 < 9 < 4^(8/5) = 9.19
    table = table_from_quotients([0, 4, 2])
    assert partition_counts(table, 1, [Fraction(1, 2)]).members == ((1,),)
    assert partition_counts(table, 1, [Fraction(3, 5)]).members == ((),)


# frozen from the decimal oracle above
GOLDEN_EXCEPTIONS = {
    Fraction(1, 3): ((1, 2, 3, 4), (1, 2, 3)),
    Fraction(1, 10): ((1, 2, 3, 4, 5, 6), (1, 2, 3, 4, 5), (1, 2, 3, 4)),
}


@pytest.mark.parametrize("eps", sorted(GOLDEN_EXCEPTIONS))
def test_golden_table_exceptions(eps):
    table = table_from_quotients([1] * 400)
    sched = build_schedule(398, eps)
    counts = partition_counts(table, 398, sched.deltas)
    assert counts.members == GOLDEN_EXCEPTIONS[eps]
    assert counts.members == tuple(brute_force(table, 398, sched.exponents))


def test_evertse_budget_values():
    assert abs(float(evertse_budget(Fraction(1, 10))) - 10907.06829646648937859764929796) < 1e-9
    assert abs(float(evertse_budget(Fraction(1, 2))) - 22.93397900030473634801) < 1e-12


def test_bound_report_with_table():
    table = table_from_quotients([0] + [1, 2] * 60)
    rep = bound_report(100, Fraction(1, 3), table)
    assert rep["exponent_le_target"] and rep["exponent_gt_two_thirds"]
    assert rep["exponent_decreasing_in_k"]
    assert rep["schedule"]["exponent"] == "81/103"  # = 567/721
    assert rep["partition"]["nested"] and rep["partition"]["counts"][0] == 100
