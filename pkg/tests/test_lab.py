from fractions import Fraction

import pytest

from quasicf.cf import evaluate, expand_rational
from quasicf.lab import (
    NoDisagreement,
    XiSource,
    amel1_forms,
    amel3_forms,
    amel4_chain,
    aux_polynomial,
    check_b1_b2_b3,
    epsilon_decay,
    j_select,
    pk_exponent_report,
    quadruple,
    run_check,
)
from quasicf.qpspec import QuasiPeriodicSpec, ScheduleExpr, Stage, generate, xi_ab
from quasicf.surd import QuadraticSurd, purely_periodic_value


def test_quadruple_matches_direct_evaluation(spec):
    s = spec("xi12_pow2")
    q = quadruple(s, 2)
    # stages: n_0 = 1 (one 1), n_1 = 2 (two 2s), n_2 = 4 (four 1s) -> N = 7
    assert q.N == 7
    prefix = generate(s, 7).prefix(7)
    assert Fraction(q.P, q.Q) == evaluate(prefix)
    assert Fraction(q.Pp, q.Qp) == evaluate(prefix[:7])
    assert q.check_invariants()
    assert q.mirror_ok(prefix)


def test_alpha_uses_reversed_block(spec):
    s = spec("blocks")
    q = quadruple(s, 1)
    assert q.block == (2, 1, 1)
    assert q.alpha == purely_periodic_value((1, 1, 2))
    q0 = quadruple(s, 2)
    assert q0.block == (1, 2) and q0.alpha == QuadraticSurd(1, 3, 1)  # [2; 1, 2, 1, ...] = 1 + sqrt(3)


def test_forward_alpha_breaks_b2(spec):
    s = spec("blocks")
    q = quadruple(s, 2)
    assert check_b1_b2_b3(q, s).b2 is True
    forward = purely_periodic_value(q.block)
    assert check_b1_b2_b3(q, s, alpha=forward).b2 is False


def test_unit_repetition_has_trivial_S():
    spec = xi_ab(1, 2, ScheduleExpr.table([1, 1, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]))
    q = quadruple(spec, 2)
    assert q.lam == 1 and q.r == 1 and q.S == 1
    rep = check_b1_b2_b3(q, spec)
    assert rep.b2 is True and rep.certified


def test_periodic_prefix_has_no_disagreement():
    golden = QuasiPeriodicSpec((1,), (Stage((1,)),), schedule=ScheduleExpr.constant(2))
    with pytest.raises(NoDisagreement):
        j_select(golden, 3)


@pytest.mark.parametrize("name,stages", [("xi12_pow2", range(1, 7)), ("xi12_pow3", range(1, 5))])
def test_b123_and_bb_gap(spec, name, stages):
    s = spec(name)
    xi = XiSource(s)
    reports = [check_b1_b2_b3(quadruple(s, k, xi), s, xi=xi) for k in stages]
    assert all(r.certified for r in reports)
    gaps = [r.bb_gap.mid for r in reports]
    # monotone along each residue class of alternating blocks
    for parity in (0, 1):
        sub = gaps[parity::2]
        assert all(a > b for a, b in zip(sub, sub[1:]))


def test_epsilon_decay(spec):
    s = spec("xi12_pow2")
    xi = XiSource(s)
    pts = epsilon_decay([quadruple(s, k, xi) for k in range(1, 7)], 2)
    assert all(p.holds for p in pts)
    assert min(p.measured for p in pts[2:]) > 0.1
    with pytest.raises(ValueError):
        epsilon_decay([], 2)


def test_aux_polynomial_frozen_stage_three(spec):
    s = spec("xi12_pow2")
    for variant in ("amel1", "amel3"):
        poly = aux_polynomial(s, 3, variant)
        assert poly.root_check()
        g = abs(poly.c2)
        a, b, c = poly.xi_k.min_poly()
        assert (a, b, c) == (1169, -1644, 578)
        assert poly.c2 % a == 0 and (poly.c2 // a) * b == poly.c1 and (poly.c2 // a) * c == poly.c0
        assert g > 0


@pytest.mark.parametrize("name,stages", [("xi12_pow2", range(2, 7)), ("xi23_pow3", range(2, 6))])
def test_pk_root_and_continuant_bounds(spec, name, stages):
    s = spec(name)
    xi = XiSource(s)
    for k in stages:
        for variant in ("amel1", "amel3"):
            rep = pk_exponent_report(s, k, variant, xi=xi)
            assert rep.poly.root_check() and rep.poly.c2 != 0
            assert rep.continuant_bound and rep.certified


def test_j_select_is_below_n(spec):
    s = spec("xi12_pow2")
    for k in range(1, 6):
        j = j_select(s, k)
        info = s.stage(k)
        a = generate(s, info.n + info.r).prefix(info.n + info.r)
        assert j < info.n and a[j] != a[j + info.r]
        assert all(a[i] == a[i + info.r] for i in range(j + 1, info.n))


def test_amel1_forms(spec):
    s = spec("xi12_pow3")
    xi = XiSource(s)
    for k in range(1, 5):
        rep = amel1_forms(quadruple(s, k, xi), s, xi)
        assert rep.certified and rep.comparisons["L4_equals_Q"]
        assert rep.comparisons["b1"] and rep.comparisons["b2"]


def test_amel3_forms_bounded(spec):
    s = spec("xi12_pow3")
    xi = XiSource(s)
    ratios = []
    for k in range(2, 6):
        rep = amel3_forms(s, k, Fraction(1, 10), xi)
        assert rep.certified and rep.comparisons["L4_identity"]
        assert rep.forms[3].lo == rep.z[0]
        ratios.append(rep.comparisons["approx_log_ratio"])
    assert max(ratios) < 5


def test_amel4_chain_gapped(spec):
    s = spec("gapped_exp")
    xi = XiSource(s)
    for k in range(1, 9):
        rep = amel4_chain(s, k, xi=xi)
        assert rep.proximity and rep.gap.hi <= rep.bound
        assert rep.split_lower and rep.split_upper and rep.power_lower and rep.height_ok
        assert 0 < rep.lam_over_log_q < 5


def test_run_check_reports_errors(spec):
    s = spec("xi12_pow2")
    assert "error" in run_check(s, 0, "quadruple")
    rec = run_check(s, 2, "quadruple")
    assert rec["invariants"] and rec["mirror"]
    with pytest.raises(ValueError):
        run_check(s, 2, "nope")


def test_mirror_expansion_of_big_ratio(spec):
    s = spec("xi23_pow3")
    q = quadruple(s, 3)
    assert expand_rational(q.Q, q.Qp)[: q.lam] == [q.block[0]] * q.lam
