import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasicf.qpspec import (
    QuasiPeriodicSpec,
    ScheduleExhausted,
    ScheduleExpr,
    Stage,
    generate,
    periodicity_status,
    schedule_asymptotics,
    spec_from_json,
    verify_rep,
    xi_ab,
)


def test_xi12_constant_one_alternates():
    spec = xi_ab(1, 2, ScheduleExpr.constant(1))
    assert generate(spec, 8).prefix(8) == [0, 1, 2, 1, 2, 1, 2, 1, 2]


def test_xi12_pow2_prefix(spec):
    s = spec("xi12_pow2")
    # lambda_k = 2^k: one 1, two 2s, four 1s, eight 2s
    assert generate(s, 15).prefix(15) == [0, 1, 2, 2, 1, 1, 1, 1] + [2] * 8


def test_packed_boundaries_and_n_reconstruction(spec):
    s = spec("xi23_pow3")
    infos = s.stage_infos(6)
    for a, b in zip(infos, infos[1:]):
        assert b.n - a.n == a.lam * a.r
    for k, info in enumerate(infos):
        assert info.n == s.n0 + sum(i.r * i.lam for i in infos[:k])
        assert info.lam == 3**k


def test_verify_rep_examples():
    prefix = [0, 1, 2, 1, 2, 1, 2]
    ok, short = verify_rep(prefix, [(1, 2, 3), (1, 2, 4)])
    assert ok.holds is True
    assert short.status == "insufficient-prefix" and short.holds is None
    (bad,) = verify_rep([0, 1, 2, 1, 3], [(1, 2, 2)])
    assert bad.status == "fails" and bad.first_failure == 2


schedules = st.one_of(
    st.integers(1, 4).map(ScheduleExpr.constant),
    st.tuples(st.integers(1, 3), st.integers(0, 2)).map(lambda t: ScheduleExpr.affine(*t)),
    st.sampled_from([Fraction(3, 2), Fraction(2), Fraction(3)]).map(lambda t: ScheduleExpr.geometric(1, t)),
    st.lists(st.integers(1, 5), min_size=12, max_size=12).map(ScheduleExpr.table),
)
blocks = st.lists(st.integers(1, 6), min_size=1, max_size=3).map(tuple)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(1, 5), max_size=3),
    st.lists(blocks, min_size=1, max_size=3),
    schedules,
    st.integers(2, 10),
)
def test_generated_prefix_satisfies_own_claims(header, stage_blocks, sched, count):
    spec = QuasiPeriodicSpec((0, *header), tuple(Stage(b) for b in stage_blocks), schedule=sched)
    infos = spec.stage_infos(count)
    depth = infos[-1].end
    prefix = generate(spec, depth).prefix(depth)
    assert all(v.holds for v in verify_rep(prefix, [i.claim for i in infos]))
    assert generate(spec, depth).prefix(depth) == prefix


def test_gapped_layout_inserts_fillers(spec):
    s = spec("gapped_exp")
    infos = s.stage_infos(3)
    prefix = generate(s, infos[2].n).prefix(infos[2].n)
    first = infos[0]
    assert prefix[first.end:first.next_n] == [3]
    assert infos[1].n == first.end + 1


def test_table_schedule_exhaustion():
    spec = xi_ab(1, 2, ScheduleExpr.table([1, 2]))
    with pytest.raises(ScheduleExhausted):
        generate(spec, 10)


def test_schedule_evaluations():
    assert [ScheduleExpr.geometric(1, 2).evaluate(k) for k in range(5)] == [1, 2, 4, 8, 16]
    assert [ScheduleExpr.geometric(1, Fraction(3, 2)).evaluate(k) for k in range(4)] == [1, 2, 3, 4]
    assert [ScheduleExpr.polynomial(1, Fraction(1, 2)).evaluate(k) for k in range(6)] == [1, 1, 2, 2, 2, 3]
    # ceil(exp(k^(4/5))), frozen from a 50-digit mpmath evaluation
    assert [ScheduleExpr.exp_power(1, Fraction(4, 5)).evaluate(k) for k in range(6)] == [1, 3, 6, 12, 21, 38]
    with pytest.raises(ValueError):
        ScheduleExpr.geometric(1, 1)


@settings(deadline=None)
@given(st.sampled_from([Fraction(3, 2), Fraction(2), Fraction(3), Fraction(7, 3)]), st.integers(1, 60))
def test_geometric_ratio_within_ceiling_perturbation(theta, k):
    g = ScheduleExpr.geometric(1, theta)
    lam, nxt = g.evaluate(k), g.evaluate(k + 1)
    assert abs(Fraction(nxt, lam) - theta) <= (theta + 1) / lam


def test_spec_json_round_trip(spec_path):
    for name in ("xi12_pow2", "gapped_exp", "blocks", "xi12_position", "constant"):
        text = spec_path(name).read_text()
        s = spec_from_json(json.loads(text))
        again = spec_from_json(json.loads(s.dumps()))
        assert again == s and again.dumps() == s.dumps()
    with pytest.raises(ValueError):
        spec_from_json({"header": ["0"], "stages": [{"block": ["1"]}], "schedule": None, "bogus": 1})


def test_asymptotics_geometric_and_constant(spec):
    facts = schedule_asymptotics(spec("xi12_pow2"))
    assert facts.ratio_liminf.value.exact == 2
    # lambda_k / n_k -> theta - 1 for single-quotient alternating blocks
    assert facts.lam_over_n_limsup.value.exact == 1
    assert schedule_asymptotics(spec("xi12_pow3")).lam_over_n_limsup.value.exact == 2
    const = schedule_asymptotics(spec("constant"))
    assert const.ratio_liminf.value.exact == 1 and not const.lambda_unbounded


def test_asymptotics_exp_power(spec):
    pos = schedule_asymptotics(spec("xi12_position"))
    assert pos.hypgenamel is True and pos.hypgen is False
    assert not schedule_asymptotics(spec("xi12_position"), epsilon=Fraction(1, 5)).hypgenamel
    assert schedule_asymptotics(spec("xi12_exp32")).ratio_liminf.is_infinite


def test_periodicity_status(spec):
    assert periodicity_status(spec("xi12_pow2"))[0] == "witnessed"
    assert periodicity_status(spec("constant"))[0] == "provably-periodic"
    assert periodicity_status(spec("unasserted"))[0] == "unasserted"
    assert periodicity_status(spec("gapped_exp"))[0] == "asserted"
