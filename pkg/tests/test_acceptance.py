"""End-to-end acceptance criteria, one PASS/FAIL line each (see the summary section)."""

import itertools
import json
import random
import time
from decimal import Decimal, getcontext
from fractions import Fraction

from test_dr import brute_force

from quasicf.cf import (
    PartialQuotientStream,
    check_proximity,
    continuant,
    evaluate,
    growth_bounds,
    mirror_ratio,
    mirror_word,
    table_from_quotients,
)
from quasicf.criteria import B_of_A, certificate_report, certify
from quasicf.dr import build_schedule, partition_counts
from quasicf.enclosure import Real
from quasicf.lab import XiSource, amel4_chain, aux_polynomial, check_b1_b2_b3, pk_exponent_report, quadruple

SEED = 20241015
# 30-digit mpmath value of the closed form, frozen
B2_ORACLE = Fraction("2.663141847814629591993413302678")


def test_01_B_of_2(criterion):
    with criterion("1 B(2) enclosure") as c:
        t = time.perf_counter()
        e = B_of_A(2, Fraction(1, 10**9))
        elapsed = time.perf_counter() - t
        c.note(f"[{float(e.lo):.12f}, {float(e.hi):.12f}] in {elapsed:.3f}s")
        assert e.width <= Fraction(1, 10**9)
        assert e.lo <= B2_ORACLE <= e.hi
        assert f"{float(e.lo):.2f}" == f"{float(e.hi):.2f}" == "2.66"
        assert elapsed < 1.0


def _continuant_bound_failures(word):
    """Symmetry, split-product and rotation bounds for one tuple; returns the number of violations."""
    m = len(word)
    bad = 0
    K = continuant(word)
    if continuant(word[::-1]) != K:
        bad += 1
    # prefix continuants left to right, suffix continuants via the symmetric identity
    pre = [1]
    k1, k2 = 1, 0
    for a in word:
        k1, k2 = a * k1 + k2, k1
        pre.append(k1)
    suf = [1]
    k1, k2 = 1, 0
    for a in reversed(word):
        k1, k2 = a * k1 + k2, k1
        suf.append(k1)
    for k in range(m + 1):
        prod = pre[k] * suf[m - k]
        if not prod <= K <= 2 * prod:
            bad += 1
    for s in range(1, m):
        R = continuant(word[s:] + word[:s])
        if not (R <= 2 * K and K <= 2 * R):
            bad += 1
    return bad


def test_02_continuant_identities(criterion):
    with criterion("2 continuant symmetry/product/rotation") as c:
        t = time.perf_counter()
        failures = tuples = 0
        for m in range(1, 7):
            for word in itertools.product(range(1, 5), repeat=m):
                failures += _continuant_bound_failures(list(word))
                tuples += 1
        rng = random.Random(SEED)
        for _ in range(10**4):
            word = [rng.randint(1, 9) for _ in range(rng.randint(1, 30))]
            failures += _continuant_bound_failures(word)
            tuples += 1
        # the continuant itself against exact evaluation of [0; a_1, ..., a_m]
        for _ in range(200):
            word = [rng.randint(1, 50) for _ in range(rng.randint(1, 30))]
            assert evaluate([0] + word).denominator == continuant(word)
        elapsed = time.perf_counter() - t
        c.note(f"{tuples} tuples, {failures} failures")
        assert failures == 0
        assert elapsed < 30


def test_03_mirror_formula(criterion):
    with criterion("3 mirror formula") as c:
        rng = random.Random(SEED + 3)
        checks = failures = 0
        for _ in range(10**3):
            depth = rng.randint(2, 200)
            quotients = [rng.randint(0, 9)] + [rng.choice([1, 1, 2, 3, 5, 40]) for _ in range(depth)]
            table = table_from_quotients(quotients)
            for n in range(2, depth + 1):
                ratio = Fraction(table.q(n), table.q(n - 1))
                word = mirror_word(table, n)
                # expansion of q_n/q_{n-1} equals the reversed word, whose exact value is the ratio
                if not (mirror_ratio(table, n) == word and evaluate(word) == ratio):
                    failures += 1
                checks += 1
        c.note(f"{checks} ratios, {failures} failures")
        assert failures == 0


def test_04_proximity_and_growth(criterion):
    with criterion("4 proximity and growth bounds") as c:
        rng = random.Random(SEED + 4)
        prox = growth = failures = 0
        for _ in range(10**3):
            M = rng.randint(1, 6)
            quotients = [rng.randint(0, 3)] + [rng.randint(1, M) for _ in range(502)]
            table = table_from_quotients(quotients[:501])
            verdicts = growth_bounds(table, M)
            assert len(verdicts) == 500
            failures += sum(not v.holds for v in verdicts)
            growth += len(verdicts)
            n = 500
            other = quotients[: n + 1] + [rng.randint(1, M + 3) for _ in range(2)]
            cert = check_proximity(PartialQuotientStream.from_quotients(quotients),
                                   PartialQuotientStream.from_quotients(other), n)
            failures += not cert.holds
            prox += 1
        c.note(f"{prox} proximity certificates, {growth} growth verdicts, {failures} failures")
        assert failures == 0


STAGE_SETS = [("xi12_pow2", range(1, 7)), ("xi23_pow3", range(1, 6))]


def test_05_b1_b2_b3(criterion, spec):
    with criterion("5 (b1)/(b2)/(b3) certified") as c:
        t = time.perf_counter()
        results = []
        for name, stages in STAGE_SETS:
            s = spec(name)
            xi = XiSource(s)
            for k in stages:
                rep = check_b1_b2_b3(quadruple(s, k, xi), s, xi=xi)
                results.append((name, k, rep.b1, rep.b1_prime, rep.b2, rep.b3))
        elapsed = time.perf_counter() - t
        undecided = [r for r in results if None in r[2:]]
        false = [r for r in results if False in r[2:]]
        c.note(f"{len(results)} stages, {len(undecided)} indeterminate, {len(false)} false, {elapsed:.1f}s")
        assert not undecided and not false
        assert elapsed < 120


def test_06_aux_polynomials(criterion, spec):
    with criterion("6 P_k(xi_k) = 0 and continuant bounds") as c:
        count = 0
        for name, stages in STAGE_SETS:
            s = spec(name)
            xi = XiSource(s)
            for k in stages:
                for variant in ("amel1", "amel3"):
                    poly = aux_polynomial(s, k, variant, xi)
                    assert poly.c2 != 0 and poly.xi_k.is_root_of(poly.coeffs)
                    rep = pk_exponent_report(s, k, variant, xi=xi)
                    assert rep.continuant_bound
                    count += 1
        c.note(f"{count} polynomials, all roots exact, all bounds hold")


def test_07_dr_schedule(criterion):
    with criterion("7 multi-level schedule at eps = 1/3") as c:
        s = build_schedule(100, Fraction(1, 3))
        assert s.nu == Fraction(9, 2) and s.k == 2
        nu = Fraction(9, 2)
        oracle = Fraction(7, 2) / (nu - Fraction(4, 81))  # nu^-2 = 4/81
        assert oracle == Fraction(567, 721)
        enc = (Real.of(nu) - 1) / (Real.of(nu) - Real.of(nu) ** -2)
        e = enc.within(Fraction(1, 10**9))
        assert abs(e.mid - oracle) < Fraction(1, 10**6)
        assert s.exponent == oracle
        for N in (10**2, 10**4, 10**8):
            assert build_schedule(N, Fraction(1, 3)).ordering_certified()
        c.note(f"nu = 9/2, k = 2, exponent = {s.exponent} ~ {float(s.exponent):.9f}, ordering certified for N = 1e2, 1e4, 1e8")


GOLDEN_EXCEPTIONS = ((1, 2, 3, 4), (1, 2, 3))


def test_08_partition_counting(criterion):
    with criterion("8 partition counting") as c:
        rng = random.Random(SEED + 8)
        for _ in range(10**2):
            depth = rng.randint(3, 100)
            quotients = [rng.randint(0, 3)] + [rng.choice([1, 1, 2, 3, 9, 100, 10**4]) for _ in range(depth)]
            table = table_from_quotients(quotients)
            N = depth - 1
            sched = build_schedule(N, rng.choice([Fraction(1, 3), Fraction(1, 10), Fraction(1, 100)]))
            counts = partition_counts(table, N, sched.deltas)
            assert list(counts.members) == brute_force(table, N, sched.exponents)
            assert counts.nested
        golden = table_from_quotients([1] * 400)
        sched = build_schedule(398, Fraction(1, 3))
        counts = partition_counts(golden, 398, sched.deltas)
        assert counts.members == GOLDEN_EXCEPTIONS
        c.note(f"100 random tables agree with the decimal oracle; golden exceptions {list(map(list, counts.members))}")


def test_09_criterion_engine(criterion, spec):
    with criterion("9 criterion engine verdicts") as c:
        v2 = {x.theorem_id: x.verdict for x in certify(spec("xi12_pow2"))}
        v3 = {x.theorem_id: x.verdict for x in certify(spec("xi12_pow3"))}
        vc = {x.theorem_id: x.verdict for x in certify(spec("constant"))}
        assert v2["C3.3-amel2"] == "holds-symbolically" and v2["T3.4-amel3"] == "fails"
        assert v3["C3.3-amel2"] == v3["T3.4-amel3"] == "holds-symbolically"
        assert set(vc.values()) == {"not-applicable"}
        for name in ("xi12_pow2", "xi12_pow3", "constant", "gapped_exp"):
            a = json.dumps(certificate_report(spec(name)), indent=2, sort_keys=True)
            b = json.dumps(certificate_report(spec(name)), indent=2, sort_keys=True)
            assert a == b
        c.note("2^k: C3.3 holds, T3.4 fails; 3^k: both hold; constant: not-applicable; reports byte-identical")


DEPTH_BUDGET = 40_000


def test_10_amel4_chain(criterion, spec):
    with criterion("10 proximity chain on a gapped spec") as c:
        s = spec("gapped_exp")
        infos, _ = s.feasible_stages(64)
        stages = [i.k for i in infos if i.k >= 1 and i.end <= DEPTH_BUDGET]
        xi = XiSource(s)
        series = []
        for k in stages:
            rep = amel4_chain(s, k, xi=xi)
            assert rep.proximity and rep.gap.hi <= rep.bound
            series.append(rep.lam_over_log_q)
        c.note(f"stages 1..{stages[-1]}, lambda_k/log q_n_k in [{min(series):.3f}, {max(series):.3f}]")
        assert len(stages) >= 10
        assert max(series) < 2
