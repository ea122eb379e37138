import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from wpalab.errors import SpecError
from wpalab.planner import (
    DEFAULT_BIT_CAP,
    TOY_CONSTANTS,
    GentlyGrowingFn,
    LogPowerTerm,
    PlannerConstants,
    check_gently_growing,
    find_threshold_prime,
    fit_search_constants,
    log_power_fn,
    parse_growth_fn,
    plan_main,
    plan_variation1,
    plan_variation2,
    tower_floor_int,
    variation2_algebra_identity,
    verify_main_chains,
    verify_variation2_equivalence,
)
from wpalab.primes import is_prime, next_prime
from wpalab.towers import Comparison, TowerInt, compare, tower_pow

GOLDEN = Path(__file__).parent / "golden"


class TestPrimes:
    def test_small(self):
        assert [n for n in range(2, 30) if is_prime(n)] == \
            [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]

    def test_carmichael_rejected(self):
        assert not is_prime(561)
        assert not is_prime(1105)

    def test_large_deterministic(self):
        assert is_prime(2 ** 61 - 1)  # Mersenne
        assert not is_prime(2 ** 61 + 1)

    def test_beyond_deterministic_range(self):
        # 2^89 - 1 is a Mersenne prime, well above the base-set limit
        assert is_prime(2 ** 89 - 1)
        assert not is_prime((2 ** 89 - 1) * (2 ** 61 - 1))

    def test_next_prime(self):
        assert next_prime(1) == 2
        assert next_prime(2) == 3
        assert next_prime(13) == 17
        assert next_prime(2 ** 18) == 262147


class TestGrowthFnParsing:
    def test_iterated_names(self):
        assert parse_growth_fn("log2").terms[0].depth == 1
        assert parse_growth_fn("loglog2").terms[0].depth == 2
        assert parse_growth_fn("logloglog2").terms[0].depth == 3

    def test_itlog_form(self):
        f = parse_growth_fn("itlog:2:alpha=3:beta=1/2")
        term = f.terms[0]
        assert (term.alpha, term.depth, term.beta) == (3, 2, Fraction(1, 2))

    def test_bad_spec(self):
        with pytest.raises(SpecError):
            parse_growth_fn("exp2")

    def test_log_power(self):
        f = log_power_fn(3)
        assert f.terms[0].beta == Fraction(1, 3)


class TestEvaluation:
    def test_loglog_at_powers_of_two(self):
        f = parse_growth_fn("loglog2")
        assert f.eval_exact(16) == 2
        assert f.eval_exact(65536) == 4

    def test_eval_rounding_is_lower_bound(self):
        f = parse_growth_fn("loglog2")
        val = f.eval_exact(17)
        assert 2 < val < Fraction(204, 100)  # ~2.031

    def test_eval_on_certified_tower(self):
        f = parse_growth_fn("loglog2")
        big = tower_pow(2, 2 ** 22)  # log2 = 2^22, loglog2 = 22
        got = f.eval_tower(big)
        lo, hi = got.lift(got._eff_depth())
        assert lo <= 22 <= hi

    def test_invert_round_trip(self):
        f = parse_growth_fn("loglog2")
        x0 = f.invert_lower_bound(TowerInt.exact(36))
        assert compare(x0, tower_pow(2, 2 ** 36)) is Comparison.EQUAL

    def test_sum_and_max_combiners(self):
        two_terms = (LogPowerTerm(depth=1), LogPowerTerm(depth=2))
        fmax = GentlyGrowingFn(name="m", terms=two_terms, combine="max")
        fsum = GentlyGrowingFn(name="s", terms=two_terms, combine="sum")
        assert fmax.eval_exact(65536) == 16
        assert fsum.eval_exact(65536) == 20


class TestGentlyGrowing:
    def test_loglog_not_refuted(self):
        rep = check_gently_growing(parse_growth_fn("loglog2"), a=2, n0=4)
        assert rep.verdict == "not refuted"
        assert rep.monotone_ok and rep.unbounded and rep.positivity_ok
        assert any(s.status == "holds" for s in rep.samples if s.x >= 16)

    def test_log2_refuted(self):
        rep = check_gently_growing(parse_growth_fn("log2"), a=10, n0=4)
        assert rep.verdict == "refuted"
        assert any(s.status == "violated" for s in rep.samples)

    def test_constant_refuted_as_bounded(self):
        const = GentlyGrowingFn(name="c", terms=(LogPowerTerm(beta=Fraction(0)),))
        rep = check_gently_growing(const, a=2, n0=4)
        assert rep.verdict == "refuted"
        assert not rep.unbounded


class TestThresholdPrime:
    def test_toy_threshold(self):
        res = find_threshold_prime(parse_growth_fn("loglog2"), 1, b=Fraction(1, 2))
        assert res.prime == 17
        assert res.second_inequality is True
        assert res.evidence == "deterministic-miller-rabin"

    def test_prime_exceeds_m(self):
        for m in (1, 2, 3):
            res = find_threshold_prime(parse_growth_fn("loglog2"), m, b=Fraction(1, 2))
            assert res.prime > m

    def test_infeasible_reports_bitlength(self):
        res = find_threshold_prime(parse_growth_fn("loglog2"), 18)
        assert res.infeasible
        # any p with f(p) >= 36 needs at least 2^36 bits
        bits = res.bitlength_lower_bound
        assert compare(bits, 2 ** 36) in (Comparison.GREATER, Comparison.EQUAL)

    def test_fitter(self):
        consts = fit_search_constants(parse_growth_fn("loglog2"), [1, 2, 3])
        assert 0 < consts.b <= 1
        assert consts.c == 1
        assert consts.provenance == "fitted"


class TestPlanMain:
    def test_toy_run(self):
        certs = plan_main(parse_growth_fn("loglog2"), TOY_CONSTANTS,
                              b=1, c=1, k_max=2)
        assert certs[0].kind == "exact" and certs[0].prime == 17
        assert certs[1].kind == "symbolic"
        assert compare(certs[1].lower_bound,
                       tower_pow(2, 2 ** 36)) is Comparison.EQUAL
        assert certs[1].mhat_prev.int_value == 18
        assert certs[2].kind == "symbolic"

    def test_toy_conditions_text(self):
        certs = plan_main(parse_growth_fn("loglog2"), TOY_CONSTANTS, k_max=1)
        texts = [c.text for c in certs[1].conditions]
        assert texts == ["p_1 > 2*mhat_0", "f(p_1) >= 2*mhat_0"]
        values = [c.value for c in certs[1].conditions]
        assert values == ["36", "36"]

    def test_standard_constants_symbolic_p0(self):
        certs = plan_main(parse_growth_fn("loglog2"), PlannerConstants(),
                              k_max=1)
        assert certs[0].kind == "symbolic"
        assert compare(certs[0].lower_bound,
                       tower_pow(2, 2 ** 18)) is Comparison.EQUAL

    def test_standard_k1_conditions_golden(self):
        certs = plan_main(parse_growth_fn("loglog2"), PlannerConstants(),
                              k_max=1)
        got = {
            "origin": certs[1].origin,
            "kind": certs[1].kind,
            "conditions": [c.to_json() for c in certs[1].conditions],
        }
        expected = json.loads((GOLDEN / "thmA_standard_k1.json").read_text())
        assert got == expected

    def test_synthesized_thresholds_strictly_increase(self):
        certs = plan_main(parse_growth_fn("loglog2"), TOY_CONSTANTS, k_max=3)
        bounds = [TowerInt.exact(certs[0].prime)] + \
            [c.lower_bound for c in certs[1:]]
        for a, b in zip(bounds, bounds[1:]):
            assert compare(a, b) is Comparison.LESS

    def test_every_exact_prime_reverifies(self):
        certs = plan_main(parse_growth_fn("loglog2"), TOY_CONSTANTS,
                              b=Fraction(1, 2), k_max=1)
        for cert in certs:
            if cert.kind == "exact":
                for cond in cert.conditions:
                    assert cond.verified in (True, None)

    def test_constants_labels(self):
        assert PlannerConstants().label == "standard constants"
        assert TOY_CONSTANTS.label == "demonstrative (toy constants)"
        assert PlannerConstants().threshold_const == 18  # derived 2*multiplier


class TestVariation1:
    def test_rule_records(self):
        certs = plan_variation1(parse_growth_fn("logloglog2"), k_max=1,
                                consts=TOY_CONSTANTS)
        assert certs[0].prime == 65537  # f(p) >= 2 means logloglog2 p >= 2
        texts = [c.text for c in certs[1].conditions]
        assert texts[0] == "p_1 >= p_0^(2*mhat_0)"
        assert texts[1] == "f(p_1) >= 2*mhat_0"
        assert certs[1].kind == "symbolic"

    def test_lower_bound_dominates_power_rule(self):
        certs = plan_variation1(parse_growth_fn("logloglog2"), k_max=1,
                                consts=TOY_CONSTANTS)
        p0, mhat = 65537, 65538
        power_bound = tower_pow(p0, 2 * mhat)
        assert compare(certs[1].lower_bound, power_bound) is not Comparison.LESS


class TestVariation2:
    def test_h1_plan(self):
        plan = plan_variation2(1, k_max=2)
        assert plan.certificates[0].kind == "exact"
        assert plan.certificates[0].prime == 262147
        assert plan.certificates[1].kind == "symbolic"
        assert all(c.equivalent for c in plan.chain_checks)

    def test_h1_window_shape(self):
        plan = plan_variation2(1, k_max=1)
        lo, hi = plan.certificates[0].log2p_window
        assert compare(lo, 2 ** 18) is Comparison.EQUAL
        assert compare(hi, 2 ** 36) is Comparison.EQUAL

    def test_windows_nonempty_factor_two(self):
        for h in (1, 2, 3):
            plan = plan_variation2(h, k_max=1)
            for cert in plan.certificates:
                lo, hi = cert.log2p_window
                assert compare(lo, hi) in (Comparison.LESS, Comparison.EQUAL)

    @pytest.mark.parametrize("h", [1, 2, 3, 4])
    def test_algebra_identity(self, h):
        assert variation2_algebra_identity(h)

    def test_boundary_equality_case(self):
        # log p exactly at the window top: every step holds with equality
        rep = verify_variation2_equivalence(Fraction(2 * (18 * 1) ** 2), 1, 2)
        assert rep.equivalent
        assert all(v for _, v in rep.steps)

    def test_equivalence_50_randomized(self):
        rng = random.Random(97)
        for _ in range(50):
            h = rng.randint(1, 4)
            m_hat = rng.randint(1, 50)
            # log2 p as an exact rational around the window
            window = 2 * (18 * m_hat) ** h
            log2_p = Fraction(rng.randint(1, 3 * window), rng.randint(1, 4))
            rep = verify_variation2_equivalence(log2_p, m_hat, h)
            assert rep.equivalent, (h, m_hat, log2_p)

    def test_tower_path(self):
        rep = verify_variation2_equivalence(
            TowerInt.exact(2 ** 10), TowerInt.exact(3), 1)
        assert rep.equivalent


class TestMainChains:
    def test_shape_instance_p13(self):
        rep = verify_main_chains(13, 1, b=1)
        assert rep.lower_ok
        assert rep.upper_ok  # f not supplied: numeric f-conditions unchecked
        assert rep.c == Fraction(1, 1944)
        assert rep.tau_chain  # 13 < 1092 < 2197
        assert rep.tau_at_least_p

    def test_exponent_identities(self):
        rep = verify_main_chains(13, 1, b=1)
        assert rep.coupling_1944
        assert rep.exponent_identity
        assert rep.lower_exponent_step

    def test_with_f_and_feasible_instance(self):
        # hypothetical p = 2^(2^18 + 1): f(p) = log2(2^18 + 1) > 18 certified
        f = parse_growth_fn("loglog2")
        p = 2 ** (2 ** 18 + 1)
        rep = verify_main_chains(p, 1, b=Fraction(1, 2), f=f)
        assert rep.upper_f_condition is True
        assert rep.threshold_condition is True
        assert rep.upper_ok and rep.lower_ok
        assert rep.c == Fraction(1, 3888)

    def test_c_scales_with_b(self):
        assert verify_main_chains(13, 1, b=2).c == Fraction(2, 1944)


def test_tower_floor_int():
    assert tower_floor_int(TowerInt.exact(100), 64) == 100
    t = tower_pow(2, 2 ** 36)  # certified (depth 2)
    assert tower_floor_int(t, 1 << 16) is None
    small = tower_pow(2, 100)
    assert tower_floor_int(small, 1 << 16) == 2 ** 100
