import random
from fractions import Fraction

import pytest

from wpalab.errors import SpecError
from wpalab.towers import (
    Comparison,
    TowerInt,
    compare,
    compare_le,
    persistence_level,
    tower_add,
    tower_eval,
    tower_iterated_log2,
    tower_levels,
    tower_log2,
    tower_mul,
    tower_mul_frac,
    tower_pow,
    tower_pow_frac,
    verify_tail_sum_bound,
)


class TestTowerEval:
    def test_all_twos(self):
        levels = tower_levels([2, 2, 2, 2], 4)
        assert [t.int_value for t in levels] == [1, 2, 4, 16, 65536]

    def test_projective_line_sizes(self):
        levels = tower_levels([6, 8], 2)
        assert levels[1].int_value == 6
        assert levels[2].int_value == 8 ** 6 == 262144

    def test_level_seven_exceeds_googolplex(self):
        big = tower_eval([2] * 7, 7)
        assert not big.is_exact
        googolplex = tower_pow(TowerInt.exact(10), tower_pow(10, 100))
        assert compare(big, googolplex) is Comparison.GREATER

    def test_entries_below_two_rejected(self):
        with pytest.raises(SpecError):
            tower_eval([2, 1, 2], 3)

    def test_strictly_increasing(self):
        levels = tower_levels([2, 3, 2, 5], 4)
        for prev, cur in zip(levels, levels[1:]):
            assert compare(prev, cur) is Comparison.LESS

    def test_exactness_boundary(self):
        # a-hat_5 of all 2s is 2^65536: still exact; a-hat_6 is certified
        levels = tower_levels([2] * 6, 6)
        assert levels[5].is_exact
        assert levels[5].int_value == 2 ** 65536
        assert not levels[6].is_exact


class TestFindM:
    def test_all_twos_c2(self):
        assert persistence_level([2] * 6, 2) == 1

    def test_all_twos_c3(self):
        assert persistence_level([2] * 6, 3) == 3

    def test_c_one_is_immediate(self):
        for a in ([2] * 5, [6, 8, 12, 14], [3, 2, 7, 2]):
            assert persistence_level(a, 1) == 1

    def test_fractional_c(self):
        assert persistence_level([2] * 6, Fraction(5, 2)) == 3  # 2.5*2=5 > 4, 2.5*4=10 <= 16


class TestTailSumBound:
    def test_all_twos_certificate(self):
        cert = verify_tail_sum_bound([2] * 5, 5)
        assert cert.m2 == 1
        assert cert.threshold == 2  # max(M(2)+1, M(M(2))) = max(2, 1)
        assert cert.all_verified
        row3 = [r for r in cert.final_rows if r.n == 3][0]
        assert row3.partial_sum == 1 + 2 + 4 + 16 == 23
        assert row3.bound == 48

    def test_projective_line_sizes(self):
        cert = verify_tail_sum_bound([6, 8, 12, 14], 4)
        assert cert.all_verified
        exact_rows = [r for r in cert.final_rows if r.holds is not None]
        assert len(exact_rows) >= 2  # n = 2, 3 exactly checkable
        assert cert.exact_levels >= 4

    def test_partial_beyond_exact_reach(self):
        cert = verify_tail_sum_bound([2] * 8, 8)
        assert cert.partial
        assert cert.all_verified  # every exactly-reachable row holds

    def test_rejects_bad_entries(self):
        with pytest.raises(SpecError):
            verify_tail_sum_bound([2, 1], 2)


class TestCompare:
    def test_exact_pairs(self):
        assert compare(5, 7) is Comparison.LESS
        assert compare(7, 5) is Comparison.GREATER
        assert compare(6, 6) is Comparison.EQUAL

    def test_exact_tower_at_threshold(self):
        a5 = tower_eval([2] * 5, 5)
        assert compare(a5, TowerInt.exact(2 ** 65536)) is Comparison.EQUAL

    def test_deep_towers_ordered_by_base(self):
        a = tower_eval([2] * 6, 6)
        b = tower_eval([3] * 6, 6)
        assert compare(a, b) is Comparison.LESS
        assert compare(b, a) is Comparison.GREATER

    def test_point_certificates_equal(self):
        x = TowerInt.certified(2, Fraction(36), Fraction(36))
        y = TowerInt.certified(2, Fraction(36), Fraction(36))
        assert compare(x, y) is Comparison.EQUAL

    def test_certified_vs_exact(self):
        big = tower_eval([2] * 7, 7)
        assert compare(big, 10 ** 100) is Comparison.GREATER
        assert compare(10 ** 100, big) is Comparison.LESS


def random_tower(rng, max_len=4, max_base=6):
    n = rng.randint(1, max_len)
    a = [rng.randint(2, max_base) for _ in range(n)]
    # keep it exactly evaluable so the differential oracle exists
    while True:
        try:
            val = 1
            for base in a:
                if val * base.bit_length() > 4000:
                    raise OverflowError
                val = base ** val
            return a, val
        except OverflowError:
            a = a[:-1] or [rng.randint(2, max_base)]


def test_differential_certified_vs_exact_1000():
    """Certified comparison must agree with exact comparison whenever it
    decides, and must decide clearly separated pairs."""
    rng = random.Random(20260810)
    checked = decided = 0
    for _ in range(1000):
        a, va = random_tower(rng)
        b, vb = random_tower(rng)
        ta = tower_eval(a, len(a)).as_certified()
        tb = tower_eval(b, len(b)).as_certified()
        verdict = compare(ta, tb)
        checked += 1
        if verdict is Comparison.LESS:
            assert va < vb
            decided += 1
        elif verdict is Comparison.GREATER:
            assert va > vb
            decided += 1
        elif verdict is Comparison.EQUAL:
            assert va == vb
            decided += 1
        else:
            # indeterminate is only acceptable when the values are close
            assert va <= 4 * vb and vb <= 4 * va
    assert checked == 1000
    assert decided >= 900


class TestArithmetic:
    def test_mul_exact(self):
        assert tower_mul(6, 7).int_value == 42

    def test_mul_certified_sound(self):
        a = tower_eval([2] * 6, 6)  # 2^(2^65536)
        prod = tower_mul(a, a)
        assert compare(a, prod) is not Comparison.GREATER
        # a^2 is still well below a tower one level higher
        assert compare(prod, tower_eval([2] * 7, 7)) is Comparison.LESS

    def test_add_exact(self):
        assert tower_add(6, 7).int_value == 13

    def test_pow_spills_to_certified(self):
        t = tower_pow(2, 2 ** 22)
        assert not t.is_exact
        assert compare(t, 2 ** 4096) is Comparison.GREATER

    def test_pow_roundtrip_with_log(self):
        import math

        t = tower_pow(3, 100)
        lo, hi = tower_log2(t).lift(0)
        true = 100 * math.log2(3)
        assert float(lo) <= true + 1e-9
        assert float(hi) >= true - 1e-9
        assert float(hi - lo) < 1e-10

    def test_mul_frac_exact(self):
        assert tower_mul_frac(TowerInt.exact(12), Fraction(3, 2)).int_value == 18

    def test_mul_frac_shrinking_deep_tower(self):
        a = tower_eval([2] * 6, 6)
        scaled = tower_mul_frac(a, Fraction(1, 36))
        assert compare(scaled, a) is not Comparison.GREATER
        assert compare(scaled, tower_eval([2] * 5, 5)) is Comparison.GREATER

    def test_pow_frac(self):
        t = tower_pow_frac(TowerInt.exact(16), Fraction(1, 2))
        lo, hi = t.lift(0)
        assert lo <= 4 <= hi

    def test_iterated_log(self):
        t = tower_eval([2] * 6, 6)  # 2^(2^65536): log2^2 = 65536, log2^3 = 16
        shallow = tower_iterated_log2(t, 3)
        lo, hi = shallow.lift(0)
        assert lo <= 16 <= hi
        deep = tower_iterated_log2(t, 1)
        assert not deep.is_exact

    def test_compare_le_helper(self):
        assert compare_le(3, 5) is True
        assert compare_le(5, 3) is False


def test_describe_renderings():
    assert TowerInt.exact(65536).describe() == "65536"
    assert "bit integer" in TowerInt.exact(2 ** 300).describe()
    assert "log2^" in tower_eval([2] * 7, 7).describe()


def test_json_roundtrippable_fields():
    d = tower_eval([2] * 7, 7).to_json()
    assert d["kind"] == "certified"
    assert set(d) == {"kind", "depth", "log_lo", "log_hi"}
