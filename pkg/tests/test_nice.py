from fractions import Fraction

import pytest

from wpalab.errors import SpecError
from wpalab.nice import (
    EXCEPTIONAL_MU,
    check_nice,
    make_spec,
    psl2_facts,
    psl2_group,
)
from wpalab.counting import minimal_index, rank, subgroup_lattice, elem_abelian_max
from wpalab.perm import ensure_materialized, is_transitive


class TestPsl2Group:
    @pytest.mark.parametrize("p,degree,order", [(5, 6, 60), (7, 8, 168), (13, 14, 1092)])
    def test_closure_orders(self, p, degree, order):
        g = psl2_group(p)
        assert g.degree == degree
        assert ensure_materialized(g).order == order

    def test_transitive_on_projective_line(self):
        for p in (5, 7, 11):
            assert is_transitive(psl2_group(p))

    def test_non_prime_rejected(self):
        with pytest.raises(SpecError):
            psl2_group(9)


class TestPsl2Facts:
    def test_p13(self):
        facts = psl2_facts(13)
        assert facts.order == 1092
        assert facts.mu == 14
        assert facts.mu_formula_valid
        assert facts.rank == 2
        assert facts.chain_holds

    def test_p5_exceptional(self):
        facts = psl2_facts(5)
        assert facts.mu_formula == 6
        assert facts.mu == 5
        assert not facts.mu_formula_valid
        assert not facts.chain_holds  # p^3 = 125 = mu^3 breaks strictness

    def test_p7_chain(self):
        facts = psl2_facts(7)
        assert facts.order == 168
        assert 7 < 168 < 343 < 512 or not facts.chain_holds
        # p = 7 is exceptional: mu = 7, so the strict chain fails
        assert not facts.mu_formula_valid

    def test_p_below_5_rejected(self):
        with pytest.raises(SpecError):
            psl2_facts(3)

    @pytest.mark.parametrize("p", [13, 17, 19, 23])
    def test_formula_chain_for_large_p(self, p):
        facts = psl2_facts(p)
        assert facts.mu == p + 1
        assert facts.chain_holds

    @pytest.mark.parametrize("p", [5, 7])
    def test_exceptional_mu_matches_exact_lattice(self, p):
        lat = subgroup_lattice(psl2_group(p))
        assert minimal_index(lat) == EXCEPTIONAL_MU[p]

    def test_facts_match_exact_computation_p13(self):
        # order 1092 is the only exactly checkable case above the exceptions
        lat = subgroup_lattice(psl2_group(13))
        facts = psl2_facts(13)
        assert minimal_index(lat) == facts.mu
        assert rank(lat) == facts.rank
        infos = {i.prime: i.exponent for i in elem_abelian_max(lat)}
        assert infos[13] == 1


class TestCheckNice:
    def test_psl2_facts_mode_passes(self):
        spec = make_spec("psl2:13,psl2:17,psl2:19", r=2, t=3)
        report = check_nice(spec, mode="facts")
        assert report.n1_to_n4_pass
        assert report.n5_trend == "not refuted"
        assert report.overall

    def test_constant_sequence_refutes_n5(self):
        spec = make_spec("cyc:2", r=1, t=1, rule="constant")
        report = check_nice(spec, prefix_len=4, mode="exact")
        assert report.n5_trend == "refuted"
        assert not report.overall

    def test_sym3_with_r1_fails_n2(self):
        spec = make_spec("sym:3", r=1, t=3)
        report = check_nice(spec, mode="exact")
        n2 = [v for v in report.verdicts if v.condition == "N.2"]
        assert any(not v.passed for v in n2)

    def test_exact_and_facts_agree_for_p13(self):
        spec = make_spec("psl2:13", r=2, t=3)
        exact = check_nice(spec, mode="exact")
        facts = check_nice(spec, mode="facts")
        ge, gf = exact.prefix[0], facts.prefix[0]
        assert (ge.order, ge.rank, ge.mu) == (gf.order, gf.rank, gf.mu)
        assert exact.n1_to_n4_pass == facts.n1_to_n4_pass

    def test_unitriangular_witness_order_p(self):
        # N.3 witness: PSL2(p) contains an elementary abelian of order p,
        # and tau <= p^3
        for p in (5, 7, 13):
            lat = subgroup_lattice(psl2_group(p))
            infos = {i.prime: i.exponent for i in elem_abelian_max(lat)}
            assert infos[p] >= 1
            assert lat.order <= p ** 3

    def test_facts_mode_rejects_non_psl2(self):
        spec = make_spec("sym:3,psl2:13", r=2, t=3)
        with pytest.raises(SpecError):
            check_nice(spec, mode="facts")

    def test_fractional_t(self):
        spec = make_spec("cyc:2,cyc:3", r=1, t=Fraction(3, 2))
        report = check_nice(spec, mode="exact")
        assert report.n1_to_n4_pass

    def test_report_json_shape(self):
        spec = make_spec("psl2:13,psl2:17", r=2, t=3)
        d = check_nice(spec, mode="facts").to_json()
        assert d["overall"] is True
        assert {v["condition"] for v in d["verdicts"]} == {"N.1", "N.2", "N.3", "N.4"}
        assert len(d["prefix"]) == 2

    def test_report_table_renders(self):
        spec = make_spec("psl2:13,psl2:17", r=2, t=3)
        table = check_nice(spec, mode="facts").format_table()
        assert "N.5 trend" in table
