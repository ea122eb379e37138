import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wpalab.errors import DegreeMismatchError, SpecError
from wpalab.perm import (
    Permutation,
    PermGroup,
    compose,
    generate,
    ensure_materialized,
    is_transitive,
    orbits,
    parse_group_spec,
    parse_sequence_spec,
    psl2_order,
)


def perm_of(*images):
    return Permutation(images)


class TestCompose:
    def test_identity_left(self):
        p = perm_of(1, 2, 0)
        assert compose(Permutation.identity(3), p) == p

    def test_inverse_gives_identity(self):
        p = perm_of(2, 0, 3, 1)
        assert compose(p, p.inverse()).is_identity()
        assert compose(p.inverse(), p).is_identity()

    def test_hand_evaluated_example(self):
        # (p o q)(x) = p(q(x)) with p = (0 1), q = (1 2):
        #   0 -> q 0 -> p 1,  1 -> q 2 -> p 2,  2 -> q 1 -> p 0
        a = Permutation.from_cycles(3, [(0, 1)])
        b = Permutation.from_cycles(3, [(1, 2)])
        c = compose(a, b)
        assert c.images == (1, 2, 0)
        assert c(0) == 1 and c(1) == 2 and c(2) == 0

    def test_degree_mismatch(self):
        with pytest.raises(DegreeMismatchError):
            compose(Permutation.identity(3), Permutation.identity(4))


@given(st.permutations(list(range(6))), st.permutations(list(range(6))),
       st.permutations(list(range(6))))
def test_compose_associative(a, b, c):
    pa, pb, pc = Permutation(a), Permutation(b), Permutation(c)
    assert compose(compose(pa, pb), pc) == compose(pa, compose(pb, pc))


@given(st.permutations(list(range(7))))
def test_inverse_roundtrip(imgs):
    p = Permutation(imgs)
    assert p.inverse().inverse() == p
    assert compose(p, p.inverse()).is_identity()


@given(st.permutations(list(range(6))))
def test_order_matches_iteration(imgs):
    p = Permutation(imgs)
    k = p.order()
    assert (p ** k).is_identity()
    for j in range(1, k):
        assert not (p ** j).is_identity()


def test_permutation_rejects_non_bijection():
    with pytest.raises(SpecError):
        Permutation((0, 0, 2))


class TestGenerate:
    def test_identity_only(self):
        g = generate([Permutation.identity(4)])
        assert g.order == 1
        assert g.elements == (Permutation.identity(4),)

    def test_symmetric_group_from_two_gens(self):
        g = generate([Permutation.from_cycles(3, [(0, 1)]),
                      Permutation.from_cycles(3, [(0, 1, 2)])])
        assert g.order == 6

    def test_psl2_5_order(self):
        g = ensure_materialized(parse_group_spec("psl2:5"))
        assert g.order == 60 == psl2_order(5)

    def test_cap_exceeded_returns_unmaterialized(self):
        g = generate([Permutation.from_cycles(5, [(0, 1)]),
                      Permutation.from_cycles(5, [(0, 1, 2, 3, 4)])], cap=20)
        assert not g.materialized
        assert g.order is None

    def test_closure_is_generator_order_independent(self):
        a = Permutation.from_cycles(4, [(0, 1)])
        b = Permutation.from_cycles(4, [(0, 1, 2, 3)])
        g1 = generate([a, b])
        g2 = generate([b, a])
        assert g1.elements == g2.elements

    def test_identity_is_first_element(self):
        # identity is the lexicographic minimum of any element list
        g = generate([Permutation.from_cycles(4, [(0, 1, 2, 3)])])
        assert g.elements[0].is_identity()


class TestOrbits:
    def test_identity_group_singletons(self):
        g = PermGroup([Permutation.identity(3)])
        assert orbits(g) == [(0,), (1,), (2,)]

    def test_cycle_is_transitive(self):
        g = parse_group_spec("cyc:5")
        assert orbits(g) == [(0, 1, 2, 3, 4)]
        assert is_transitive(g)

    def test_partial_orbits(self):
        g = PermGroup([Permutation.from_cycles(3, [(0, 1)])])
        assert orbits(g) == [(0, 1), (2,)]

    @pytest.mark.parametrize("spec", ["cyc:4", "sym:4", "alt:4", "psl2:5"])
    def test_named_families_transitive(self, spec):
        g = parse_group_spec(spec)
        assert is_transitive(g)

    def test_restriction_to_each_orbit_is_transitive(self):
        g = parse_group_spec("perm:6:(0 1);(2 3 4)")
        parts = orbits(g)
        assert parts == [(0, 1), (2, 3, 4), (5,)]
        for orbit in parts:
            pos = {pt: i for i, pt in enumerate(orbit)}
            restricted = [
                Permutation([pos[gen.images[pt]] for pt in orbit])
                for gen in g.generators
            ]
            assert is_transitive(PermGroup(restricted))


class TestParse:
    @pytest.mark.parametrize(
        "spec,degree,order",
        [
            ("cyc:3", 3, 3),
            ("cyc:1", 1, 1),
            ("sym:4", 4, 24),
            ("sym:1", 1, 1),
            ("alt:3", 3, 3),
            ("alt:4", 4, 12),
            ("alt:5", 5, 60),
            ("alt:6", 6, 360),
            ("psl2:5", 6, 60),
            ("psl2:7", 8, 168),
            ("psl2:2", 3, 6),
            ("psl2:3", 4, 12),
        ],
    )
    def test_named_families_materialize_to_claimed_order(self, spec, degree, order):
        g = parse_group_spec(spec)
        assert g.degree == degree
        assert g.order == order
        assert ensure_materialized(g).order == order

    def test_psl2_13_formula(self):
        g = parse_group_spec("psl2:13")
        assert g.degree == 14
        assert g.order == 13 * (13 ** 2 - 1) // 2 == 1092

    def test_perm_spec(self):
        g = parse_group_spec("perm:4:(0 1)(2 3);(0 2)")
        assert g.degree == 4
        mat = ensure_materialized(g)
        assert mat.order == 8  # dihedral on the square's vertices

    def test_perm_spec_commas(self):
        g = parse_group_spec("perm:3:(0,1,2)")
        assert ensure_materialized(g).order == 3

    @pytest.mark.parametrize("bad", ["", "cyc", "cyc:x", "psl2:6", "what:3",
                                     "perm:3:(0 1 5)", "perm:3:(0 0)", "cyc:0"])
    def test_malformed_specs_rejected(self, bad):
        with pytest.raises(SpecError):
            parse_group_spec(bad)

    def test_degree_overflow(self):
        from wpalab.errors import DegreeCapError
        with pytest.raises(DegreeCapError):
            parse_group_spec("cyc:50", degree_cap=10)

    def test_sequence_spec(self):
        seq = parse_sequence_spec("cyc:2, cyc:3 ,cyc:2")
        assert [g.name for g in seq] == ["cyc:2", "cyc:3", "cyc:2"]


@pytest.mark.parametrize("m", range(2, 7))
def test_sym_order_formula(m):
    assert ensure_materialized(parse_group_spec(f"sym:{m}")).order == math.factorial(m)


@pytest.mark.parametrize("m", range(3, 7))
def test_alt_order_formula(m):
    assert ensure_materialized(parse_group_spec(f"alt:{m}")).order == math.factorial(m) // 2


@pytest.mark.parametrize("m", range(1, 8))
def test_cyc_order_formula(m):
    assert ensure_materialized(parse_group_spec(f"cyc:{m}")).order == m
