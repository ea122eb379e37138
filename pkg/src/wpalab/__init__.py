"""Desk-scale laboratory for subgroup growth of iterated wreath products in
product action: finite truncations, exact subgroup counting, certified
tower arithmetic, niceness checks, growth-bound verification, and prime-
sequence planning."""

__version__ = "0.1.0"

from .perm import (
    Permutation,
    PermGroup,
    compose,
    generate,
    ensure_materialized,
    orbits,
    is_transitive,
    parse_group_spec,
    parse_sequence_spec,
)
from .counting import (
    SubgroupLattice,
    subgroup_lattice,
    s_n,
    minimal_index,
    rank,
    elem_abelian_max,
    gaussian_binomial,
    galois_number,
)
from .towers import (
    Comparison,
    TowerInt,
    compare,
    tower_eval,
    tower_levels,
    persistence_level,
    verify_tail_sum_bound,
)
from .wreath import (
    WreathProduct,
    IteratedWreath,
    product_action,
    imprimitive_action,
    iterated_wpa,
    project,
)
from .nice import NiceSequenceSpec, Psl2Facts, check_nice, make_spec, psl2_facts, psl2_group
from .growth import (
    l_of_n,
    prefix_constants,
    upper_bound_exponent,
    lower_bound_point,
    verify_base_containment,
    verify_bounds_exact,
)
from .planner import (
    GentlyGrowingFn,
    PlannerConstants,
    TOY_CONSTANTS,
    check_gently_growing,
    find_threshold_prime,
    parse_growth_fn,
    plan_main,
    plan_variation1,
    plan_variation2,
    verify_main_chains,
    verify_variation2_equivalence,
)
