"""Growth machinery for the product-action towers: the stabilization level
l(n), the upper-bound exponent 3*r*t*|level-l degree|, the lower-bound
evaluation point, base-subgroup stabilization, and an exactness harness that
checks the proved inequalities on materializable towers (no tolerance: a
violation is an implementation bug, not noise).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .counting import (
    DEFAULT_LATTICE_CAP,
    minimal_index,
    rank,
    elem_abelian_max,
    subgroup_lattice,
    s_n,
)
from .errors import CapExceededError, SpecError
from .nice import psl2_facts
from .perm import DEFAULT_ORDER_CAP, PermGroup, ensure_materialized
from .towers import TowerInt, tower_levels, tower_mul_frac, tower_pow
from .wreath import DEFAULT_DEGREE_CAP, IteratedWreath, base_subgroup_elements, iterated_wpa


def _mu_values(seq: list[PermGroup], mode: str, cap: int) -> list[int]:
    """mu(S_k) for each prefix entry (exact lattices or PSL2 facts)."""
    out = []
    for g in seq:
        if mode == "facts":
            name = g.name or ""
            if not name.startswith("psl2:"):
                raise SpecError(f"facts mode needs psl2 entries, got {name!r}")
            out.append(psl2_facts(int(name.split(":")[1])).mu)
        else:
            out.append(minimal_index(subgroup_lattice(g, cap)))
    return out


def l_of_n(seq: list[PermGroup], n: int, mode: str = "exact",
           cap: int = DEFAULT_LATTICE_CAP) -> int:
    """Minimal l >= 0 with n < mu(S_{l+1}); l = 0 uses the first entry."""
    if n < 1:
        raise SpecError("n must be >= 1")
    mus = _mu_values(seq, mode, cap)
    for l, mu in enumerate(mus):
        if n < mu:
            return l
    raise CapExceededError(
        f"prefix exhausted: n = {n} >= mu(S_{len(seq)}) = {mus[-1]}")


@dataclass(frozen=True)
class PrefixConstants:
    """Empirical (r, t) valid on the prefix; t rounded up to a 1/1000 grid."""

    r: int
    t: Fraction

    def to_json(self) -> dict:
        return {"r": self.r, "t": str(self.t), "kind": "prefix-valid constants"}


def prefix_constants(seq: list[PermGroup], cap: int = DEFAULT_LATTICE_CAP,
                     grid: int = 1000) -> PrefixConstants:
    """Max rank over the prefix, and the minimal grid t with
    |S_k| <= |E_k|^t and |S_k| <= mu(S_k)^t for every k."""
    r = 0
    t_num = grid  # t >= 1
    for g in seq:
        lat = subgroup_lattice(g, cap)
        if lat.order < 2:
            raise SpecError("sequence entries must be non-trivial")
        r = max(r, rank(lat))
        infos = elem_abelian_max(lat)
        best_e = max(i.prime ** i.exponent for i in infos)
        mu = minimal_index(lat)
        for base in (best_e, mu):
            # minimal integer num with base^num >= order^grid
            while base ** t_num < lat.order ** grid:
                t_num += 1
    return PrefixConstants(r=r, t=Fraction(t_num, grid))


def degree_tower(seq: list[PermGroup], level: int) -> TowerInt:
    """|level-l point count| as a TowerInt (level 0 is 1 by convention)."""
    return tower_levels([g.degree for g in seq], level)[level]


@dataclass(frozen=True)
class UpperBoundPart:
    n: int
    level: int
    exponent: TowerInt  # 3*r*t*degree_tower(level)
    bound: TowerInt  # n ** exponent

    def to_json(self) -> dict:
        return {"n": self.n, "l": self.level,
                "exponent": self.exponent.to_json(), "bound": self.bound.to_json()}


def upper_bound_exponent(seq: list[PermGroup], n: int, r, t,
                         mode: str = "exact",
                         cap: int = DEFAULT_LATTICE_CAP) -> UpperBoundPart:
    """Exponent and value of the upper bound  s_n <= n^(3*r*t*m-hat_l)."""
    level = l_of_n(seq, n, mode, cap)
    coeff = 3 * Fraction(r) * Fraction(t)
    exponent = tower_mul_frac(degree_tower(seq, level), coeff)
    return UpperBoundPart(n=n, level=level, exponent=exponent,
                          bound=tower_pow(n, exponent))


@dataclass(frozen=True)
class LowerBoundPoint:
    level: int
    n_star: TowerInt  # |S_{l+1}| ** (3 * m-hat_l)
    exponent: TowerInt  # m-hat_l / (12 t)
    exponent_coeff: Fraction  # 1 / (12 t), paired with m-hat_l

    def to_json(self) -> dict:
        return {"l": self.level, "n_star": self.n_star.to_json(),
                "exponent": self.exponent.to_json(),
                "exponent_coeff": str(self.exponent_coeff)}


def lower_bound_point(seq: list[PermGroup], level: int, t) -> LowerBoundPoint:
    """The special point n* and claimed exponent of the lower bound."""
    if level + 1 > len(seq):
        raise SpecError(f"level {level} needs entry S_{level + 1}")
    s_next = seq[level]
    order = s_next.order if s_next.order is not None else \
        ensure_materialized(s_next).order
    mhat = degree_tower(seq, level)
    n_star = tower_pow(order, tower_mul_frac(mhat, Fraction(3)))
    coeff = Fraction(1, 12) / Fraction(t)
    return LowerBoundPoint(level=level, n_star=n_star,
                           exponent=tower_mul_frac(mhat, coeff),
                           exponent_coeff=coeff)


@dataclass(frozen=True)
class BaseContainmentReport:
    level: int
    n: int
    mu_bottom: int
    subgroup_count_small_index: int
    all_contain_base: bool
    s_n_level: int
    s_n_previous: int

    @property
    def ok(self) -> bool:
        return self.all_contain_base and self.s_n_level == self.s_n_previous

    def to_json(self) -> dict:
        return {"i": self.level, "n": self.n, "mu_bottom": self.mu_bottom,
                "subgroups_of_index_le_n": self.subgroup_count_small_index,
                "all_contain_base": self.all_contain_base,
                "s_n_W_i": self.s_n_level, "s_n_W_prev": self.s_n_previous,
                "ok": self.ok}


def verify_base_containment(
    seq: list[PermGroup], i: int, n: int,
    lattice_cap: int = DEFAULT_LATTICE_CAP,
    order_cap: int = DEFAULT_ORDER_CAP,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> BaseContainmentReport:
    """Exhaustive check of the stabilization step: for n < mu(S_i), every
    subgroup of W_i of index <= n contains the base S_i^(prev degree), and
    s_n(W_i) = s_n(W_{i-1})."""
    if i < 2:
        raise SpecError("stabilization needs level i >= 2")
    itw = iterated_wpa(seq, i, degree_cap=degree_cap, order_cap=order_cap)
    if itw.levels[i] is None:
        raise CapExceededError(f"level {i} is symbolic (degree beyond cap)")
    mu_bottom = minimal_index(subgroup_lattice(seq[i - 1], lattice_cap))
    if n >= mu_bottom:
        raise SpecError(f"need n < mu(S_{i}) = {mu_bottom}, got n = {n}")

    w_i = ensure_materialized(itw.levels[i], cap=order_cap)
    lat = subgroup_lattice(w_i, lattice_cap)
    base = base_subgroup_elements(itw, i, order_cap=order_cap)
    elem_index = {e: j for j, e in enumerate(lat.parent.elements)}
    base_idx = frozenset(elem_index[e] for e in base)

    small = [s for s in lat.subgroups if lat.order // s.order <= n]
    contain = all(base_idx.issubset(s.indices) for s in small)

    prev_group = itw.levels[i - 1]
    s_prev = s_n(subgroup_lattice(prev_group, lattice_cap), n)
    return BaseContainmentReport(
        level=i, n=n, mu_bottom=mu_bottom,
        subgroup_count_small_index=len(small),
        all_contain_base=contain,
        s_n_level=len(small),
        s_n_previous=s_prev,
    )


@dataclass(frozen=True)
class GrowthCertificate:
    """Per-n record of the exact bound checks on a materializable tower."""

    n: int
    level: int
    exponent_tower: TowerInt  # m-hat_{l(n)}: the growth-type exponent
    s_n_exact: int
    upper_exponent: Fraction  # 3*r*t*m-hat_l as an exact rational
    upper_holds: bool

    def to_json(self) -> dict:
        return {"n": self.n, "l": self.level,
                "growth_exponent": self.exponent_tower.to_json(),
                "s_n": self.s_n_exact,
                "upper_exponent": str(self.upper_exponent),
                "upper_holds": self.upper_holds}


@dataclass(frozen=True)
class LowerCheck:
    level: int
    n_star: int
    total_subgroups: int
    exponent: Fraction
    holds: bool
    order_below_n_star: bool  # |W_{l+1}| < n*

    def to_json(self) -> dict:
        return {"l": self.level, "n_star": self.n_star,
                "total_subgroups": self.total_subgroups,
                "exponent": str(self.exponent), "holds": self.holds,
                "order_below_n_star": self.order_below_n_star}


@dataclass
class GrowthVerification:
    constants: PrefixConstants
    certificates: list[GrowthCertificate]
    lower_checks: list[LowerCheck]

    @property
    def all_hold(self) -> bool:
        return (all(c.upper_holds for c in self.certificates)
                and all(c.holds and c.order_below_n_star for c in self.lower_checks))

    def to_json(self) -> dict:
        return {"constants": self.constants.to_json(),
                "upper": [c.to_json() for c in self.certificates],
                "lower": [c.to_json() for c in self.lower_checks],
                "all_hold": self.all_hold}


def _pow_rational_at_least(value: int, base: int, expo: Fraction) -> bool:
    """value >= base**expo, decided exactly."""
    return value ** expo.denominator >= base ** expo.numerator


def _pow_rational_at_most(value: int, base: int, expo: Fraction) -> bool:
    """value <= base**expo, decided exactly."""
    return value ** expo.denominator <= base ** expo.numerator


def growth_table_csv(verification: "GrowthVerification") -> str:
    """CSV of (n, exact s_n, upper-bound value, pass/fail)."""
    lines = ["n,s_n,upper_bound,holds"]
    for c in verification.certificates:
        expo = c.upper_exponent
        bits = expo.numerator * max(c.n, 2).bit_length() // expo.denominator
        if bits <= 512:
            num = c.n ** expo.numerator
            root = _iroot_floor(num, expo.denominator)
            bound = str(root)
        else:
            bound = f"~2^{bits}"
        lines.append(f"{c.n},{c.s_n_exact},{bound},{c.upper_holds}")
    return "\n".join(lines) + "\n"


def _iroot_floor(n: int, k: int) -> int:
    if k == 1 or n < 2:
        return n
    x = 1 << (-(-n.bit_length() // k))
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def verify_bounds_exact(
    seq: list[PermGroup], n_max: int,
    lattice_cap: int = DEFAULT_LATTICE_CAP,
    order_cap: int = DEFAULT_ORDER_CAP,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    fixed_level: int | None = None,
) -> GrowthVerification:
    """Exact verification of both growth bounds on a materializable tower.

    For each n <= n_max the upper bound s_n(W_{l+1}) <= n^(3*r*t*m-hat_l) is
    checked with prefix-valid constants (l = l(n), or ``fixed_level`` to
    exercise one truncation across all n).  At each materializable n* the
    lower bound  total subgroups >= (n*)^(m-hat_l/(12t))  is checked, along
    with |W_{l+1}| < n*.
    """
    consts = prefix_constants(seq, lattice_cap)
    r, t = consts.r, consts.t
    itw = iterated_wpa(seq, degree_cap=degree_cap, order_cap=order_cap)
    lattices: dict[int, object] = {}

    def lattice_at(level_index: int):
        if level_index not in lattices:
            g = itw.levels[level_index]
            if g is None:
                raise CapExceededError(f"level {level_index} is symbolic")
            lattices[level_index] = subgroup_lattice(
                ensure_materialized(g, cap=order_cap), lattice_cap)
        return lattices[level_index]

    certificates = []
    for n in range(1, n_max + 1):
        if fixed_level is not None:
            level = fixed_level
        else:
            try:
                level = l_of_n(seq, n, "exact", lattice_cap)
            except CapExceededError:
                break  # mu stalls on a finite prefix; l(n) is no longer defined
        if level + 1 > itw.depth:
            break
        lat = lattice_at(level + 1)
        sn = s_n(lat, n)
        mhat = degree_tower(seq, level)
        if not mhat.is_exact:
            break
        upper_expo = 3 * Fraction(r) * t * mhat.int_value
        holds = _pow_rational_at_most(sn, n, upper_expo) if n > 1 else sn == 1
        certificates.append(GrowthCertificate(
            n=n, level=level, exponent_tower=mhat, s_n_exact=sn,
            upper_exponent=upper_expo, upper_holds=holds))

    lower_checks = []
    for level in range(0, itw.depth):
        if itw.levels[level + 1] is None:
            break
        point = lower_bound_point(seq, level, t)
        if not point.n_star.is_exact:
            break
        n_star = point.n_star.int_value
        lat = lattice_at(level + 1)
        total = len(lat.subgroups)
        mhat = degree_tower(seq, level).int_value
        expo = Fraction(mhat, 1) * point.exponent_coeff
        holds = _pow_rational_at_least(total, n_star, expo)
        order_ok = lat.order < n_star
        lower_checks.append(LowerCheck(
            level=level, n_star=n_star, total_subgroups=total,
            exponent=expo, holds=holds, order_below_n_star=order_ok))

    return GrowthVerification(constants=consts, certificates=certificates,
                              lower_checks=lower_checks)
