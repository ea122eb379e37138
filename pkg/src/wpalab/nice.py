"""The niceness axioms N.1-N.5 for group sequences, with constants r and t,
checked either exactly (lattice computations) or through the classical
PSL2(p) facts (formula mode for primes beyond the lattice cap).

The formula mu(PSL2(p)) = p + 1 fails for p in {5, 7, 11}, whose minimal
faithful degrees are 5, 7 and 11; those cases are flagged, never silently
corrected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .counting import (
    DEFAULT_LATTICE_CAP,
    elem_abelian_max,
    minimal_index,
    rank,
    subgroup_lattice,
)
from .errors import SpecError
from .perm import PermGroup, parse_group_spec, psl2_order, _is_prime

#: classical minimal indices where mu = p+1 fails
EXCEPTIONAL_MU = {5: 5, 7: 7, 11: 11}


@dataclass(frozen=True)
class Psl2Facts:
    """Formula-level facts about PSL2(p) on the projective line."""

    p: int
    order: int  # tau = p(p^2-1)/2
    mu_formula: int  # p + 1
    mu: int  # exact minimal index (differs from the formula for 5, 7, 11)
    mu_formula_valid: bool
    rank: int
    elem_abelian: tuple[int, int]  # (p, 1): upper unitriangular subgroup
    chain_holds: bool  # p < tau < |E|^3 < mu^3 with the exact mu


def psl2_group(p: int) -> PermGroup:
    """PSL2(p) generated by x -> x+1 and x -> -1/x on the projective line."""
    return parse_group_spec(f"psl2:{p}")


def psl2_facts(p: int) -> Psl2Facts:
    if not _is_prime(p):
        raise SpecError(f"{p} is not prime")
    if p < 5:
        raise SpecError("psl2 facts need p >= 5 (smaller groups are solvable)")
    tau = psl2_order(p)
    mu = EXCEPTIONAL_MU.get(p, p + 1)
    chain = p < tau < p ** 3 < mu ** 3
    return Psl2Facts(
        p=p,
        order=tau,
        mu_formula=p + 1,
        mu=mu,
        mu_formula_valid=p not in EXCEPTIONAL_MU,
        rank=2,
        elem_abelian=(p, 1),
        chain_holds=chain,
    )


@dataclass(frozen=True)
class NiceSequenceSpec:
    """A (prefix of a) group sequence with claimed constants r and t.

    ``rule`` is "explicit" for a literal finite prefix, or "constant" when
    the entries declare an infinite repetition of the listed pattern.
    """

    entries: tuple[str, ...]
    r: Fraction
    t: Fraction
    rule: str = "explicit"

    def __post_init__(self):
        if not self.entries:
            raise SpecError("sequence entries must be non-empty")
        if self.r <= 0 or self.t <= 0:
            raise SpecError("constants r and t must be positive")
        if self.rule not in ("explicit", "constant"):
            raise SpecError(f"unknown sequence rule {self.rule!r}")


def make_spec(seq: str, r, t, rule: str = "explicit") -> NiceSequenceSpec:
    entries = tuple(tok.strip() for tok in seq.split(",") if tok.strip())
    return NiceSequenceSpec(entries, Fraction(r), Fraction(t), rule)


@dataclass(frozen=True)
class ConditionVerdict:
    condition: str  # "N.1" .. "N.5"
    index: int  # 1-based position in the prefix; 0 for sequence-level
    passed: bool
    witness: str


@dataclass(frozen=True)
class GroupData:
    spec: str
    order: int
    rank: int
    mu: int
    best_elem_abelian: tuple[int, int]  # (p, e) maximizing p^e
    mu_note: str = ""


@dataclass
class NicenessReport:
    spec: NiceSequenceSpec
    mode: str
    prefix: list[GroupData]
    verdicts: list[ConditionVerdict]
    n5_trend: str  # "refuted" | "not refuted" | "vacuous"

    @property
    def n1_to_n4_pass(self) -> bool:
        return all(v.passed for v in self.verdicts if v.condition != "N.5")

    @property
    def overall(self) -> bool:
        return self.n1_to_n4_pass and self.n5_trend != "refuted"

    def to_json(self) -> dict:
        return {
            "entries": list(self.spec.entries),
            "rule": self.spec.rule,
            "r": str(self.spec.r),
            "t": str(self.spec.t),
            "mode": self.mode,
            "prefix": [
                {
                    "spec": g.spec,
                    "order": g.order,
                    "rank": g.rank,
                    "mu": g.mu,
                    "elem_abelian": list(g.best_elem_abelian),
                    "note": g.mu_note,
                }
                for g in self.prefix
            ],
            "verdicts": [
                {
                    "condition": v.condition,
                    "index": v.index,
                    "passed": v.passed,
                    "witness": v.witness,
                }
                for v in self.verdicts
            ],
            "n5_trend": self.n5_trend,
            "overall": self.overall,
        }

    def format_table(self) -> str:
        lines = [f"{'k':>3} {'group':>12} {'|S_k|':>10} {'rk':>3} {'mu':>6} {'E':>8}"]
        for i, g in enumerate(self.prefix, start=1):
            p, e = g.best_elem_abelian
            lines.append(
                f"{i:>3} {g.spec:>12} {g.order:>10} {g.rank:>3} {g.mu:>6} {p}^{e:>2}"
            )
        for v in self.verdicts:
            status = "pass" if v.passed else "FAIL"
            lines.append(f"  {v.condition} k={v.index}: {status}  {v.witness}")
        lines.append(f"  N.5 trend: {self.n5_trend}")
        lines.append(f"  overall: {'nice on prefix' if self.overall else 'NOT nice'}")
        return "\n".join(lines)


def _pow_at_least(base: int, expo: Fraction, value: int) -> bool:
    """value <= base**expo, decided exactly (expo a positive rational)."""
    return value ** expo.denominator <= base ** expo.numerator


def _group_data_exact(spec: str, cap: int) -> GroupData:
    g = parse_group_spec(spec)
    lat = subgroup_lattice(g, cap)
    infos = elem_abelian_max(lat)
    best = max(infos, key=lambda i: i.prime ** i.exponent)
    return GroupData(
        spec=spec,
        order=lat.order,
        rank=rank(lat),
        mu=minimal_index(lat),
        best_elem_abelian=(best.prime, best.exponent),
    )


def _group_data_facts(spec: str) -> GroupData:
    parts = spec.split(":")
    if len(parts) != 2 or parts[0].strip().lower() != "psl2":
        raise SpecError(f"facts mode needs psl2 entries, got {spec!r}")
    facts = psl2_facts(int(parts[1]))
    note = "" if facts.mu_formula_valid else (
        f"exceptional: mu = {facts.mu} differs from formula {facts.mu_formula}"
    )
    return GroupData(
        spec=spec,
        order=facts.order,
        rank=facts.rank,
        mu=facts.mu,
        best_elem_abelian=facts.elem_abelian,
        mu_note=note,
    )


def check_nice(
    spec: NiceSequenceSpec,
    prefix_len: int | None = None,
    mode: str = "exact",
    cap: int = DEFAULT_LATTICE_CAP,
) -> NicenessReport:
    """Evaluate N.1-N.4 on the prefix and report the N.5 trend.

    N.5 is a limit condition: a finite prefix refutes it only by stalling
    (here: a declared-constant rule, or a prefix whose mu never moves);
    it can never be confirmed, so passes read "not refuted".
    """
    if mode not in ("exact", "facts"):
        raise SpecError(f"unknown mode {mode!r}")
    if prefix_len is None:
        prefix_len = len(spec.entries)
    if spec.rule == "constant":
        entries = [spec.entries[i % len(spec.entries)] for i in range(prefix_len)]
    else:
        if prefix_len > len(spec.entries):
            raise SpecError(
                f"prefix {prefix_len} exceeds the {len(spec.entries)} given entries"
            )
        entries = list(spec.entries[:prefix_len])

    data = [
        _group_data_exact(e, cap) if mode == "exact" else _group_data_facts(e)
        for e in entries
    ]

    verdicts: list[ConditionVerdict] = []
    for k in range(1, len(data)):
        prev, cur = data[k - 1], data[k]
        verdicts.append(ConditionVerdict(
            "N.1", k + 1, cur.order >= prev.order,
            f"|S_{k + 1}| = {cur.order} vs |S_{k}| = {prev.order}"))
    for k, g in enumerate(data, start=1):
        verdicts.append(ConditionVerdict(
            "N.2", k, Fraction(g.rank) <= spec.r, f"rk = {g.rank}, r = {spec.r}"))
    for k, g in enumerate(data, start=1):
        p, e = g.best_elem_abelian
        ok = _pow_at_least(p ** e, spec.t, g.order)
        verdicts.append(ConditionVerdict(
            "N.3", k, ok, f"|S_k| = {g.order} vs |E_k|^t = ({p}^{e})^{spec.t}"))
    for k, g in enumerate(data, start=1):
        mono = k == 1 or g.mu >= data[k - 2].mu
        bound = _pow_at_least(g.mu, spec.t, g.order)
        verdicts.append(ConditionVerdict(
            "N.4", k, mono and bound,
            f"mu = {g.mu} (monotone: {mono}), |S_k| <= mu^t: {bound}"))

    mus = [g.mu for g in data]
    if spec.rule == "constant":
        n5 = "refuted"  # mu is eventually constant by declaration
    elif len(mus) < 2:
        n5 = "vacuous"
    elif max(mus) == min(mus):
        n5 = "refuted"
    else:
        n5 = "not refuted"

    return NicenessReport(spec=spec, mode=mode, prefix=data,
                          verdicts=verdicts, n5_trend=n5)
