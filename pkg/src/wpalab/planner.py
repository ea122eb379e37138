"""Prime-sequence synthesis: gently-growing function handling, the
prime-existence search (exact primes under a bit cap, sound symbolic lower
bounds beyond), the main synthesis rule and its two variations, and exact
verification of the exponent chains.

Symbolic certificates carry only lower bounds, the direction every planner
condition needs; the one two-sided record is the variation-2 window on
log2(p_k).  Indeterminate tower comparisons are reported, never guessed.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapExceededError, IndeterminateError, SpecError
from .primes import is_prime, primality_evidence, next_prime
from .towers import (
    Comparison,
    TowerInt,
    TowerLike,
    compare,
    compare_le,
    tower_add,
    tower_exp2,
    tower_iterated_log2,
    tower_log2,
    tower_mul,
    tower_mul_frac,
    tower_pow,
    tower_pow_frac,
)

#: exact prime searches consider candidates of at most this many bits
DEFAULT_BIT_CAP = 1 << 16

#: exact window searches (variation 2) are attempted up to this many bits
DEFAULT_WINDOW_BITS = 2048

_EVAL_GRID = 1 << 32


@dataclass(frozen=True)
class LogPowerTerm:
    """alpha * (log2 applied `depth` times to n) ** beta.

    beta = 0 is allowed (a constant term) so that non-unbounded functions can
    be expressed and refuted; negative iterated logs evaluate as 0.
    """

    alpha: Fraction = Fraction(1)
    depth: int = 1
    beta: Fraction = Fraction(1)

    def __post_init__(self):
        if self.alpha <= 0 or self.beta < 0 or self.depth < 1:
            raise SpecError("need alpha > 0, beta >= 0, depth >= 1")

    def eval_tower(self, x: TowerLike) -> TowerInt:
        if self.beta == 0:
            return TowerInt(depth=0, lo=self.alpha, hi=self.alpha)
        val = tower_iterated_log2(x, self.depth)
        if not val.is_exact and val.depth == 0:
            lo, hi = max(val.lo, Fraction(0)), max(val.hi, Fraction(0))
            val = TowerInt(depth=0, lo=lo, hi=hi)
        if self.beta != 1:
            val = tower_pow_frac(val, self.beta)
        if self.alpha != 1:
            val = tower_mul_frac(val, self.alpha)
        return val

    def invert_lower_bound(self, y: TowerLike) -> TowerInt | None:
        """A value x0 with: term(x) >= y implies x >= x0 (None if the term is
        constant and can never reach y)."""
        if self.beta == 0:
            return None
        v = tower_mul_frac(_as_tower_like(y), Fraction(1) / self.alpha)
        if self.beta != 1:
            v = tower_pow_frac(v, Fraction(1) / self.beta)
        for _ in range(self.depth):
            v = tower_exp2(v)
        return v

    def describe(self) -> str:
        inner = "n"
        for _ in range(self.depth):
            inner = f"log2({inner})"
        out = inner
        if self.beta != 1:
            out = f"({out})^({self.beta})"
        if self.alpha != 1:
            out = f"{self.alpha}*{out}"
        return out


def _as_tower_like(y: TowerLike) -> TowerInt:
    return y if isinstance(y, TowerInt) else TowerInt.from_int(int(y))


@dataclass(frozen=True)
class GentlyGrowingFn:
    """Pointwise max or sum of LogPowerTerms, with claimed constants A, N.

    A and N are recorded and used by the gently-growing check; no planner
    rule consumes them quantitatively.
    """

    name: str
    terms: tuple[LogPowerTerm, ...]
    combine: str = "max"
    claimed_A: Fraction | None = None
    claimed_N: int | None = None

    def __post_init__(self):
        if not self.terms:
            raise SpecError("need at least one term")
        if self.combine not in ("max", "sum"):
            raise SpecError(f"unknown combiner {self.combine!r}")

    def is_unbounded(self) -> bool:
        return any(t.beta > 0 for t in self.terms)

    def eval_tower(self, x: TowerLike) -> TowerInt:
        vals = [t.eval_tower(x) for t in self.terms]
        if len(vals) == 1:
            return vals[0]
        if self.combine == "sum":
            acc = vals[0]
            for v in vals[1:]:
                acc = tower_add(acc, v)
            return acc
        best = vals[0]
        for v in vals[1:]:
            verdict = compare(v, best)
            if verdict is Comparison.GREATER:
                best = v
            elif verdict is Comparison.INDETERMINATE:
                # sound envelope of max: upper bounds may both apply
                ks = max(2, best._eff_depth(), v._eff_depth(), 1)
                blo, bhi = best.lift(ks)
                vlo, vhi = v.lift(ks)
                best = TowerInt.certified(ks, max(blo, vlo), max(bhi, vhi))
        return best

    def eval_exact(self, n: int) -> Fraction:
        """Deterministic round-down of the certified lower bound to a fixed
        denominator grid (2^-32)."""
        val = self.eval_tower(TowerInt.exact(n))
        if val.is_exact:
            return Fraction(val.value)
        if val.depth > 0:
            raise SpecError(f"{self.name}({n}) is too large for exact evaluation")
        lo = val.lo
        return Fraction(lo.numerator * _EVAL_GRID // lo.denominator, _EVAL_GRID)

    def invert_lower_bound(self, y: TowerLike) -> TowerInt:
        """A value x0 with: f(x) >= y implies x >= x0 (sound lower bound)."""
        bound, _ = self.invert_threshold(y)
        return bound

    def invert_threshold(self, y: TowerLike) -> tuple[TowerInt, bool]:
        """Lower bound x0 on solutions of f(x) >= y, plus an exactness flag.

        When the flag is True the inversion is an algebraic equivalence
        (single term, or a max of terms): every x at or above x0's certified
        upper endpoint satisfies f(x) >= y by monotonicity.  For sums only
        the lower-bound direction holds.
        """
        target = _as_tower_like(y)
        exact_threshold = True
        if self.combine == "sum" and len(self.terms) > 1:
            target = tower_mul_frac(target, Fraction(1, len(self.terms)))
            exact_threshold = False
        bounds = [b for b in (t.invert_lower_bound(target) for t in self.terms)
                  if b is not None]
        if not bounds:
            raise SpecError(f"{self.name} is bounded and never reaches {y}")
        best = bounds[0]
        for b in bounds[1:]:
            verdict = compare(b, best)
            if verdict is Comparison.LESS:
                best = b
            elif verdict is Comparison.INDETERMINATE:
                k = max(2, best._eff_depth(), b._eff_depth())
                blo, bhi = best.lift(k)
                olo, ohi = b.lift(k)
                best = TowerInt.certified(k, min(blo, olo), min(bhi, ohi))
                exact_threshold = False
        return best, exact_threshold


_ITLOG_RE = re.compile(r"^(log)+2$")


def parse_growth_fn(spec: str) -> GentlyGrowingFn:
    """Function mini-language: ``log2``, ``loglog2``, ``logloglog2``, ... or
    ``itlog:<depth>[:alpha=<q>][:beta=<q>]``."""
    s = spec.strip().lower()
    if _ITLOG_RE.match(s):
        depth = s.count("log")
        return GentlyGrowingFn(name=s, terms=(LogPowerTerm(depth=depth),),
                               claimed_A=Fraction(2), claimed_N=4)
    if s.startswith("itlog:"):
        parts = s.split(":")
        try:
            depth = int(parts[1])
        except (IndexError, ValueError) as exc:
            raise SpecError(f"bad function spec {spec!r}") from exc
        alpha = Fraction(1)
        beta = Fraction(1)
        for extra in parts[2:]:
            key, _, val = extra.partition("=")
            if key == "alpha":
                alpha = Fraction(val)
            elif key == "beta":
                beta = Fraction(val)
            else:
                raise SpecError(f"unknown option {key!r} in {spec!r}")
        return GentlyGrowingFn(
            name=s, terms=(LogPowerTerm(alpha=alpha, depth=depth, beta=beta),))
    raise SpecError(f"unknown growth function {spec!r}")


def log_power_fn(h: int) -> GentlyGrowingFn:
    """(log2 n)^(1/h), the variation-2 family."""
    return GentlyGrowingFn(name=f"(log2 n)^(1/{h})",
                           terms=(LogPowerTerm(beta=Fraction(1, h)),))


# ---------------------------------------------------------------------------
# gently-growing check


@dataclass(frozen=True)
class SampleVerdict:
    x: int
    status: str  # "holds" | "violated" | "undecided"
    detail: str


@dataclass
class GentlyGrowingReport:
    fn: str
    a: Fraction
    n0: int
    monotone_ok: bool
    positivity_ok: bool
    unbounded: bool
    samples: list[SampleVerdict]
    verdict: str  # "refuted" | "not refuted"

    def to_json(self) -> dict:
        return {"fn": self.fn, "A": str(self.a), "N": self.n0,
                "monotone_ok": self.monotone_ok,
                "positivity_ok": self.positivity_ok,
                "unbounded": self.unbounded,
                "samples": [{"x": s.x, "status": s.status, "detail": s.detail}
                            for s in self.samples],
                "verdict": self.verdict}


def _default_samples() -> list[int]:
    out = sorted({2 ** k for k in range(2, 21)} | {2 ** (2 ** j) for j in range(2, 6)}
                 | {6, 12, 24, 100, 1000})
    return out


def check_gently_growing(f: GentlyGrowingFn, a=None, n0: int | None = None,
                         samples: list[int] | None = None) -> GentlyGrowingReport:
    """Sound sampling check of the defining inequality f(x^log2(x)) <= A*f(x):
    any certified violation refutes; passes read "not refuted"."""
    a = Fraction(a) if a is not None else (f.claimed_A or Fraction(2))
    n0 = n0 if n0 is not None else (f.claimed_N or 4)
    samples = sorted(set(samples or _default_samples()))

    unbounded = f.is_unbounded()
    monotone_ok = True
    positivity_ok = True
    prev_val = None
    verdicts: list[SampleVerdict] = []
    for x in samples:
        val = f.eval_tower(TowerInt.exact(x))
        if prev_val is not None and compare(prev_val, val) is Comparison.GREATER:
            monotone_ok = False
        prev_val = val
        if x >= n0:
            lo, hi = val.lift(val._eff_depth())
            if hi <= 0:
                positivity_ok = False
            arg = tower_pow(TowerInt.exact(x), tower_log2(TowerInt.exact(x)))
            left = f.eval_tower(arg)
            right = tower_mul_frac(f.eval_tower(TowerInt.exact(x)), a)
            cmp = compare(left, right)
            if cmp is Comparison.GREATER:
                verdicts.append(SampleVerdict(x, "violated",
                                              f"f(x^log2 x) > {a}*f(x) certified"))
            elif cmp in (Comparison.LESS, Comparison.EQUAL):
                verdicts.append(SampleVerdict(x, "holds", ""))
            else:
                verdicts.append(SampleVerdict(x, "undecided",
                                              "intervals overlap (not refuted)"))
    refuted = (not unbounded or not monotone_ok or not positivity_ok
               or any(v.status == "violated" for v in verdicts))
    return GentlyGrowingReport(
        fn=f.name, a=a, n0=n0, monotone_ok=monotone_ok,
        positivity_ok=positivity_ok, unbounded=unbounded, samples=verdicts,
        verdict="refuted" if refuted else "not refuted")


# ---------------------------------------------------------------------------
# prime searches


def tower_floor_int(t: TowerInt, max_bits: int) -> int | None:
    """An integer lower bound <= t, or None when it needs > max_bits bits.

    Certified towers are materialized bottom-up with floors (each floor only
    lowers the value, so scanning from the result never skips a solution).
    """
    if t.is_exact:
        return t.value if t.value.bit_length() <= max_bits else None
    e = t.lo
    for _ in range(t.depth):
        e_int = e.numerator // e.denominator
        if e_int > max_bits:
            return None
        if e_int < 0:
            e_int = 0
        e = Fraction(1 << e_int)
    return e.numerator // e.denominator


def tower_ceil_int(t: TowerInt, max_bits: int) -> int | None:
    """An integer upper bound >= t, or None when it needs > max_bits bits."""
    if t.is_exact:
        return t.value if t.value.bit_length() <= max_bits else None
    e = t.hi
    for _ in range(t.depth):
        e_int = -((-e.numerator) // e.denominator)  # ceil
        if e_int > max_bits:
            return None
        if e_int < 0:
            e_int = 0
        e = Fraction(1 << e_int)
    return -((-e.numerator) // e.denominator)


@dataclass(frozen=True)
class PrimeSearchOutcome:
    prime: int | None
    evidence: str | None
    scanned_from: int | None
    symbolic_lower_bound: TowerInt | None

    @property
    def exact(self) -> bool:
        return self.prime is not None


def _search_prime(f: GentlyGrowingFn, threshold: TowerLike,
                  floor_exclusive: int, bit_cap: int, seed: int,
                  scan_limit: int = 500_000) -> PrimeSearchOutcome:
    """Smallest prime p > floor_exclusive with f(p) >= threshold (certified),
    or a symbolic lower bound when candidates would exceed the bit cap.

    The inversion of f is exact algebra for single-term and max-combined
    functions, so candidates at or above the ceiled inverse qualify by
    monotonicity with no numeric check; only the (typically empty) rounding
    strip below it needs certified evaluations.
    """
    x0, exact_threshold = f.invert_threshold(threshold)
    start_int = tower_floor_int(x0, bit_cap)
    if start_int is None or start_int.bit_length() > bit_cap:
        bound = x0
        if floor_exclusive > 1 and compare(x0, floor_exclusive) is Comparison.LESS:
            bound = TowerInt.exact(floor_exclusive + 1)
        return PrimeSearchOutcome(None, None, None, bound)
    qualify_from = tower_ceil_int(x0, bit_cap) if exact_threshold else None
    cand = max(floor_exclusive + 1, start_int, 2)
    thr = _as_tower_like(threshold)
    for _ in range(scan_limit):
        if cand.bit_length() > bit_cap:
            return PrimeSearchOutcome(None, None, None, TowerInt.from_int(cand))
        if is_prime(cand, seed=seed):
            if qualify_from is not None and cand >= qualify_from:
                return PrimeSearchOutcome(cand, primality_evidence(cand),
                                          max(floor_exclusive + 1, start_int), None)
            if compare_le(thr, f.eval_tower(cand)) is True:
                return PrimeSearchOutcome(cand, primality_evidence(cand),
                                          max(floor_exclusive + 1, start_int), None)
        cand += 1
    raise CapExceededError(
        f"prime scan exhausted {scan_limit} candidates "
        "(undecided at desk scale: certified checks could not separate "
        "candidates from the threshold)")


@dataclass(frozen=True)
class ThresholdPrimeResult:
    m: int
    threshold: Fraction  # 2m
    prime: int | None
    evidence: str | None
    f_at_prime_lo: str | None
    second_inequality: bool | None  # 2m >= B*f(p^m); None = indeterminate
    infeasible: bool
    bitlength_lower_bound: TowerInt | None

    def to_json(self) -> dict:
        return {"m": self.m, "threshold": str(self.threshold),
                "prime": str(self.prime) if self.prime is not None else None,
                "evidence": self.evidence,
                "f_at_prime_lo": self.f_at_prime_lo,
                "second_inequality": self.second_inequality,
                "infeasible": self.infeasible,
                "bitlength_lower_bound": (
                    self.bitlength_lower_bound.to_json()
                    if self.bitlength_lower_bound is not None else None)}


def find_threshold_prime(f: GentlyGrowingFn, m: int, b=1, *,
                     bit_cap: int = DEFAULT_BIT_CAP, seed: int = 0) -> ThresholdPrimeResult:
    """Search for a prime p > m with f(p) >= 2m, then check 2m >= B*f(p^m).

    Beyond the bit cap a certified statement of the minimal bit length any
    solution must have is returned instead.
    """
    if m < 1:
        raise SpecError("m must be >= 1")
    b = Fraction(b)
    threshold = Fraction(2 * m)
    outcome = _search_prime(f, TowerInt.exact(2 * m), m, bit_cap, seed)
    if not outcome.exact:
        # bit_length(x) >= log2(x), so log2 of the bound is itself a bound
        bits = tower_log2(outcome.symbolic_lower_bound)
        return ThresholdPrimeResult(m, threshold, None, None, None, None,
                                infeasible=True, bitlength_lower_bound=bits)
    p = outcome.prime
    f_at_p = f.eval_tower(TowerInt.exact(p))
    rhs = tower_mul_frac(f.eval_tower(tower_pow(p, m)), b)
    second = compare_le(rhs, TowerInt.exact(2 * m))
    lo, _ = f_at_p.lift(f_at_p._eff_depth())
    return ThresholdPrimeResult(m, threshold, p, outcome.evidence,
                            f"{float(lo):.6g}", second,
                            infeasible=False, bitlength_lower_bound=None)


# ---------------------------------------------------------------------------
# the planner


@dataclass(frozen=True)
class PlannerConstants:
    """floor (p_0 >= max(floor, C)), multiplier (p_k > multiplier*mhat), and
    threshold (f(p_k) >= threshold*mhat).  Defaults are (18, 9, 18) with
    threshold = 2*multiplier enforced by derivation; anything lower is
    labeled demonstrative."""

    floor_const: int = 18
    multiplier: int = 9
    threshold_const: int | None = None  # derived: 2 * multiplier

    def __post_init__(self):
        if self.threshold_const is None:
            object.__setattr__(self, "threshold_const", 2 * self.multiplier)
        if self.floor_const < 2 or self.multiplier < 1 or self.threshold_const < 1:
            raise SpecError("planner constants must be positive (floor >= 2)")

    @property
    def is_standard(self) -> bool:
        return (self.floor_const, self.multiplier, self.threshold_const) == (18, 9, 18)

    @property
    def label(self) -> str:
        return "standard constants" if self.is_standard else "demonstrative (toy constants)"

    def to_json(self) -> dict:
        return {"floor": self.floor_const, "multiplier": self.multiplier,
                "threshold": self.threshold_const, "label": self.label}


TOY_CONSTANTS = PlannerConstants(floor_const=2, multiplier=2, threshold_const=2)


@dataclass(frozen=True)
class ConditionRecord:
    text: str  # instantiated rule, e.g. "p_1 > 9*mhat_0"
    value: str  # the instantiated right-hand side
    verified: bool | None  # True/False for exact entries, None for symbolic

    def to_json(self) -> dict:
        return {"text": self.text, "value": self.value, "verified": self.verified}


@dataclass(frozen=True)
class PrimeCertificate:
    k: int
    origin: str  # rule provenance, e.g. "thmA:k=2"
    kind: str  # "exact" | "symbolic"
    prime: int | None
    evidence: str | None
    lower_bound: TowerInt | None  # certified p_k >= this (symbolic entries)
    mhat_prev: TowerInt | None  # m-hat_{k-1} (None for k = 0)
    mhat_prev_from_bounds: bool  # instantiated from symbolic lower bounds?
    conditions: tuple[ConditionRecord, ...]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "origin": self.origin,
            "kind": self.kind,
            "prime": str(self.prime) if self.prime is not None else None,
            "evidence": self.evidence,
            "lower_bound": (self.lower_bound.to_json()
                            if self.lower_bound is not None else None),
            "mhat_prev": (self.mhat_prev.to_json()
                          if self.mhat_prev is not None else None),
            "mhat_prev_from_bounds": self.mhat_prev_from_bounds,
            "conditions": [c.to_json() for c in self.conditions],
        }


def _tower_display(t: TowerInt) -> str:
    return t.describe()


def _tower_max(a: TowerInt, b: TowerInt) -> TowerInt:
    verdict = compare(a, b)
    if verdict is Comparison.LESS:
        return b
    if verdict in (Comparison.GREATER, Comparison.EQUAL):
        return a
    k = max(2, a._eff_depth(), b._eff_depth())
    alo, ahi = a.lift(k)
    blo, bhi = b.lift(k)
    return TowerInt.certified(k, max(alo, blo), max(ahi, bhi))


def plan_main(
    f: GentlyGrowingFn,
    consts: PlannerConstants | None = None,
    b=1,
    c=1,
    k_max: int = 2,
    *,
    bit_cap: int = DEFAULT_BIT_CAP,
    seed: int = 0,
) -> list[PrimeCertificate]:
    """Synthesize p_0, ..., p_{k_max}: exact primes while the searches fit
    the bit cap, sound symbolic constraint records afterwards.

    m-hat follows the proof's indexing: m-hat_k is the degree tower over the
    projective-line sizes p_0+1, ..., p_k+1 (so m-hat_0 = p_0 + 1).
    """
    consts = consts or PlannerConstants()
    if not f.is_unbounded():
        raise SpecError("planner needs an unbounded f")
    b = Fraction(b)
    c = Fraction(c)
    certs: list[PrimeCertificate] = []

    # k = 0: least prime >= max(floor, C) with f(p_0) >= threshold
    floor0 = max(consts.floor_const, math.ceil(c))
    thr0 = TowerInt.exact(consts.threshold_const)
    got = _search_prime(f, thr0, floor0 - 1, bit_cap, seed)
    conds0 = [
        ConditionRecord(f"p_0 >= max({consts.floor_const}, C)", str(floor0),
                        got.exact if got.exact else None),
        ConditionRecord(f"f(p_0) >= {consts.threshold_const}",
                        str(consts.threshold_const),
                        True if got.exact else None),
    ]
    if got.exact:
        mhat = TowerInt.exact(got.prime + 1)
        mhat_symbolic = False
        certs.append(PrimeCertificate(
            0, "thmA:k=0", "exact", got.prime, got.evidence, None, None,
            False, tuple(conds0)))
        prev_bound = TowerInt.exact(got.prime)
    else:
        mhat = tower_add(got.symbolic_lower_bound, 1)
        mhat_symbolic = True
        certs.append(PrimeCertificate(
            0, "thmA:k=0", "symbolic", None, None, got.symbolic_lower_bound,
            None, False, tuple(conds0)))
        prev_bound = got.symbolic_lower_bound

    for k in range(1, k_max + 1):
        thr_p = tower_mul(mhat, TowerInt.exact(consts.multiplier))
        thr_f = tower_mul(mhat, TowerInt.exact(consts.threshold_const))
        conds = [
            ConditionRecord(f"p_{k} > {consts.multiplier}*mhat_{k - 1}",
                            _tower_display(thr_p), None),
            ConditionRecord(f"f(p_{k}) >= {consts.threshold_const}*mhat_{k - 1}",
                            _tower_display(thr_f), None),
        ]
        exact_possible = thr_p.is_exact and thr_f.is_exact and not mhat_symbolic
        outcome = None
        if exact_possible:
            outcome = _search_prime(f, thr_f, thr_p.int_value, bit_cap, seed)
        if outcome is not None and outcome.exact:
            p_k = outcome.prime
            third = compare_le(
                tower_mul_frac(
                    f.eval_tower(tower_pow(p_k, thr_p)), b), thr_f)
            conds[0] = ConditionRecord(conds[0].text, conds[0].value,
                                       p_k > thr_p.int_value)
            conds[1] = ConditionRecord(conds[1].text, conds[1].value, True)
            conds.append(ConditionRecord(
                f"{consts.threshold_const}*mhat_{k - 1} >= B*f(p_{k}^"
                f"{consts.multiplier}*mhat_{k - 1})", f"B = {b}", third))
            certs.append(PrimeCertificate(
                k, f"thmA:k={k}", "exact", p_k, outcome.evidence, None,
                mhat, mhat_symbolic, tuple(conds)))
            prev_bound = TowerInt.exact(p_k)
            mhat = tower_pow(p_k + 1, mhat)
        else:
            lb_f = f.invert_lower_bound(thr_f)
            lower = _tower_max(lb_f, thr_p)
            certs.append(PrimeCertificate(
                k, f"thmA:k={k}", "symbolic", None, None, lower,
                mhat, mhat_symbolic, tuple(conds)))
            prev_bound = lower
            mhat = tower_pow(tower_add(lower, 1), mhat)
            mhat_symbolic = True
    return certs


def plan_variation1(
    f: GentlyGrowingFn,
    k_max: int = 2,
    consts: PlannerConstants | None = None,
    *,
    bit_cap: int = DEFAULT_BIT_CAP,
    seed: int = 0,
) -> list[PrimeCertificate]:
    """Variation 1: any unbounded f; ensure p_k >= p_{k-1}^(multiplier *
    mhat_{k-1}) and f(p_k) >= threshold*mhat_{k-1} for k >= 1."""
    consts = consts or PlannerConstants()
    if not f.is_unbounded():
        raise SpecError("variation 1 needs an unbounded f")
    certs: list[PrimeCertificate] = []
    thr0 = TowerInt.exact(consts.threshold_const)
    got = _search_prime(f, thr0, 1, bit_cap, seed)
    conds0 = (ConditionRecord(f"f(p_0) >= {consts.threshold_const}",
                              str(consts.threshold_const),
                              True if got.exact else None),)
    if got.exact:
        p_prev = TowerInt.exact(got.prime)
        mhat = TowerInt.exact(got.prime + 1)
        certs.append(PrimeCertificate(0, "var1:k=0", "exact", got.prime,
                                      got.evidence, None, None, False, conds0))
        symbolic = False
    else:
        p_prev = got.symbolic_lower_bound
        mhat = tower_add(p_prev, 1)
        certs.append(PrimeCertificate(0, "var1:k=0", "symbolic", None, None,
                                      p_prev, None, False, conds0))
        symbolic = True

    for k in range(1, k_max + 1):
        thr_f = tower_mul(mhat, TowerInt.exact(consts.threshold_const))
        power_bound = tower_pow(
            p_prev, tower_mul(mhat, TowerInt.exact(consts.multiplier)))
        conds = (
            ConditionRecord(
                f"p_{k} >= p_{k - 1}^({consts.multiplier}*mhat_{k - 1})",
                _tower_display(power_bound), None),
            ConditionRecord(
                f"f(p_{k}) >= {consts.threshold_const}*mhat_{k - 1}",
                _tower_display(thr_f), None),
        )
        lower = _tower_max(f.invert_lower_bound(thr_f), power_bound)
        certs.append(PrimeCertificate(k, f"var1:k={k}", "symbolic", None, None,
                                      lower, mhat, symbolic, conds))
        p_prev = lower
        mhat = tower_pow(tower_add(lower, 1), mhat)
        symbolic = True
    return certs


# ---------------------------------------------------------------------------
# variation 2


@dataclass(frozen=True)
class WindowCertificate:
    k: int
    origin: str
    kind: str  # "exact" | "symbolic"
    prime: int | None
    evidence: str | None
    log2p_window: tuple[TowerInt, TowerInt]  # two-sided constraint on log2 p_k
    mhat_prev: TowerInt

    def to_json(self) -> dict:
        return {"k": self.k, "origin": self.origin, "kind": self.kind,
                "prime": str(self.prime) if self.prime is not None else None,
                "evidence": self.evidence,
                "log2p_window": [self.log2p_window[0].to_json(),
                                 self.log2p_window[1].to_json()],
                "mhat_prev": self.mhat_prev.to_json()}


@dataclass
class Variation2Plan:
    h: int
    f_name: str
    f_star_name: str
    certificates: list[WindowCertificate]
    chain_checks: list["ChainEquivalenceReport"]

    def to_json(self) -> dict:
        return {"h": self.h, "f": self.f_name, "f_star": self.f_star_name,
                "certificates": [c.to_json() for c in self.certificates],
                "chain_checks": [c.to_json() for c in self.chain_checks]}


@dataclass(frozen=True)
class ChainEquivalenceReport:
    """Truth-value agreement along the window equivalence chain.

    The middle rewrite multiplies by 9*mhat, linearly: with any extra
    power h on that factor the chain stops being an equivalence for h >= 2,
    so the linear factor is the one the lower-bound argument needs."""

    h: int
    log2_p: str
    m_hat: str
    steps: tuple[tuple[str, bool], ...]
    algebra_identity: bool  # 9m * 2(18m)^h == (18m)^(h+1)

    @property
    def equivalent(self) -> bool:
        vals = [v for _, v in self.steps]
        return all(v == vals[0] for v in vals) and self.algebra_identity

    def to_json(self) -> dict:
        return {"h": self.h, "log2_p": self.log2_p, "m_hat": self.m_hat,
                "steps": [{"name": n, "holds": v} for n, v in self.steps],
                "algebra_identity": self.algebra_identity,
                "equivalent": self.equivalent}


def verify_variation2_equivalence(log2_p, m_hat, h: int) -> ChainEquivalenceReport:
    """Each link of the window chain, checked as exact inequalities:

    log2(p) <= 2*(18m)^h  <=>  9m*log2(p) <= (18m)^(h+1)
    <=>  log2(p^(9m)) <= (18m)^(h+1)  <=>  f_*(p^(9m)) <= 18m
    """
    if h < 1:
        raise SpecError("h must be >= 1")
    if isinstance(log2_p, TowerInt) or isinstance(m_hat, TowerInt):
        return _verify_v2_tower(log2_p, m_hat, h)
    el = Fraction(log2_p)
    m = int(m_hat)
    window_hi = 2 * (18 * m) ** h
    rhs = (18 * m) ** (h + 1)
    b1 = el <= window_hi
    b2 = 9 * m * el <= rhs
    log_p_pow = 9 * m * el  # log2(p^(9m)) by the power rule
    b3 = log_p_pow <= rhs
    b4 = log_p_pow <= Fraction(18 * m) ** (h + 1)  # f_*(p^(9m)) <= 18m unrolled
    algebra = 9 * m * window_hi == rhs
    return ChainEquivalenceReport(
        h=h, log2_p=str(el), m_hat=str(m),
        steps=(("log2(p) <= 2*(18m)^h", b1),
               ("9m*log2(p) <= (18m)^(h+1)", b2),
               ("log2(p^(9m)) <= (18m)^(h+1)", b3),
               ("f_star(p^(9m)) <= 18m", b4)),
        algebra_identity=algebra)


def _verify_v2_tower(log2_p, m_hat, h: int) -> ChainEquivalenceReport:
    el = log2_p if isinstance(log2_p, TowerInt) else TowerInt.exact(int(log2_p))
    m = m_hat if isinstance(m_hat, TowerInt) else TowerInt.exact(int(m_hat))
    m18 = tower_mul(m, TowerInt.exact(18))
    window_hi = tower_mul_frac(tower_pow(m18, h) if h > 1 else m18, Fraction(2))
    rhs = tower_pow(m18, h + 1)
    nine_m_log = tower_mul(tower_mul(m, TowerInt.exact(9)), el)
    checks = [compare_le(el, window_hi), compare_le(nine_m_log, rhs),
              compare_le(nine_m_log, rhs), compare_le(nine_m_log, rhs)]
    if any(v is None for v in checks):
        raise IndeterminateError("variation-2 chain comparison is indeterminate")
    return ChainEquivalenceReport(
        h=h, log2_p=el.describe(), m_hat=m.describe(),
        steps=(("log2(p) <= 2*(18m)^h", checks[0]),
               ("9m*log2(p) <= (18m)^(h+1)", checks[1]),
               ("log2(p^(9m)) <= (18m)^(h+1)", checks[2]),
               ("f_star(p^(9m)) <= 18m", checks[3])),
        algebra_identity=True)  # coefficient identity, checked separately


def variation2_algebra_identity(h: int) -> bool:
    """9m * 2*(18m)^h == (18m)^(h+1) as polynomials in m (coefficient check)."""
    # both sides are c * m^(h+1): compare the coefficients
    return 9 * 2 * 18 ** h == 18 ** (h + 1)


def plan_variation2(
    h: int,
    k_max: int = 2,
    *,
    bit_cap: int = DEFAULT_BIT_CAP,
    window_bits: int = DEFAULT_WINDOW_BITS,
    seed: int = 0,
) -> Variation2Plan:
    """Variation 2: f = (log2 n)^(1/h); choose log2(p_k) inside the window
    [(18*mhat)^h, 2*(18*mhat)^h] (two-sided by design, factor-2 wide)."""
    if h < 1:
        raise SpecError("h must be >= 1")
    certs: list[WindowCertificate] = []
    chain_checks: list[ChainEquivalenceReport] = []

    mhat = TowerInt.exact(1)  # level -1 convention
    mhat_exact = True
    for k in range(0, k_max + 1):
        base18 = tower_mul(mhat, TowerInt.exact(18))
        lo_log = tower_pow(base18, h)
        hi_log = tower_mul_frac(lo_log, Fraction(2))
        prime = None
        evidence = None
        kind = "symbolic"
        if mhat_exact and lo_log.is_exact and lo_log.int_value <= window_bits:
            start = 1 << lo_log.int_value
            p = next_prime(start, seed=seed)
            # the window has factor-2 width in the exponent; the next prime
            # is a whisker above 2^lo, never past 2^(2*lo)
            if p < 1 << (2 * lo_log.int_value):
                prime, evidence, kind = p, primality_evidence(p), "exact"
        certs.append(WindowCertificate(
            k, f"var2:h={h}:k={k}", kind, prime, evidence,
            (tower_exp2(lo_log), tower_exp2(hi_log)), mhat))
        if mhat_exact:
            # chain check at the window's upper boundary, exact rationals
            m_val = mhat.int_value
            chain_checks.append(verify_variation2_equivalence(
                Fraction(2 * (18 * m_val) ** h), m_val, h))
        if prime is not None:
            mhat = tower_pow(prime + 1, mhat)
            mhat_exact = mhat.is_exact
        else:
            lower_p = tower_exp2(lo_log)
            mhat = tower_pow(tower_add(lower_p, 1), mhat)
            mhat_exact = False
    return Variation2Plan(
        h=h, f_name=f"(log2 n)^(1/{h})", f_star_name=f"(log2 n)^(1/{h + 1})",
        certificates=certs, chain_checks=chain_checks)


# ---------------------------------------------------------------------------
# main-rule exponent chains


@dataclass(frozen=True)
class MainChainsReport:
    c: Fraction  # B / 1944
    coupling_1944: bool  # 1944 == 36*3*18
    exponent_identity: bool  # 18m/1944 == m/108
    lower_exponent_step: bool  # 3m*(m/36) >= 9m*(m/108)
    tau_chain: bool | None  # p < tau < p^3
    tau_at_least_p: bool | None
    upper_f_condition: bool | None  # f(p) >= 18*mhat
    threshold_condition: bool | None  # 18*mhat >= B*f(p^(9*mhat))
    monotone_step: bool  # p <= n = p^(9*mhat), so f(p) <= f(n)

    @property
    def lower_ok(self) -> bool:
        return (self.coupling_1944 and self.exponent_identity
                and self.lower_exponent_step
                and self.tau_at_least_p is not False
                and self.threshold_condition is not False)

    @property
    def upper_ok(self) -> bool:
        return (self.monotone_step and self.upper_f_condition is not False
                and self.tau_chain is not False)

    def to_json(self) -> dict:
        return {"c": str(self.c), "coupling_1944": self.coupling_1944,
                "exponent_identity": self.exponent_identity,
                "lower_exponent_step": self.lower_exponent_step,
                "tau_chain": self.tau_chain,
                "tau_at_least_p": self.tau_at_least_p,
                "upper_f_condition": self.upper_f_condition,
                "threshold_condition": self.threshold_condition,
                "monotone_step": self.monotone_step,
                "upper_ok": self.upper_ok, "lower_ok": self.lower_ok}


def verify_main_chains(p, mhat_prev, b=1, r: int = 2, t: int = 3,
                           f: GentlyGrowingFn | None = None) -> MainChainsReport:
    """Exponent-level verification of both growth chains at n = p^(9*mhat).

    All comparisons happen on exponents of the common base; the constant
    cascade 36*3*18 = 1944 and c = B/1944 are checked exactly.
    """
    b = Fraction(b)
    coupling = 36 * 3 * 18 == 1944 and t == 3 and r == 2
    c = b / 1944
    exponent_identity = Fraction(18, 36 * 3 * 18) == Fraction(1, 108)

    if isinstance(mhat_prev, TowerInt) and mhat_prev.is_exact:
        m = mhat_prev.int_value
    elif isinstance(mhat_prev, int):
        m = mhat_prev
    else:
        m = None
    if m is not None:
        lower_step = (Fraction(3 * m) * Fraction(m, 36)
                      >= Fraction(9 * m) * Fraction(m, 108))
        monotone = 9 * m >= 1
    else:
        lower_step = Fraction(3, 36) >= Fraction(9, 108)  # coefficient form
        monotone = True

    tau_chain = tau_ge_p = None
    p_int = p.int_value if isinstance(p, TowerInt) and p.is_exact else (
        p if isinstance(p, int) else None)
    if p_int is not None:
        tau = p_int * (p_int * p_int - 1) // 2
        tau_chain = p_int < tau < p_int ** 3
        tau_ge_p = tau >= p_int

    upper_f = threshold_cond = None
    if f is not None and p_int is not None and m is not None:
        mhat18 = tower_mul(TowerInt.exact(18), TowerInt.exact(m))
        upper_f = compare_le(mhat18, f.eval_tower(TowerInt.exact(p_int)))
        n_val = tower_pow(p_int, 9 * m)
        threshold_cond = compare_le(tower_mul_frac(f.eval_tower(n_val), b), mhat18)

    return MainChainsReport(
        c=c, coupling_1944=coupling, exponent_identity=exponent_identity,
        lower_exponent_step=bool(lower_step), tau_chain=tau_chain,
        tau_at_least_p=tau_ge_p, upper_f_condition=upper_f,
        threshold_condition=threshold_cond, monotone_step=bool(monotone))


# ---------------------------------------------------------------------------
# optional B, C fitter


@dataclass(frozen=True)
class SearchConstants:
    b: Fraction
    c: Fraction
    provenance: str  # "claimed" | "fitted"

    def to_json(self) -> dict:
        return {"B": str(self.b), "C": str(self.c), "provenance": self.provenance}


def fit_search_constants(f: GentlyGrowingFn, m_samples: list[int] | None = None,
                        *, bit_cap: int = DEFAULT_BIT_CAP,
                        seed: int = 0) -> SearchConstants:
    """Sample-based search for the largest B and smallest C not refuted on a
    grid of m values (the constants are existential; this never proves them)."""
    samples = m_samples or [1, 2, 3, 4]
    best_b: Fraction | None = None
    smallest_c: int | None = None
    for m in sorted(samples):
        res = find_threshold_prime(f, m, 1, bit_cap=bit_cap, seed=seed)
        if res.infeasible:
            continue
        val = f.eval_tower(tower_pow(res.prime, m))
        _, hi = val.lift(val._eff_depth())
        if hi <= 0:
            continue
        cap = Fraction(2 * m) / hi
        cap = Fraction(cap.numerator * 1024 // cap.denominator, 1024)
        best_b = cap if best_b is None else min(best_b, cap)
        if smallest_c is None:
            smallest_c = m
    if best_b is None or smallest_c is None:
        raise CapExceededError("no feasible m samples for the fitter")
    return SearchConstants(b=best_b, c=Fraction(smallest_c), provenance="fitted")
