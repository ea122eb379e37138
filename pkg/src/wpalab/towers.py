"""Exact-or-certified arithmetic for iterated exponentials.

A ``TowerInt`` is either an exact arbitrary-precision natural (kept exact up
to ``DEFAULT_EXACT_BITS`` bits) or a certified value: a nesting depth k and a
rational interval [lo, hi] with  log2^(k)(value) in [lo, hi].  All interval
endpoints are computed with directed rounding (pure integer arithmetic), so
comparisons are sound: a strict verdict is never contradicted by the true
values, and overlap yields Indeterminate rather than a guess.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import CapExceededError, SpecError

#: exact values may occupy at most this many bits
DEFAULT_EXACT_BITS = 1 << 20

#: certified intervals are shifted up until their endpoints are below this
_NORM_HI = Fraction(1 << 20)

#: interval endpoints are rounded outward to this denominator
_GRID = 1 << 64

#: fractional bits produced by the directed log2 kernel
_LOG_PREC = 48

_MANT_BITS = 96


class Comparison(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INDETERMINATE = "indeterminate"


class _Unliftable(Exception):
    """Interval cannot be pushed through another log2 (endpoint <= 0)."""


def _floor_grid(x: Fraction) -> Fraction:
    return Fraction(x.numerator * _GRID // x.denominator, _GRID)

def _ceil_grid(x: Fraction) -> Fraction:
    return Fraction(-((-x.numerator) * _GRID // x.denominator), _GRID)


def _log2_frac_bits(m: int, roundup: bool) -> tuple[int, int]:
    """Integer part and _LOG_PREC directed fractional bits of log2(m), m >= 1.

    Downward pass never exceeds the true value; upward pass plus 2 ulps never
    falls below it (squaring is monotone, every rounding is one-directional).
    """
    e = m.bit_length() - 1
    if m == 1 << e:
        return e, 0
    mant = m << (_MANT_BITS - e) if _MANT_BITS >= e else None
    if mant is None:  # caller guarantees m below 2^_MANT_BITS
        raise SpecError("mantissa too wide")
    bits = 0
    one = 1 << _MANT_BITS
    for _ in range(_LOG_PREC):
        sq = mant * mant
        if roundup:
            mant = (sq + one - 1) >> _MANT_BITS
        else:
            mant = sq >> _MANT_BITS
        bits <<= 1
        if mant >> (_MANT_BITS + 1):
            bits |= 1
            if roundup:
                mant = (mant + 1) >> 1
            else:
                mant >>= 1
    return e, bits


def _log2_int_bounds(n: int) -> tuple[Fraction, Fraction]:
    """Certified [lo, hi] with lo <= log2(n) <= hi, for n >= 1."""
    if n < 1:
        raise _Unliftable
    e = n.bit_length() - 1
    if n == 1 << e:
        return Fraction(e), Fraction(e)
    shift = max(0, n.bit_length() - _MANT_BITS)
    m = n >> shift
    el, bl = _log2_frac_bits(m, roundup=False)
    lo = shift + el + Fraction(bl, 1 << _LOG_PREC)
    mu = m + 1
    eu = mu.bit_length() - 1
    if mu == 1 << eu:
        hi = Fraction(shift + eu)
    else:
        eu, bu = _log2_frac_bits(mu, roundup=True)
        hi = shift + eu + Fraction(bu + 2, 1 << _LOG_PREC)
    return lo, hi


def _log2_frac_lower(q: Fraction) -> Fraction:
    if q <= 0:
        raise _Unliftable
    lo_n, _ = _log2_int_bounds(q.numerator)
    _, hi_d = _log2_int_bounds(q.denominator)
    return _floor_grid(lo_n - hi_d)


def _log2_frac_upper(q: Fraction) -> Fraction:
    if q <= 0:
        raise _Unliftable
    _, hi_n = _log2_int_bounds(q.numerator)
    lo_d, _ = _log2_int_bounds(q.denominator)
    return _ceil_grid(hi_n - lo_d)


def _iroot(n: int, k: int) -> int:
    """Floor k-th root of n >= 0 (Newton on integers)."""
    if n < 0 or k < 1:
        raise SpecError("iroot needs n >= 0, k >= 1")
    if n < 2 or k == 1:
        return n
    x = 1 << (-(-n.bit_length() // k))  # >= true root
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def _frac_root_bounds(x: Fraction, k: int) -> tuple[Fraction, Fraction]:
    """Certified bounds on x^(1/k) for x >= 0."""
    scale = 1 << 32
    lo_int = _iroot(x.numerator * scale ** k // x.denominator, k)
    return Fraction(lo_int, scale), Fraction(lo_int + 2, scale)


def _frac_pow_bounds(x: Fraction, beta: Fraction) -> tuple[Fraction, Fraction]:
    """Certified bounds on x^beta for x > 0, beta > 0 rational."""
    p, q = beta.numerator, beta.denominator
    xp = x ** p
    if q == 1:
        return xp, xp
    return _frac_root_bounds(xp, q)


class TowerInt:
    """Exact natural number, or a certified iterated-log interval."""

    __slots__ = ("value", "depth", "lo", "hi")

    def __init__(self, *, value: int | None = None,
                 depth: int | None = None,
                 lo: Fraction | None = None, hi: Fraction | None = None):
        if value is not None:
            if value < 0:
                raise SpecError("TowerInt values are naturals")
            self.value = value
            self.depth = None
            self.lo = None
            self.hi = None
        else:
            if depth is None or lo is None or hi is None or depth < 0:
                raise SpecError("certified TowerInt needs depth, lo, hi")
            if not lo <= hi:
                raise SpecError(f"empty certificate interval [{lo}, {hi}]")
            self.value = None
            self.depth = depth
            self.lo = lo
            self.hi = hi

    # -- constructors ------------------------------------------------------

    @staticmethod
    def exact(n: int) -> "TowerInt":
        return TowerInt(value=n)

    @staticmethod
    def certified(depth: int, lo: Fraction, hi: Fraction) -> "TowerInt":
        t = TowerInt(depth=depth, lo=_floor_grid(Fraction(lo)), hi=_ceil_grid(Fraction(hi)))
        return t._normalized()

    @staticmethod
    def from_int(n: int, exact_bits: int = DEFAULT_EXACT_BITS) -> "TowerInt":
        if n.bit_length() <= exact_bits:
            return TowerInt.exact(n)
        return TowerInt.certified(1, *_log2_int_bounds(n))

    # -- basic queries -----------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.value is not None

    @property
    def int_value(self) -> int:
        if self.value is None:
            raise SpecError("TowerInt is certified, not exact")
        return self.value

    def _eff_depth(self) -> int:
        return 0 if self.is_exact else self.depth

    def _normalized(self) -> "TowerInt":
        if self.is_exact:
            return self
        depth, lo, hi = self.depth, self.lo, self.hi
        while hi > _NORM_HI and lo >= 1:
            lo, hi = _log2_frac_lower(lo), _log2_frac_upper(hi)
            depth += 1
        if depth == self.depth:
            return self
        return TowerInt(depth=depth, lo=lo, hi=hi)

    def lift(self, k: int) -> tuple[Fraction, Fraction]:
        """Certified bounds on log2^(k)(value); k must be >= the depth."""
        if self.is_exact:
            if k == 0:
                v = Fraction(self.value)
                return v, v
            lo, hi = _log2_int_bounds(self.value)
            d = 1
        else:
            if k < self.depth:
                raise SpecError(f"cannot materialize depth {k} below {self.depth}")
            d, lo, hi = self.depth, self.lo, self.hi
        while d < k:
            lo, hi = _log2_frac_lower(lo), _log2_frac_upper(hi)
            d += 1
        return lo, hi

    def as_certified(self) -> "TowerInt":
        """Force the certified representation (used by differential tests)."""
        if not self.is_exact:
            return self
        if self.value < 2:
            v = Fraction(self.value)
            return TowerInt(depth=0, lo=v, hi=v)
        return TowerInt.certified(1, *_log2_int_bounds(self.value))

    # -- rendering ---------------------------------------------------------

    def describe(self) -> str:
        if self.is_exact:
            if self.value.bit_length() <= 128:
                return str(self.value)
            return f"<exact {self.value.bit_length()}-bit integer>"
        lo = f"{float(self.lo):.6g}"
        hi = f"{float(self.hi):.6g}"
        return f"<tower: log2^{self.depth} in [{lo}, {hi}]>"

    def to_json(self) -> dict:
        if self.is_exact:
            if self.value.bit_length() <= 3000:
                return {"kind": "exact", "value": str(self.value)}
            return {"kind": "exact", "bits": self.value.bit_length()}
        return {"kind": "certified", "depth": self.depth,
                "log_lo": str(self.lo), "log_hi": str(self.hi)}

    def __repr__(self) -> str:
        return f"TowerInt({self.describe()})"


TowerLike = Union[int, TowerInt]


def _as_tower(x: TowerLike) -> TowerInt:
    return x if isinstance(x, TowerInt) else TowerInt.from_int(x)


def _lift_chain(t: TowerInt, kmax: int) -> dict[int, tuple[Fraction | None, Fraction]]:
    """Bounds on log2^(j)(value) for each reachable depth j up to kmax.

    The lower endpoint becomes None (meaning unbounded below) once it passes
    through a non-positive value; the chain stops when even the upper
    endpoint would (then the value is certifiably below any normalized
    deeper tower).
    """
    if t.is_exact:
        d, lo, hi = 0, Fraction(t.value), Fraction(t.value)
    else:
        d, lo, hi = t.depth, t.lo, t.hi
    out: dict[int, tuple[Fraction | None, Fraction]] = {d: (lo, hi)}
    while d < kmax and hi > 0:
        if d == 0 and lo is not None and lo == hi and hi.denominator == 1 and hi >= 1:
            lo, hi = _log2_int_bounds(hi.numerator)
        else:
            lo = _log2_frac_lower(lo) if (lo is not None and lo > 0) else None
            hi = _log2_frac_upper(hi)
        d += 1
        out[d] = (lo, hi)
    return out


def compare(x: TowerLike, y: TowerLike) -> Comparison:
    """Sound three-way comparison; Indeterminate when intervals overlap."""
    a, b = _as_tower(x), _as_tower(y)
    if a.is_exact and b.is_exact:
        if a.value < b.value:
            return Comparison.LESS
        if a.value > b.value:
            return Comparison.GREATER
        return Comparison.EQUAL
    k = max(a._eff_depth(), b._eff_depth())
    ca = _lift_chain(a, k)
    cb = _lift_chain(b, k)
    common = sorted(set(ca) & set(cb))
    if not common:
        # one side's iterated log collapsed below the other's native depth;
        # a normalized deep certificate (lo >= 1) is then strictly bigger
        if max(ca) < min(cb):
            return Comparison.LESS if b.lo is not None and b.lo >= 1 \
                else Comparison.INDETERMINATE
        if max(cb) < min(ca):
            return Comparison.GREATER if a.lo is not None and a.lo >= 1 \
                else Comparison.INDETERMINATE
        return Comparison.INDETERMINATE
    d = common[-1]
    alo, ahi = ca[d]
    blo, bhi = cb[d]
    if blo is not None and ahi < blo:
        return Comparison.LESS
    if alo is not None and bhi < alo:
        return Comparison.GREATER
    if alo is not None and blo is not None and alo == ahi == blo == bhi:
        return Comparison.EQUAL  # point certificates: log2^(d) values coincide
    return Comparison.INDETERMINATE


def compare_le(x: TowerLike, y: TowerLike) -> bool | None:
    """True / False when certified, None when indeterminate."""
    c = compare(x, y)
    if c is Comparison.INDETERMINATE:
        return None
    return c in (Comparison.LESS, Comparison.EQUAL)


def _lift_or_none(t: TowerInt, k: int):
    try:
        return t.lift(k)
    except _Unliftable:
        return None


def _deep_combine(a: TowerInt, b: TowerInt, k: int, slack: int) -> TowerInt:
    """Certified interval at depth k >= 2 for x*y (slack 1) or x+y (slack 1),
    using  max(x,y) <= result <= max(x,y)^2  and the fact that the +1 it
    costs at depth 2 does not grow at deeper levels (log2(A+1) <= log2(A)+1
    for A >= 1).  Sides too small to lift must be dominated by the other.
    """
    la = _lift_or_none(a, k)
    lb = _lift_or_none(b, k)
    if la is not None and lb is not None:
        lo = max(la[0], lb[0])
        hi = max(la[1], lb[1]) + slack
        return TowerInt.certified(k, lo, hi)
    if la is None and lb is None:
        raise CapExceededError("cannot certify combination of shallow values")
    lifted, shallow = (la, b) if la is not None else (lb, a)
    deep = a if la is not None else b
    if compare(shallow, deep) in (Comparison.LESS, Comparison.EQUAL):
        return TowerInt.certified(k, lifted[0], lifted[1] + slack)
    raise CapExceededError("cannot certify: unliftable side not dominated")


def _is_unit(t: TowerInt) -> bool:
    if t.is_exact:
        return t.value == 1
    return t.depth == 0 and t.lo == t.hi == 1


def _depth0_interval(t: TowerInt) -> tuple[Fraction, Fraction] | None:
    """Value-level bounds when the representation is already at depth 0."""
    if t.is_exact:
        v = Fraction(t.value)
        return v, v
    if t.depth == 0:
        return t.lo, t.hi
    return None


def tower_mul(x: TowerLike, y: TowerLike) -> TowerInt:
    a, b = _as_tower(x), _as_tower(y)
    if _is_unit(a):
        return b
    if _is_unit(b):
        return a
    if a.is_exact and b.is_exact:
        if a.value.bit_length() + b.value.bit_length() <= DEFAULT_EXACT_BITS:
            return TowerInt.exact(a.value * b.value)
    ia, ib = _depth0_interval(a), _depth0_interval(b)
    if ia is not None and ib is not None:
        return TowerInt.certified(0, ia[0] * ib[0], ia[1] * ib[1])
    da, db = a._eff_depth(), b._eff_depth()
    if da <= 1 and db <= 1:
        la = _lift_or_none(a, 1)
        lb = _lift_or_none(b, 1)
        if la is None or lb is None:
            raise CapExceededError("cannot certify product of near-zero values")
        return TowerInt.certified(1, la[0] + lb[0], la[1] + lb[1])
    return _deep_combine(a, b, max(2, da, db), slack=1)


def tower_add(x: TowerLike, y: TowerLike) -> TowerInt:
    a, b = _as_tower(x), _as_tower(y)
    if a.is_exact and b.is_exact:
        s = a.value + b.value
        if s.bit_length() <= DEFAULT_EXACT_BITS:
            return TowerInt.exact(s)
    ia, ib = _depth0_interval(a), _depth0_interval(b)
    if ia is not None and ib is not None:
        return TowerInt.certified(0, ia[0] + ib[0], ia[1] + ib[1])
    da, db = a._eff_depth(), b._eff_depth()
    if da <= 1 and db <= 1:
        la = _lift_or_none(a, 1)
        lb = _lift_or_none(b, 1)
        if la is None or lb is None:
            raise CapExceededError("cannot certify sum of near-zero values")
        return TowerInt.certified(1, max(la[0], lb[0]), max(la[1], lb[1]) + 1)
    return _deep_combine(a, b, max(2, da, db), slack=1)


def tower_mul_frac(x: TowerLike, q: Fraction) -> TowerInt:
    """x * q for a positive rational q (certified unless exact integer)."""
    q = Fraction(q)
    if q <= 0:
        raise SpecError("tower_mul_frac needs q > 0")
    a = _as_tower(x)
    if a.is_exact:
        r = a.value * q
        if r.denominator == 1 and r.numerator.bit_length() <= DEFAULT_EXACT_BITS:
            return TowerInt.exact(r.numerator)
        return TowerInt(depth=0, lo=r, hi=r)._normalized()
    if a.depth == 0:
        return TowerInt(depth=0, lo=a.lo * q, hi=a.hi * q)._normalized()
    if a.depth == 1:
        return TowerInt.certified(
            1, a.lo + _log2_frac_lower(q), a.hi + _log2_frac_upper(q))
    if q >= 1:
        return _deep_combine(a, TowerInt(depth=0, lo=q, hi=q),
                             max(2, a.depth), slack=1)
    # shrinking a deep tower: q*x <= x, and q*x >= x^(1/2) costs at most 1 at
    # depth 2 provided -log2(q) <= log2(x)/2; the -1 is stable deeper down
    # (log2(A-1) >= log2(A)-1 for A >= 2)
    k = max(2, a.depth)
    lo, hi = a.lift(k)
    lo2, _ = a.lift(2)  # bounds at depth 2: log2(log2 x) >= lo2
    shift = -_log2_frac_lower(q)  # q >= 2^-shift
    floor_lo2 = lo2.numerator // lo2.denominator
    if floor_lo2 >= 1 and Fraction(shift) <= Fraction(1 << max(floor_lo2 - 1, 0)):
        return TowerInt.certified(k, lo - 1, hi)
    raise CapExceededError("cannot certify deep tower scaled by tiny fraction")


def tower_log2(x: TowerLike) -> TowerInt:
    """Certified log2: depth shifts down by one."""
    a = _as_tower(x)
    if a.is_exact:
        if a.value < 1:
            raise SpecError("log2 of zero")
        lo, hi = _log2_int_bounds(a.value)
        return TowerInt(depth=0, lo=lo, hi=hi)
    if a.depth == 0:
        return TowerInt(depth=0, lo=_log2_frac_lower(a.lo), hi=_log2_frac_upper(a.hi))
    return TowerInt(depth=a.depth - 1, lo=a.lo, hi=a.hi)


def tower_exp2(x: TowerLike) -> TowerInt:
    """Certified 2^x: depth shifts up by one."""
    a = _as_tower(x)
    if a.is_exact:
        if a.value < DEFAULT_EXACT_BITS:
            return TowerInt.exact(1 << a.value)
        v = Fraction(a.value)
        return TowerInt.certified(1, v, v)
    return TowerInt.certified(a.depth + 1, a.lo, a.hi)


def tower_pow(base: TowerLike, exp: TowerLike) -> TowerInt:
    """base ** exp, exact while the result fits the exactness threshold."""
    b, e = _as_tower(base), _as_tower(exp)
    if b.is_exact and b.value == 1:
        return TowerInt.exact(1)
    if b.is_exact and b.value == 0:
        raise SpecError("0 ** tower is not defined here")
    if e.is_exact and e.value == 0:
        return TowerInt.exact(1)
    if b.is_exact and e.is_exact:
        if e.value * b.value.bit_length() <= DEFAULT_EXACT_BITS:
            return TowerInt.exact(b.value ** e.value)
    return tower_exp2(tower_mul(e, tower_log2(b)))


def tower_pow_frac(x: TowerLike, beta: Fraction) -> TowerInt:
    """x ** beta for positive rational beta (certified)."""
    beta = Fraction(beta)
    if beta <= 0:
        raise SpecError("tower_pow_frac needs beta > 0")
    a = _as_tower(x)
    if a.is_exact and beta.denominator == 1:
        return tower_pow(a, TowerInt.exact(beta.numerator))
    if a._eff_depth() == 0:
        if a.is_exact:
            lo = hi = Fraction(a.value)
        else:
            lo, hi = a.lo, a.hi
        if lo <= 0:
            raise SpecError("tower_pow_frac needs a positive base")
        plo, _ = _frac_pow_bounds(lo, beta)
        _, phi = _frac_pow_bounds(hi, beta)
        return TowerInt(depth=0, lo=plo, hi=phi)._normalized()
    return tower_exp2(tower_mul_frac(tower_log2(a), beta))


def tower_iterated_log2(x: TowerLike, j: int) -> TowerInt:
    """log2 applied j >= 0 times, as a TowerInt (certified when shrinking)."""
    a = _as_tower(x)
    if j == 0:
        return a
    d = a._eff_depth()
    if j >= d:
        lo, hi = a.lift(j)
        return TowerInt(depth=0, lo=lo, hi=hi)
    return TowerInt(depth=a.depth - j, lo=a.lo, hi=a.hi)


# ---------------------------------------------------------------------------
# the iterated-exponential sequences


def tower_levels(a: Sequence[int], n: int,
                 exact_bits: int = DEFAULT_EXACT_BITS) -> list[TowerInt]:
    """[a-hat_0, ..., a-hat_n] with a-hat_0 = 1, a-hat_k = a_k ** a-hat_{k-1}."""
    if n > len(a):
        raise SpecError(f"level {n} needs {n} entries, got {len(a)}")
    for v in a[:n]:
        if v < 2:
            raise SpecError(f"sequence entries must be >= 2, got {v}")
    levels = [TowerInt.exact(1)]
    for k in range(1, n + 1):
        base = TowerInt.exact(a[k - 1])
        prev = levels[-1]
        if prev.is_exact and prev.value * base.value.bit_length() <= exact_bits:
            levels.append(TowerInt.exact(base.value ** prev.value))
        else:
            levels.append(tower_pow(base, prev))
    return levels


def tower_eval(a: Sequence[int], n: int,
               exact_bits: int = DEFAULT_EXACT_BITS) -> TowerInt:
    """a-hat_n for the sequence a (entries must all be >= 2)."""
    return tower_levels(a, n, exact_bits)[n]


def _two_pow_at_least(x: int, c: Fraction) -> bool:
    """2^x >= c*x, decided exactly (x a positive exact integer)."""
    if x >= 64 and c <= Fraction(1 << (x // 2)):
        return True  # 2^x = 2^(x/2) * 2^(x/2) >= c * x for x >= 64
    return (1 << x) >= c * x


def persistence_level(a: Sequence[int], c: Fraction | int) -> int:
    """Smallest M with  c * a-hat_{n-1} <= a-hat_n  for all n >= M.

    Scans directly and stops at the persistence point: once
    2^x >= c*x at x = a-hat_{n-1}, the bound holds at every later level
    because (2^x / x) is non-decreasing for x >= 1 and a-hat is increasing.
    """
    c = Fraction(c)
    if c <= 0:
        raise SpecError("persistence_level needs c > 0")
    levels = tower_levels(a, len(a))
    last_fail = 0
    for n in range(1, len(levels)):
        prev, cur = levels[n - 1], levels[n]
        if not prev.is_exact:
            break  # persistence certainly reached long before exactness ends
        x = prev.value
        if _two_pow_at_least(x, c):
            return last_fail + 1
        ok = compare_le(tower_mul_frac(prev, c), cur)
        if ok is False:
            last_fail = n
        elif ok is None:
            raise CapExceededError("indeterminate comparison in persistence_level scan")
    raise SpecError(
        f"prefix of length {len(a)} too short to certify M({c}) persistence")


@dataclass(frozen=True)
class TailSumRow:
    n: int
    partial_sum: int | None  # None once levels leave the exact range
    bound: int | None
    holds: bool | None


@dataclass(frozen=True)
class TailSumCertificate:
    a: tuple[int, ...]
    m2: int
    m_of_m2: int
    threshold: int  # N = max(M(2)+1, M(M(2)))
    eq2_rows: tuple[TailSumRow, ...]  # sum_{j=M(2)}^n <= 2 a-hat_n
    final_rows: tuple[TailSumRow, ...]  # sum_{j=0}^n <= 3 a-hat_n for n >= N
    exact_levels: int
    partial: bool

    @property
    def all_verified(self) -> bool:
        rows = list(self.eq2_rows) + list(self.final_rows)
        return all(r.holds for r in rows if r.holds is not None)


def verify_tail_sum_bound(a: Sequence[int], n_max: int,
                   exact_bits: int = DEFAULT_EXACT_BITS) -> TailSumCertificate:
    """Exact verification of the tail-sum bounds, with N from the two-level
    M-scan (N = max{M(2)+1, M(M(2))})."""
    if n_max > len(a):
        raise SpecError(f"n_max {n_max} exceeds prefix length {len(a)}")
    m2 = persistence_level(a, 2)
    m_of_m2 = persistence_level(a, m2)
    threshold = max(m2 + 1, m_of_m2)
    levels = tower_levels(a, n_max, exact_bits)
    exact_levels = 0
    while exact_levels < len(levels) and levels[exact_levels].is_exact:
        exact_levels += 1

    eq2_rows: list[TailSumRow] = []
    final_rows: list[TailSumRow] = []
    partial = exact_levels <= n_max
    for n in range(m2, n_max + 1):
        if n < exact_levels:
            tail = sum(levels[j].value for j in range(m2, n + 1))
            bound = 2 * levels[n].value
            eq2_rows.append(TailSumRow(n, tail, bound, tail <= bound))
        else:
            eq2_rows.append(TailSumRow(n, None, None, None))
    for n in range(threshold, n_max + 1):
        if n < exact_levels:
            total = sum(levels[j].value for j in range(0, n + 1))
            bound = 3 * levels[n].value
            final_rows.append(TailSumRow(n, total, bound, total <= bound))
        else:
            final_rows.append(TailSumRow(n, None, None, None))
    return TailSumCertificate(
        a=tuple(a[:n_max]),
        m2=m2,
        m_of_m2=m_of_m2,
        threshold=threshold,
        eq2_rows=tuple(eq2_rows),
        final_rows=tuple(final_rows),
        exact_levels=exact_levels,
        partial=partial,
    )
