"""Exact subgroup lattices and the counting invariants built on them:
s_n, minimal proper-subgroup index, rank, maximal elementary abelian
subgroups, and subspace counts of F_p^e (Gaussian binomials, Galois numbers).

The lattice algorithm is deliberately brute force so it can serve as an
oracle: enumerate all cyclic subgroups, then close under joins with
prime-power cyclic subgroups.  Every subgroup is generated by elements of
prime-power order, and each non-cyclic subgroup is a proper subgroup joined
with one such element, so the fixpoint is the complete lattice.  No
conjugacy shortcuts are used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapExceededError, SpecError
from .perm import PermGroup, Permutation, ensure_materialized

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

#: default cap on |G| for full lattice enumeration
DEFAULT_LATTICE_CAP = 2_000

#: abort minimal-generator search beyond this tuple size
MAX_GENERATOR_TUPLE = 4

#: abort minimal-generator search after this many closure attempts
GENERATOR_SEARCH_BUDGET = 2_000_000

_FULL = -1  # closure sentinel: result is the whole parent group


if _HAVE_NUMBA:

    @njit(cache=True)
    def _closure_kernel(table, gens, visited, stamp, members, frontier, nxt, half):
        count = 0
        flen = 0
        if visited[0] != stamp:
            visited[0] = stamp
            members[0] = 0
            count = 1
        for j in range(gens.shape[0]):
            g = gens[j]
            if visited[g] != stamp:
                visited[g] = stamp
                members[count] = g
                count += 1
                frontier[flen] = g
                flen += 1
        if count > half:
            return _FULL
        while flen > 0:
            nlen = 0
            for i in range(flen):
                e = frontier[i]
                for j in range(gens.shape[0]):
                    y = table[e, gens[j]]
                    if visited[y] != stamp:
                        visited[y] = stamp
                        members[count] = y
                        count += 1
                        nxt[nlen] = y
                        nlen += 1
            if count > half:
                return _FULL
            for i in range(nlen):
                frontier[i] = nxt[i]
            flen = nlen
        return count


def _closure_python(table, gens, visited, stamp, members, frontier, nxt, half):
    count = 0
    flen = 0
    if visited[0] != stamp:
        visited[0] = stamp
        members[0] = 0
        count = 1
    for g in gens:
        if visited[g] != stamp:
            visited[g] = stamp
            members[count] = g
            count += 1
            frontier[flen] = g
            flen += 1
    if count > half:
        return _FULL
    while flen > 0:
        nlen = 0
        for i in range(flen):
            e = frontier[i]
            row = table[e]
            for g in gens:
                y = row[g]
                if visited[y] != stamp:
                    visited[y] = stamp
                    members[count] = y
                    count += 1
                    nxt[nlen] = y
                    nlen += 1
        if count > half:
            return _FULL
        for i in range(nlen):
            frontier[i] = nxt[i]
        flen = nlen
    return count


class _Table:
    """Multiplication table of a materialized group, plus closure workspace."""

    def __init__(self, group: PermGroup):
        elems = group.elements
        n = len(elems)
        degree = group.degree
        imgs = np.array([e.images for e in elems], dtype=np.int64)
        index_of = {e.images: i for i, e in enumerate(elems)}
        table = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            composed = imgs[i][imgs]  # row j = images of elems[i] o elems[j]
            row = table[i]
            for j in range(n):
                row[j] = index_of[tuple(composed[j].tolist())]
        self.group = group
        self.n = n
        self.degree = degree
        self.table = table
        self.inverse = np.argmax(table == 0, axis=1).astype(np.int32)
        self.element_order = np.array([e.order() for e in elems], dtype=np.int64)
        # closure workspace (timestamp trick avoids re-zeroing `visited`)
        self._visited = np.zeros(n, dtype=np.int64)
        self._members = np.empty(n, dtype=np.int32)
        self._frontier = np.empty(n, dtype=np.int32)
        self._next = np.empty(n, dtype=np.int32)
        self._stamp = 0
        self._use_numba = _HAVE_NUMBA and n > 64
        self._table_list = None if self._use_numba else table.tolist()

    def closure_of(self, gens: list[int] | np.ndarray, half: int | None = None):
        """Sorted element indices of <gens>, or _FULL if it passes `half`."""
        if half is None:
            half = self.n // 2
        self._stamp += 1
        if self._use_numba:
            garr = np.asarray(gens, dtype=np.int32)
            count = _closure_kernel(
                self.table, garr, self._visited, self._stamp,
                self._members, self._frontier, self._next, half,
            )
        else:
            count = _closure_python(
                self._table_list, list(gens), self._visited, self._stamp,
                self._members, self._frontier, self._next, half,
            )
        if count == _FULL:
            return _FULL
        out = self._members[:count].copy()
        out.sort()
        return out


def _mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def _is_prime_power(m: int) -> bool:
    if m < 2:
        return False
    p = None
    x = m
    for d in range(2, math.isqrt(m) + 1):
        if x % d == 0:
            p = d
            break
    if p is None:
        return True  # m itself prime
    while x % p == 0:
        x //= p
    return x == 1


@dataclass(frozen=True)
class Subgroup:
    """One subgroup of the parent, as sorted element indices."""

    indices: tuple[int, ...]
    order: int
    gens: tuple[int, ...]  # generating element indices (not necessarily minimal)
    mask: int

    def contains(self, other: "Subgroup") -> bool:
        return other.mask | self.mask == self.mask


class SubgroupLattice:
    """The complete, canonically ordered subgroup list of a small group."""

    def __init__(self, parent: PermGroup, table: _Table, subgroups: list[Subgroup]):
        self.parent = parent
        self.table = table
        self.order = table.n
        # canonical order: by (order, element indices); deterministic everywhere
        self.subgroups: tuple[Subgroup, ...] = tuple(
            sorted(subgroups, key=lambda s: (s.order, s.indices))
        )

    def __len__(self) -> int:
        return len(self.subgroups)

    def index_of(self, sub: Subgroup) -> int:
        return self.order // sub.order

    def subgroup_permutations(self, sub: Subgroup) -> tuple[Permutation, ...]:
        elems = self.parent.elements
        return tuple(elems[i] for i in sub.indices)

    def counts_by_index(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for s in self.subgroups:
            idx = self.order // s.order
            out[idx] = out.get(idx, 0) + 1
        return dict(sorted(out.items()))


@lru_cache(maxsize=16)
def _lattice_cached(group: PermGroup, cap: int) -> SubgroupLattice:
    mat = ensure_materialized(group, cap=max(cap, 1))
    n = mat.order
    if n > cap:
        raise CapExceededError(f"|G| = {n} exceeds lattice cap {cap}")
    table = _Table(mat)

    trivial = Subgroup((0,), 1, (), 1)
    full = Subgroup(tuple(range(n)), n, tuple(range(n)), (1 << n) - 1)
    subs: dict[int, Subgroup] = {trivial.mask: trivial, full.mask: full}

    # layer 1: all cyclic subgroups; ascending x makes the stored generator
    # the minimal one, so results are canonical
    cyclic: list[Subgroup] = []
    tab = table.table
    for x in range(1, n):
        members = [0]
        y = x
        while y != 0:
            members.append(y)
            y = int(tab[y, x])
        members.sort()
        mask = _mask_of(members)
        if mask not in subs:
            rec = Subgroup(tuple(members), len(members), (x,), mask)
            subs[mask] = rec
            cyclic.append(rec)

    # join partners: prime-power cyclic subgroups suffice for completeness
    partners = [c for c in cyclic if _is_prime_power(c.order)]

    frontier: list[Subgroup] = list(cyclic)
    while frontier:
        h = frontier.pop()
        if h.order == n:
            continue
        hmask = h.mask
        hgens = h.gens
        for c in partners:
            if c.mask | hmask == hmask:
                continue  # partner inside h already
            union = hmask | c.mask
            if union in subs:
                continue  # union is itself closed; join adds nothing new
            gens = hgens + c.gens
            got = table.closure_of(list(gens))
            if got is _FULL:
                continue  # join is the whole group, already recorded
            members = tuple(int(v) for v in got)
            mask = _mask_of(members)
            if mask not in subs:
                rec = Subgroup(members, len(members), gens, mask)
                subs[mask] = rec
                frontier.append(rec)

    return SubgroupLattice(mat, table, list(subs.values()))


def subgroup_lattice(group: PermGroup, cap: int = DEFAULT_LATTICE_CAP) -> SubgroupLattice:
    """All subgroups of ``group``; raises CapExceededError beyond ``cap``."""
    return _lattice_cached(group, cap)


def s_n(group: PermGroup | SubgroupLattice, n: int, cap: int = DEFAULT_LATTICE_CAP) -> int:
    """Number of subgroups of index at most n."""
    lat = group if isinstance(group, SubgroupLattice) else subgroup_lattice(group, cap)
    if n < 1:
        return 0
    return sum(1 for s in lat.subgroups if lat.order // s.order <= n)


def minimal_index(group: PermGroup | SubgroupLattice, cap: int = DEFAULT_LATTICE_CAP) -> int:
    """mu(G): minimal index of a proper subgroup."""
    lat = group if isinstance(group, SubgroupLattice) else subgroup_lattice(group, cap)
    if lat.order == 1:
        raise SpecError("mu is undefined for the trivial group")
    largest_proper = max(s.order for s in lat.subgroups if s.order < lat.order)
    return lat.order // largest_proper


def _min_generators(lat: SubgroupLattice, sub: Subgroup) -> int:
    """Smallest generating-tuple size, by breadth-first search over sizes."""
    if sub.order == 1:
        return 0
    table = lat.table
    orders = table.element_order
    if any(int(orders[i]) == sub.order for i in sub.indices):
        return 1
    idx = [i for i in sub.indices if i != 0]
    budget = GENERATOR_SEARCH_BUDGET
    for size in range(2, MAX_GENERATOR_TUPLE + 1):
        from itertools import combinations

        for tup in combinations(idx, size):
            budget -= 1
            if budget < 0:
                raise CapExceededError(
                    f"generator search budget exhausted for subgroup of order {sub.order}"
                )
            got = table.closure_of(list(tup))
            size_found = lat.order if got is _FULL else len(got)
            if size_found == sub.order:
                return size
    raise CapExceededError(
        f"subgroup of order {sub.order} needs more than {MAX_GENERATOR_TUPLE} generators"
    )


def rank(group: PermGroup | SubgroupLattice, cap: int = DEFAULT_LATTICE_CAP) -> int:
    """rk(G): max over subgroups H of the minimal number of generators of H."""
    lat = group if isinstance(group, SubgroupLattice) else subgroup_lattice(group, cap)
    return max(_min_generators(lat, s) for s in lat.subgroups)


@dataclass(frozen=True)
class ElemAbelianInfo:
    prime: int
    exponent: int  # witness is C_p^exponent
    witness: Subgroup


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def elem_abelian_max(
    group: PermGroup | SubgroupLattice, cap: int = DEFAULT_LATTICE_CAP
) -> list[ElemAbelianInfo]:
    """For each prime p | |G|, the largest e with C_p^e <= G, plus a witness."""
    lat = group if isinstance(group, SubgroupLattice) else subgroup_lattice(group, cap)
    table = lat.table
    orders = table.element_order
    best: dict[int, ElemAbelianInfo] = {}
    for sub in lat.subgroups:  # canonical order makes the witness deterministic
        if sub.order == 1:
            continue
        facs = _prime_factors(sub.order)
        if len(facs) != 1:
            continue
        p = facs[0]
        if any(int(orders[i]) != p for i in sub.indices if i != 0):
            continue  # not exponent p
        idx = np.fromiter(sub.indices, dtype=np.int64)
        tt = table.table[np.ix_(idx, idx)]
        if not (tt == tt.T).all():
            continue  # not abelian
        e = round(math.log(sub.order, p))
        cur = best.get(p)
        if cur is None or e > cur.exponent:
            best[p] = ElemAbelianInfo(p, e, sub)
    out = [best[p] for p in sorted(best)]
    missing = [p for p in _prime_factors(lat.order) if p not in best]
    if missing:  # Cauchy: an order-p element always exists
        raise SpecError(f"internal: no elementary abelian subgroup found for {missing}")
    return out


# ---------------------------------------------------------------------------
# subspace counts of F_p^e


def gaussian_binomial(e: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of F_p^e (exact integer)."""
    if not 0 <= k <= e:
        raise SpecError(f"need 0 <= k <= e, got k={k}, e={e}")
    num = 1
    den = 1
    for i in range(k):
        num *= p ** (e - i) - 1
        den *= p ** (i + 1) - 1
    q, r = divmod(num, den)
    if r:
        raise SpecError("internal: Gaussian binomial was not an integer")
    return q


def galois_number(e: int, p: int) -> int:
    """Total number of subspaces of F_p^e over all dimensions."""
    return sum(gaussian_binomial(e, k, p) for k in range(e + 1))


# ---------------------------------------------------------------------------
# emitters


def sn_table_csv(group: PermGroup | SubgroupLattice, n_max: int,
                 cap: int = DEFAULT_LATTICE_CAP) -> str:
    lat = group if isinstance(group, SubgroupLattice) else subgroup_lattice(group, cap)
    lines = ["n,s_n"]
    for n in range(1, n_max + 1):
        lines.append(f"{n},{s_n(lat, n)}")
    return "\n".join(lines) + "\n"


def lattice_summary(group: PermGroup | SubgroupLattice,
                    cap: int = DEFAULT_LATTICE_CAP) -> dict:
    """JSON-ready summary: orders, indices, counts per index."""
    lat = group if isinstance(group, SubgroupLattice) else subgroup_lattice(group, cap)
    return {
        "group_order": lat.order,
        "subgroup_count": len(lat),
        "counts_by_index": {str(k): v for k, v in lat.counts_by_index().items()},
        "subgroup_orders": sorted({s.order for s in lat.subgroups}),
    }
