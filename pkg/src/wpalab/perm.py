"""Permutations on dense 0-based domains, closure-generated groups, orbits,
and the group-spec mini-language (``cyc:m``, ``sym:m``, ``alt:m``, ``psl2:p``,
``perm:<degree>:<cycles;...>``).

Points are 0-based integers.  A permutation is stored as its full image
sequence, so application is O(1) and degrees up to ``MAX_DEGREE`` stay
representable even when group orders cannot be materialized.
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Sequence

from .errors import CapExceededError, DegreeCapError, DegreeMismatchError, SpecError

#: default cap on materialized group order for closure
DEFAULT_ORDER_CAP = 20_000

#: largest representable permutation degree
MAX_DEGREE = 1_000_000

#: closure aborts when (elements so far) * degree exceeds this many cells
CLOSURE_CELL_GUARD = 200_000_000


class Permutation:
    """A bijection of {0, ..., degree-1}, stored as its image tuple."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        imgs = tuple(images)
        n = len(imgs)
        if n == 0:
            raise SpecError("permutation degree must be positive")
        seen = [False] * n
        for v in imgs:
            if not isinstance(v, int) or v < 0 or v >= n or seen[v]:
                raise SpecError(f"images {imgs!r} are not a bijection of 0..{n - 1}")
            seen[v] = True
        self.images = imgs

    @classmethod
    def _trusted(cls, images: tuple[int, ...]) -> "Permutation":
        # skip bijection validation; caller guarantees it
        p = object.__new__(cls)
        p.images = images
        return p

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        if degree <= 0:
            raise SpecError("degree must be positive")
        return cls._trusted(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Build from disjoint cycles; points not mentioned are fixed."""
        imgs = list(range(degree))
        touched = set()
        for cyc in cycles:
            for pt in cyc:
                if not 0 <= pt < degree:
                    raise SpecError(f"cycle point {pt} out of range for degree {degree}")
                if pt in touched:
                    raise SpecError(f"cycles are not disjoint at point {pt}")
                touched.add(pt)
            for i, pt in enumerate(cyc):
                imgs[pt] = cyc[(i + 1) % len(cyc)]
        return cls._trusted(tuple(imgs))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images):
            inv[v] = i
        return Permutation._trusted(tuple(inv))

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images))

    def cycles(self, *, include_fixed: bool = False) -> list[tuple[int, ...]]:
        """Cycle decomposition; each cycle starts at its minimal point."""
        out = []
        seen = [False] * self.degree
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            nxt = self.images[start]
            while nxt != start:
                cyc.append(nxt)
                seen[nxt] = True
                nxt = self.images[nxt]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles()), 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def __repr__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return f"Perm(id/{self.degree})"
        body = "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)
        return f"Perm({body}/{self.degree})"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """(p o q)(x) = p(q(x)).  Degrees must match."""
    if p.degree != q.degree:
        raise DegreeMismatchError(f"degrees differ: {p.degree} != {q.degree}")
    pi = p.images
    return Permutation._trusted(tuple(pi[v] for v in q.images))


class PermGroup:
    """A permutation group given by generators.

    ``elements``/``order`` are filled in lazily: ``order`` may be known from a
    construction formula before (or without) the element list existing.  A
    materialized element list is always canonically sorted (lexicographically
    by image sequence), so every enumeration is reproducible.
    """

    __slots__ = ("degree", "generators", "elements", "order", "name")

    def __init__(
        self,
        generators: Sequence[Permutation],
        *,
        elements: Sequence[Permutation] | None = None,
        order: int | None = None,
        name: str | None = None,
    ):
        gens = tuple(generators)
        if not gens:
            raise SpecError("generator list must be non-empty")
        degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise DegreeMismatchError("generators have mixed degrees")
        self.degree = degree
        self.generators = gens
        self.elements = tuple(elements) if elements is not None else None
        self.order = order if order is not None else (
            len(self.elements) if self.elements is not None else None
        )
        self.name = name

    @property
    def materialized(self) -> bool:
        return self.elements is not None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PermGroup)
            and self.degree == other.degree
            and self.generators == other.generators
        )

    def __hash__(self) -> int:
        return hash((self.degree, self.generators))

    def __repr__(self) -> str:
        label = self.name or f"{len(self.generators)} gens"
        o = self.order if self.order is not None else "?"
        return f"PermGroup({label}, degree={self.degree}, order={o})"


def generate(generators: Sequence[Permutation], cap: int = DEFAULT_ORDER_CAP) -> PermGroup:
    """Closure of the generators under composition, breadth-first.

    Returns the group with exact order and the canonical (sorted) element
    list.  If the closure passes ``cap`` elements (or the degree*order memory
    guard), the group is returned unmaterialized with order unknown.
    """
    gens = tuple(generators)
    if not gens:
        raise SpecError("generator list must be non-empty")
    degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise DegreeMismatchError("generators have mixed degrees")

    gen_imgs = [g.images for g in gens]
    ident = tuple(range(degree))
    seen: set[tuple[int, ...]] = {ident}
    frontier = [ident]
    exceeded = False
    while frontier:
        nxt = []
        for e in frontier:
            for gi in gen_imgs:
                prod = tuple(e[v] for v in gi)
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        if len(seen) > cap or len(seen) * degree > CLOSURE_CELL_GUARD:
            exceeded = True
            break
        frontier = nxt

    if exceeded:
        return PermGroup(gens)
    elems = tuple(Permutation._trusted(t) for t in sorted(seen))
    return PermGroup(gens, elements=elems, order=len(elems))


def ensure_materialized(group: PermGroup, cap: int = DEFAULT_ORDER_CAP) -> PermGroup:
    """Return a materialized copy of ``group`` (or ``group`` itself).

    Raises CapExceededError when the closure does not fit under ``cap``.
    """
    if group.materialized:
        return group
    if group.order is not None and group.order > cap:
        raise CapExceededError(
            f"order {group.order} exceeds cap {cap} (known without closure)")
    closed = generate(group.generators, cap=cap)
    if not closed.materialized:
        raise CapExceededError(
            f"closure exceeds cap {cap} (degree {group.degree})"
        )
    closed.name = group.name
    if group.order is not None and group.order != closed.order:
        raise SpecError(
            f"claimed order {group.order} contradicts closure order {closed.order}"
        )
    return closed


def orbits(group: PermGroup) -> list[tuple[int, ...]]:
    """Orbit partition of the domain, each orbit sorted, orbits by min point."""
    n = group.degree
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = True
        queue = [start]
        while queue:
            pt = queue.pop()
            for g in group.generators:
                img = g.images[pt]
                if not seen[img]:
                    seen[img] = True
                    orbit.append(img)
                    queue.append(img)
        out.append(tuple(sorted(orbit)))
    return out


def is_transitive(group: PermGroup) -> bool:
    return len(orbits(group)) == 1


# ---------------------------------------------------------------------------
# group-spec mini-language


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def psl2_order(p: int) -> int:
    """|PSL2(p)| = p(p^2-1)/gcd(2, p-1)."""
    return p * (p * p - 1) // math.gcd(2, p - 1)


def projective_line_generators(p: int) -> tuple[Permutation, Permutation]:
    """Generators x -> x+1 and x -> -1/x on the projective line over F_p.

    Points 0..p-1 are the field elements; point p is the point at infinity.
    """
    if not _is_prime(p):
        raise SpecError(f"psl2 parameter {p} is not prime")
    t = [(i + 1) % p for i in range(p)] + [p]
    s = [p] + [(p - pow(i, p - 2, p)) % p for i in range(1, p)] + [0]
    return Permutation._trusted(tuple(t)), Permutation._trusted(tuple(s))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def _parse_one_generator(token: str, degree: int) -> Permutation:
    token = token.strip()
    if not token:
        raise SpecError("empty generator in perm spec")
    covered = _CYCLE_RE.sub("", token).strip()
    if covered:
        raise SpecError(f"unparsed text {covered!r} in generator {token!r}")
    cycles = []
    for body in _CYCLE_RE.findall(token):
        body = body.strip()
        if not body:
            continue  # "()" is the identity cycle
        pts = [int(x) for x in re.split(r"[,\s]+", body)]
        if len(set(pts)) != len(pts):
            raise SpecError(f"repeated point in cycle ({body})")
        cycles.append(pts)
    return Permutation.from_cycles(degree, cycles)


def parse_group_spec(spec: str, *, degree_cap: int = MAX_DEGREE) -> PermGroup:
    """Parse a group spec into its natural permutation representation.

    Canonical generator forms:

    - ``cyc:m``  -- the m-cycle (0 1 ... m-1) on m points.
    - ``sym:m``  -- (0 1) and (0 1 ... m-1).
    - ``alt:m``  -- (0 1 2) and the m-cycle (m odd) or (1 2 ... m-1) (m even);
      for m <= 2 the trivial group on m points.
    - ``psl2:p`` -- x -> x+1 and x -> -1/x on the p+1 projective points (the
      point at infinity is the last point, index p).
    - ``perm:<degree>:<gen;gen;...>`` -- each generator a product of disjoint
      parenthesized 0-based cycles, e.g. ``perm:5:(0 1)(2 3);(0 4)``.

    Orders of the named families are attached from the classical formulas;
    closure reproduces them (tested), ``perm:`` groups carry no claimed order.
    """
    parts = spec.strip().split(":")
    if len(parts) < 2:
        raise SpecError(f"malformed group spec {spec!r}")
    kind = parts[0].strip().lower()

    if kind in ("cyc", "sym", "alt"):
        if len(parts) != 2:
            raise SpecError(f"malformed group spec {spec!r}")
        try:
            m = int(parts[1])
        except ValueError as exc:
            raise SpecError(f"bad size in {spec!r}") from exc
        if m < 1:
            raise SpecError(f"group size must be >= 1 in {spec!r}")
        if m > degree_cap:
            raise DegreeCapError(f"degree {m} exceeds cap {degree_cap}")
        full_cycle = tuple(range(1, m)) + (0,)
        if kind == "cyc":
            gens = [Permutation._trusted(full_cycle)] if m > 1 else [Permutation.identity(1)]
            return PermGroup(gens, order=m, name=f"cyc:{m}")
        if kind == "sym":
            if m == 1:
                gens = [Permutation.identity(1)]
            else:
                swap = Permutation.from_cycles(m, [(0, 1)])
                gens = [swap] if m == 2 else [swap, Permutation._trusted(full_cycle)]
            return PermGroup(gens, order=math.factorial(m), name=f"sym:{m}")
        # alt
        if m <= 2:
            return PermGroup([Permutation.identity(m)], order=1, name=f"alt:{m}")
        three = Permutation.from_cycles(m, [(0, 1, 2)])
        if m == 3:
            gens = [three]
        elif m % 2 == 1:
            gens = [three, Permutation._trusted(full_cycle)]
        else:
            gens = [three, Permutation.from_cycles(m, [tuple(range(1, m))])]
        return PermGroup(gens, order=math.factorial(m) // 2, name=f"alt:{m}")

    if kind == "psl2":
        if len(parts) != 2:
            raise SpecError(f"malformed group spec {spec!r}")
        try:
            p = int(parts[1])
        except ValueError as exc:
            raise SpecError(f"bad prime in {spec!r}") from exc
        if not _is_prime(p):
            raise SpecError(f"psl2 parameter {p} is not prime")
        if p + 1 > degree_cap:
            raise DegreeCapError(f"degree {p + 1} exceeds cap {degree_cap}")
        t, s = projective_line_generators(p)
        return PermGroup([t, s], order=psl2_order(p), name=f"psl2:{p}")

    if kind == "perm":
        if len(parts) < 3:
            raise SpecError(f"malformed perm spec {spec!r}")
        try:
            degree = int(parts[1])
        except ValueError as exc:
            raise SpecError(f"bad degree in {spec!r}") from exc
        if degree < 1:
            raise SpecError("perm degree must be positive")
        if degree > degree_cap:
            raise DegreeCapError(f"degree {degree} exceeds cap {degree_cap}")
        body = ":".join(parts[2:])
        gens = [_parse_one_generator(tok, degree) for tok in body.split(";")]
        return PermGroup(gens, name=f"perm:{degree}")

    raise SpecError(f"unknown group kind {kind!r} in {spec!r}")


def parse_sequence_spec(spec: str, *, degree_cap: int = MAX_DEGREE) -> list[PermGroup]:
    """Comma-separated group specs, e.g. ``cyc:2,cyc:3`` or ``psl2:13,psl2:17``."""
    tokens = [t for t in (tok.strip() for tok in spec.split(",")) if t]
    if not tokens:
        raise SpecError("empty sequence spec")
    return [parse_group_spec(tok, degree_cap=degree_cap) for tok in tokens]
