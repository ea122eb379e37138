"""Wreath products of permutation groups and the iterated product-action
towers, with tower-sized degrees tracked exactly or as certified values.

Conventions (fixed project-wide):

- Product action lives on functions Delta -> Omega, encoded as mixed-radix
  integers with coordinate 0 least significant.
- A top-group generator b moves coordinates by b-inverse:
  (w_delta) -> (w_{b^-1(delta)}), so composition of wreath elements matches
  permutation composition.
- New tower factors enter at the bottom: level k is S_k wr W_{k-1} in
  product action, with W_{k-1} acting as the top group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceededError, DegreeCapError, SpecError
from .perm import (
    DEFAULT_ORDER_CAP,
    MAX_DEGREE,
    PermGroup,
    Permutation,
    ensure_materialized,
)
from .towers import TowerInt, tower_mul, tower_pow

DEFAULT_DEGREE_CAP = MAX_DEGREE


@dataclass(frozen=True)
class PointCodec:
    """Bijection between abstract points and dense integers."""

    kind: str  # "product": tuples Delta->Omega; "imprimitive": pairs (w, d)
    bottom_degree: int
    top_degree: int

    def encode(self, coords) -> int:
        m = self.bottom_degree
        if self.kind == "product":
            pt = 0
            for delta in reversed(range(self.top_degree)):
                pt = pt * m + coords[delta]
            return pt
        omega, delta = coords
        return delta * m + omega

    def decode(self, point: int):
        m = self.bottom_degree
        if self.kind == "product":
            out = []
            for _ in range(self.top_degree):
                point, digit = divmod(point, m)
                out.append(digit)
            return tuple(out)
        delta, omega = divmod(point, m)
        return (omega, delta)


@dataclass
class WreathProduct:
    bottom: PermGroup  # A on Omega
    top: PermGroup  # B on Delta
    action_kind: str  # "product" | "imprimitive"
    group: PermGroup  # the wreath product acting on the encoded points
    codec: PointCodec

    @property
    def order_formula(self) -> int | None:
        """|A|^|Delta| * |B| (valid for both action kinds)."""
        if self.bottom.order is None or self.top.order is None:
            return None
        return self.bottom.order ** self.top.degree * self.top.order


def _known_order(g: PermGroup, order_cap: int) -> int:
    if g.order is not None:
        return g.order
    g.order = ensure_materialized(g, cap=order_cap).order
    return g.order


def product_action(
    A: PermGroup,
    B: PermGroup,
    *,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    order_cap: int = DEFAULT_ORDER_CAP,
) -> WreathProduct:
    """A wr B acting on Omega^Delta (degree |Omega|^|Delta|)."""
    m, d = A.degree, B.degree
    if m < 2 or d < 2:
        raise SpecError("product action needs non-trivial degrees on both sides")
    if m ** d > degree_cap:
        raise DegreeCapError(f"product-action degree {m}^{d} exceeds cap {degree_cap}")
    degree = m ** d
    pts = np.arange(degree, dtype=np.int64)
    gens: list[Permutation] = []
    # base: a generator of A applied in one coordinate, identity elsewhere
    for delta in range(d):
        radix = m ** delta
        digit = (pts // radix) % m
        for a in A.generators:
            arr = np.asarray(a.images, dtype=np.int64)
            imgs = pts + (arr[digit] - digit) * radix
            gens.append(Permutation._trusted(tuple(imgs.tolist())))
    # top: b permutes coordinates, new coordinate delta reads old b^-1(delta)
    for b in B.generators:
        acc = np.zeros(degree, dtype=np.int64)
        for delta in range(d):
            digit = (pts // m ** delta) % m
            acc += digit * m ** int(b.images[delta])
        gens.append(Permutation._trusted(tuple(acc.tolist())))

    order_a = _known_order(A, order_cap)
    order_b = _known_order(B, order_cap)
    group = PermGroup(
        gens,
        order=order_a ** d * order_b,
        name=f"({A.name or 'A'}) wrpa ({B.name or 'B'})",
    )
    return WreathProduct(A, B, "product", group, PointCodec("product", m, d))


def imprimitive_action(
    A: PermGroup,
    B: PermGroup,
    *,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    order_cap: int = DEFAULT_ORDER_CAP,
) -> WreathProduct:
    """A wr B acting on Omega x Delta (degree |Omega|*|Delta|); same abstract
    group as the product action, kept for cross-validation."""
    m, d = A.degree, B.degree
    if m * d > degree_cap:
        raise DegreeCapError(f"imprimitive degree {m}*{d} exceeds cap {degree_cap}")
    degree = m * d
    gens: list[Permutation] = []
    for delta in range(d):
        for a in A.generators:
            imgs = list(range(degree))
            for omega in range(m):
                imgs[delta * m + omega] = delta * m + a.images[omega]
            gens.append(Permutation._trusted(tuple(imgs)))
    for b in B.generators:
        imgs = [0] * degree
        for delta in range(d):
            for omega in range(m):
                imgs[delta * m + omega] = int(b.images[delta]) * m + omega
        gens.append(Permutation._trusted(tuple(imgs)))

    order_a = _known_order(A, order_cap)
    order_b = _known_order(B, order_cap)
    group = PermGroup(
        gens,
        order=order_a ** d * order_b,
        name=f"({A.name or 'A'}) wrimp ({B.name or 'B'})",
    )
    return WreathProduct(A, B, "imprimitive", group, PointCodec("imprimitive", m, d))


@dataclass
class IteratedWreath:
    """Finite truncations W_1, ..., W_n of the product-action tower.

    ``degrees[k]`` and ``orders[k]`` are TowerInt values of the point count
    and group order of level k (index 0 holds the conventions 1, 1); levels
    whose degree passes the cap exist only there, with ``levels[k] = None``.
    """

    sequence: list[PermGroup]
    levels: list[PermGroup | None]  # levels[k] for k = 0..n, levels[0] unused
    wreaths: list[WreathProduct | None]  # wreaths[k] for k >= 2
    degrees: list[TowerInt]
    orders: list[TowerInt]

    @property
    def depth(self) -> int:
        return len(self.sequence)


def iterated_wpa(
    seq: list[PermGroup],
    n: int | None = None,
    *,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    order_cap: int = DEFAULT_ORDER_CAP,
) -> IteratedWreath:
    """Build W_k = S_k wr W_{k-1} (product action) bottom-up for k <= n.

    Degrees and orders are always produced as TowerInt; the permutation
    groups themselves are materialized only while the degree fits the cap.
    """
    if n is None:
        n = len(seq)
    if n < 1 or n > len(seq):
        raise SpecError(f"level {n} out of range for sequence of length {len(seq)}")
    for g in seq[:n]:
        if g.degree < 2:
            raise SpecError("tower factors must have degree >= 2")

    degrees: list[TowerInt] = [TowerInt.exact(1)]
    orders: list[TowerInt] = [TowerInt.exact(1)]
    levels: list[PermGroup | None] = [None]
    wreaths: list[WreathProduct | None] = [None, None]

    for k in range(1, n + 1):
        s_k = seq[k - 1]
        order_sk = _known_order(s_k, order_cap)
        degrees.append(tower_pow(s_k.degree, degrees[k - 1]))
        orders.append(tower_mul(tower_pow(order_sk, degrees[k - 1]), orders[k - 1]))
        if k == 1:
            levels.append(s_k)
            continue
        prev = levels[k - 1]
        can_build = (
            prev is not None
            and degrees[k].is_exact
            and degrees[k].int_value <= degree_cap
        )
        if can_build:
            wp = product_action(s_k, prev, degree_cap=degree_cap, order_cap=order_cap)
            wreaths.append(wp)
            levels.append(wp.group)
        else:
            wreaths.append(None)
            levels.append(None)
    return IteratedWreath(list(seq[:n]), levels, wreaths, degrees, orders)


def top_component(wp: WreathProduct, perm: Permutation) -> Permutation:
    """Recover the coordinate permutation of a product-action element.

    Flipping input coordinate delta changes exactly one output coordinate,
    namely b(delta); this recovers b because the per-coordinate maps are
    bijections.
    """
    if wp.action_kind != "product":
        raise SpecError("top_component needs a product-action wreath")
    m, d = wp.codec.bottom_degree, wp.codec.top_degree
    base_img = wp.codec.decode(perm(0))
    images = [None] * d
    for delta in range(d):
        probe_img = wp.codec.decode(perm(m ** delta))
        changed = [j for j in range(d) if probe_img[j] != base_img[j]]
        if len(changed) != 1:
            raise SpecError("element is not a product-action wreath element")
        images[delta] = changed[0]
    return Permutation(images)


@dataclass(frozen=True)
class ProjectionReport:
    level: int
    group_order: int
    image_order: int
    kernel_order: int
    expected_kernel_order: int
    is_homomorphism: bool
    image_equals_previous_level: bool
    kernel_is_coordinatewise: bool
    orders_multiply: bool

    @property
    def ok(self) -> bool:
        return (
            self.is_homomorphism
            and self.image_equals_previous_level
            and self.kernel_order == self.expected_kernel_order
            and self.kernel_is_coordinatewise
            and self.orders_multiply
        )


def project(
    itw: IteratedWreath, k: int, *, order_cap: int = DEFAULT_ORDER_CAP
) -> ProjectionReport:
    """Verify that forgetting base coordinates is a surjection W_k ->> W_{k-1}
    with the base subgroup S_k^{|level-(k-1) degree|} as kernel."""
    if k < 2 or k > itw.depth:
        raise SpecError(f"projection level {k} out of range")
    wp = itw.wreaths[k]
    if wp is None or itw.levels[k - 1] is None:
        raise CapExceededError(f"level {k} is symbolic; projection needs points")
    w_k = ensure_materialized(wp.group, cap=order_cap)
    prev = ensure_materialized(itw.levels[k - 1], cap=order_cap)
    bottom = ensure_materialized(wp.bottom, cap=order_cap)

    tops = {e: top_component(wp, e) for e in w_k.elements}
    hom_ok = all(
        tops[e * g] == tops[e] * tops[g] for e in w_k.elements for g in w_k.generators
    )
    image = set(tops.values())
    image_ok = image == set(prev.elements)

    ident = Permutation.identity(wp.top.degree)
    kernel = [e for e in w_k.elements if tops[e] == ident]
    m, d = wp.codec.bottom_degree, wp.codec.top_degree
    bottom_set = set(bottom.elements)
    coordwise = True
    for e in kernel:
        # e must act as (w_delta) -> (f_delta(w_delta)) with every f in S_k
        factors = []
        for delta in range(d):
            f = [wp.codec.decode(e(omega * m ** delta))[delta] for omega in range(m)]
            factors.append(Permutation(f))
        if any(f not in bottom_set for f in factors):
            coordwise = False
            break
        for pt in range(w_k.degree):
            coords = wp.codec.decode(pt)
            expect = tuple(factors[j](coords[j]) for j in range(d))
            if wp.codec.decode(e(pt)) != expect:
                coordwise = False
                break
        if not coordwise:
            break

    expected_kernel = bottom.order ** d
    return ProjectionReport(
        level=k,
        group_order=w_k.order,
        image_order=len(image),
        kernel_order=len(kernel),
        expected_kernel_order=expected_kernel,
        is_homomorphism=hom_ok,
        image_equals_previous_level=image_ok,
        kernel_is_coordinatewise=coordwise,
        orders_multiply=len(kernel) * len(image) == w_k.order,
    )


def base_subgroup_elements(itw: IteratedWreath, k: int,
                           *, order_cap: int = DEFAULT_ORDER_CAP) -> set[Permutation]:
    """Elements of the base subgroup S_k^{degree of level k-1} inside W_k."""
    if k < 2:
        raise SpecError("base subgroup lives at levels >= 2")
    wp = itw.wreaths[k]
    if wp is None:
        raise CapExceededError(f"level {k} is symbolic")
    w_k = ensure_materialized(wp.group, cap=order_cap)
    ident = Permutation.identity(wp.top.degree)
    return {e for e in w_k.elements if top_component(wp, e) == ident}
