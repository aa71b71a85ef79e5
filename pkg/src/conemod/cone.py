"""Solid cones in an algebra and the partial order they induce."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .algebra import DUAL_PAIR, Algebra, Element, mul, norm
from .report import Report

EPS_CONE = 1e-12

Sampler = Callable[[np.random.Generator], object]


@dataclass(frozen=True, eq=False)
class Cone:
    """Membership and interior predicates plus a claimed normality constant.

    Predicates receive an :class:`Element` of ``algebra``.
    """

    tag: str
    algebra: Algebra
    contains: Callable[[Element], bool] = field(repr=False)
    interior: Callable[[Element], bool] = field(repr=False)
    normal_constant: float = 1.0
    order_unit: Element | None = field(default=None, repr=False)

    def __post_init__(self):
        # interior element used to absorb rounding in sampled order checks
        if self.order_unit is None:
            object.__setattr__(self, "order_unit", self.algebra((1.0,) * self.algebra.dim))


def quadrant_cone(algebra: Algebra = DUAL_PAIR, eps: float = EPS_CONE) -> Cone:
    """Nonnegative orthant; interior is the open orthant."""
    return Cone(
        "quadrant",
        algebra,
        lambda x: all(c >= -eps for c in x.coords),
        lambda x: all(c > 0.0 for c in x.coords),
        1.0,
    )


def half_plane_cone(algebra: Algebra = DUAL_PAIR, eps: float = EPS_CONE) -> Cone:
    """``{b : b1 >= 0}``; deliberately not pointed."""
    return Cone("half_plane", algebra, lambda x: x.coords[0] >= -eps, lambda x: x.coords[0] > 0.0, 1.0)


def whole_space_cone(algebra: Algebra = DUAL_PAIR) -> Cone:
    return Cone("whole_plane", algebra, lambda x: True, lambda x: True, 1.0)


CONES: dict[str, Callable[[], Cone]] = {
    "quadrant": quadrant_cone,
    "half_plane": half_plane_cone,
    "whole_plane": whole_space_cone,
}


def get_cone(tag: str) -> Cone:
    try:
        return CONES[tag]()
    except KeyError:
        raise KeyError(f"unknown cone {tag!r}; registered: {sorted(CONES)}") from None


def le(x: Element, y: Element, cone: Cone) -> bool:
    """``x ⪯ y`` iff ``y - x`` lies in the cone."""
    return bool(cone.contains(y - x))


def ll(x: Element, y: Element, cone: Cone) -> bool:
    """``x ≪ y`` iff ``y - x`` lies in the interior."""
    return bool(cone.interior(y - x))


def le_approx(x: Element, y: Element, cone: Cone, rtol: float = 1e-12) -> bool:
    """``x ⪯ y`` up to rounding proportional to the magnitudes involved."""
    if le(x, y, cone):
        return True
    pad = rtol * (1.0 + norm(x) + norm(y))
    return le(x, y + cone.order_unit.scale(pad), cone)


# ---------------------------------------------------------------------------
# samplers

def element_sampler(algebra: Algebra, scale: float = 10.0, p_axis: float = 0.25) -> Sampler:
    """Random elements with some mass on coordinate axes and at the origin.

    Boundary points matter for cone checks: a non-pointed cone is only caught
    by elements whose coordinates vanish exactly.
    """

    def draw(rng: np.random.Generator) -> Element:
        c = rng.uniform(-scale, scale, size=algebra.dim) * 10.0 ** rng.uniform(-3, 0)
        if rng.random() < p_axis:
            c[rng.random(algebra.dim) < 0.5] = 0.0
        return algebra(c)

    return draw


def ordered_pair_sampler(base: Sampler) -> Sampler:
    """Draw ``(x, x + d)`` with ``x, d`` from ``base``; callers reject unordered pairs."""

    def draw(rng: np.random.Generator):
        x = base(rng)
        d = base(rng)
        if rng.random() < 0.05:
            d = d.algebra.zero
        return x, x + d

    return draw


def _draws(sampler: Sampler, n: int, rng) -> Iterator:
    rng = np.random.default_rng(rng)
    for _ in range(n):
        yield sampler(rng)


# ---------------------------------------------------------------------------
# checks

def verify_cone_axioms(cone: Cone, sampler: Sampler | None = None, n: int = 10_000, rng=0) -> Report:
    """Sample the four cone axioms.

    1. unit and zero in P; 2. nonnegative combinations stay in P;
    3. products stay in P; 4. P ∩ (-P) = {0}.
    """
    A = cone.algebra
    sampler = sampler or element_sampler(A)
    rep = Report(f"cone_axioms[{cone.tag}]")
    if not cone.contains(A.unit):
        rep.add("item1_unit", "unit not in P", element=A.unit)
    if not cone.contains(A.zero):
        rep.add("item1_zero", "zero not in P", element=A.zero)
    if cone.interior(A.zero):
        rep.add("solid_interior", "zero lies in the interior", element=A.zero)

    gen = np.random.default_rng(rng)
    in_p: list[Element] = []
    for x in _draws(sampler, n, gen):
        rep.checked += 1
        if not cone.contains(x):
            continue
        if not x.is_zero() and cone.contains(-x):
            rep.add("item4_pointed", "x and -x both in P", x=x, minus_x=-x)
        if in_p:
            y = in_p[int(gen.integers(len(in_p)))]
            a, b = gen.exponential(size=2)
            s = x.scale(a) + y.scale(b)
            if not cone.contains(s):
                rep.add("item2_combination", "a*x + b*y left P", x=x, y=y, a=a, b=b)
            p = mul(x, y)
            if not cone.contains(p):
                rep.add("item3_product", "x*y left P", x=x, y=y, product=p)
        if len(in_p) < 512:
            in_p.append(x)
    if rep.checked and not in_p:
        rep.notes.append("sampler produced no cone members; items 2-4 unchecked")
    return rep


@dataclass
class NormalityEstimate:
    """Largest observed ``||x|| / ||y||`` over sampled ``0 ⪯ x ⪯ y``.

    ``estimate`` is ``None`` when no valid pair was drawn (inconclusive).
    It is a lower bound on the smallest admissible constant.
    """

    estimate: float | None
    accepted: int
    drawn: int
    witness: tuple | None = None
    declared: float | None = None

    @property
    def conclusive(self) -> bool:
        return self.estimate is not None

    @property
    def within_declared(self) -> bool:
        return self.estimate is None or self.declared is None or self.estimate <= self.declared + 1e-12

    def __float__(self):
        if self.estimate is None:
            raise ValueError("normality estimate is inconclusive")
        return self.estimate


def normality_estimate(cone: Cone, sampler: Sampler | None = None, n: int = 10_000, rng=0) -> NormalityEstimate:
    sampler = sampler or ordered_pair_sampler(element_sampler(cone.algebra))
    zero = cone.algebra.zero
    best, witness, accepted = None, None, 0
    for x, y in _draws(sampler, n, rng):
        if not (le(zero, x, cone) and le(x, y, cone)):
            continue
        ny = norm(y)
        if ny == 0.0:
            continue
        accepted += 1
        r = norm(x) / ny
        if best is None or r > best:
            best, witness = r, (x, y)
    return NormalityEstimate(best, accepted, n, witness, cone.normal_constant)


def normality_report(est: NormalityEstimate, name: str = "normality") -> Report:
    rep = Report(name, est.accepted)
    if not est.conclusive:
        rep.notes.append(f"inconclusive: no ordered pair in {est.drawn} draws")
    elif not est.within_declared:
        x, y = est.witness
        rep.add("normality", f"ratio {est.estimate} exceeds L={est.declared}", x=x, y=y)
    rep.extra["estimate"] = est.estimate
    rep.extra["declared_L"] = est.declared
    return rep
