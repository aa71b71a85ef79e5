"""Cone-valued modular functionals on R^d and their sampled properties.

Vectors of the underlying space are 1-d numpy arrays.  A
:class:`ModularFunctional` maps them into an algebra ordered by a cone.
Everything about limits is decided on finite schedules or traces, so every
verdict holds only at recorded resolution.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import DUAL_PAIR, Algebra, Element, norm
from .cone import Cone, le, le_approx, quadrant_cone
from .report import Report

DEFAULT_EPS = 1e-6

VectorSampler = Callable[[np.random.Generator], np.ndarray]


class UnboundedModularError(ValueError):
    """No bracket for the F-norm bisection was found."""


@dataclass(frozen=True, eq=False)
class ModularFunctional:
    """``rho: R^dim -> algebra``; the evaluator must be side-effect free."""

    tag: str
    evaluate: Callable[[np.ndarray], Element] = field(repr=False)
    cone: Cone = field(repr=False)
    dim: int = 2
    convex: bool = False

    @property
    def algebra(self) -> Algebra:
        return self.cone.algebra

    def __call__(self, x) -> Element:
        return self.evaluate(np.asarray(x, dtype=float))

    def size(self, x) -> float:
        """``||rho(x)||`` in the algebra norm."""
        e = self.evaluate(x)
        return e.algebra.norm_fn(e.coords)


def abs_pair(cone: Cone | None = None) -> ModularFunctional:
    """``rho(b1, b2) = (|b1|, |b2|)`` in the dual-pair algebra."""
    cone = cone or quadrant_cone(DUAL_PAIR)
    A = cone.algebra

    def rho(x) -> Element:
        return Element((abs(float(x[0])), abs(float(x[1]))), A)

    return ModularFunctional("abs_pair", rho, cone, 2, convex=True)


def jump_modular(cone: Cone | None = None, radius: float = 1.0) -> ModularFunctional:
    """``theta`` inside the l1 ball of ``radius``, unit outside; breaks cmf1 and Delta2."""
    cone = cone or quadrant_cone(DUAL_PAIR)
    A = cone.algebra
    return ModularFunctional(
        "jump", lambda x: A.zero if np.abs(x).sum() <= radius else A.unit, cone, 2
    )


def discrete_modular(cone: Cone | None = None) -> ModularFunctional:
    """``theta`` at the origin and unit elsewhere."""
    cone = cone or quadrant_cone(DUAL_PAIR)
    A = cone.algebra
    return ModularFunctional("discrete", lambda x: A.zero if not np.any(x) else A.unit, cone, 2)


MODULARS: dict[str, Callable[..., ModularFunctional]] = {
    "abs_pair": abs_pair,
    "jump": jump_modular,
    "discrete": discrete_modular,
}


def get_modular(tag: str, cone: Cone | None = None) -> ModularFunctional:
    try:
        return MODULARS[tag](cone)
    except KeyError:
        raise KeyError(f"unknown modular {tag!r}; registered: {sorted(MODULARS)}") from None


# ---------------------------------------------------------------------------
# samplers

def vector_sampler(dim: int = 2, scale: float = 10.0, p_axis: float = 0.15) -> VectorSampler:
    """Vectors over several magnitudes, occasionally zero in some coordinates."""

    def draw(rng: np.random.Generator) -> np.ndarray:
        x = rng.uniform(-scale, scale, size=dim) * 10.0 ** rng.uniform(-3, 0)
        if rng.random() < p_axis:
            x[rng.random(dim) < 0.5] = 0.0
        return x

    return draw


# ---------------------------------------------------------------------------
# axiom checks

def check_axioms(rho: ModularFunctional, sampler: VectorSampler | None = None, n: int = 10_000, rng=0) -> Report:
    """Sample cmf1-cmf3, plus the convexity clause when ``rho.convex``."""
    sampler = sampler or vector_sampler(rho.dim)
    gen = np.random.default_rng(rng)
    cone, A = rho.cone, rho.algebra
    zero_v = np.zeros(rho.dim)
    rep = Report(f"modular_axioms[{rho.tag}]")

    if not rho(zero_v).is_zero():
        rep.add("cmf1_zero", "rho(0) != theta", u=zero_v, rho_u=rho(zero_v))
    for _ in range(n):
        u, v = sampler(gen), sampler(gen)
        a = float(gen.random())
        b = 1.0 - a
        rep.checked += 1
        ru, rv = rho(u), rho(v)
        if not le(A.zero, ru, cone):
            rep.add("cmf1_positive", "rho(u) not in P", u=u, rho_u=ru)
        if np.any(u) and ru.is_zero():
            rep.add("cmf1_definite", "rho(u) = theta for u != 0", u=u)
        r_neg = rho(-u)
        if r_neg != ru and norm(r_neg - ru) > 1e-12 * (1 + norm(ru)):
            rep.add("cmf2_symmetry", "rho(-u) != rho(u)", u=u, rho_u=ru, rho_minus_u=r_neg)
        combo = rho(a * u + b * v)
        if not le_approx(combo, ru + rv, cone):
            rep.add("cmf3", "rho(a u + b v) not <= rho(u) + rho(v)", u=u, v=v, a=a)
        if rho.convex and not le_approx(combo, ru.scale(a) + rv.scale(b), cone):
            rep.add("convexity", "rho(a u + b v) not <= a rho(u) + b rho(v)", u=u, v=v, a=a)
    return rep


def check_monotonicity(rho: ModularFunctional, sampler: VectorSampler | None = None, n: int = 10_000, rng=0) -> Report:
    """``rho(a x) ⪯ rho(b x)`` for ``0 < a < b``; for convex rho also ``rho(a x) ⪯ a rho(x)``, ``0 <= a <= 1``."""
    sampler = sampler or vector_sampler(rho.dim)
    gen = np.random.default_rng(rng)
    rep = Report(f"monotonicity[{rho.tag}]")
    for _ in range(n):
        x = sampler(gen)
        a, b = np.sort(gen.exponential(size=2))
        if a == b:
            continue
        rep.checked += 1
        if not le_approx(rho(a * x), rho(b * x), rho.cone):
            rep.add("remark_monotone", "rho(a x) not <= rho(b x)", x=x, a=a, b=b)
        if rho.convex:
            t = float(gen.random())
            if not le_approx(rho(t * x), rho(x).scale(t), rho.cone):
                rep.add("remark_convex", "rho(t x) not <= t rho(x)", x=x, t=t)
    return rep


def check_scalar_modular(
    F: Callable[[np.ndarray], float],
    sampler: VectorSampler | None = None,
    n: int = 10_000,
    rng=0,
    dim: int = 2,
    name: str = "scalar_modular",
) -> Report:
    """Sample the real-valued modular axioms m1-m3 for ``F: R^dim -> [0, inf]``."""
    sampler = sampler or vector_sampler(dim)
    gen = np.random.default_rng(rng)
    rep = Report(name)
    if F(np.zeros(dim)) != 0.0:
        rep.add("m1_zero", "F(0) != 0", value=F(np.zeros(dim)))
    for _ in range(n):
        u, v = sampler(gen), sampler(gen)
        a = float(gen.random())
        rep.checked += 1
        fu, fv = F(u), F(v)
        if fu < 0.0 or (np.any(u) and fu == 0.0):
            rep.add("m1", "F(u) <= 0 for u != 0" if fu >= 0 else "F(u) < 0", u=u, value=fu)
        if not math.isclose(F(-u), fu, rel_tol=1e-12, abs_tol=1e-300):
            rep.add("m2", "F(-u) != F(u)", u=u)
        lhs = F(a * u + (1 - a) * v)
        if lhs > (fu + fv) * (1 + 1e-12) + 1e-300:
            rep.add("m3", "F(a u + (1-a) v) > F(u) + F(v)", u=u, v=v, a=a, lhs=lhs, rhs=fu + fv)
    return rep


# ---------------------------------------------------------------------------
# modular subspace and F-norm

def in_modular_subspace(
    rho: ModularFunctional,
    x,
    schedule: Sequence[float] | None = None,
    tol_limit: float = 1e-9,
) -> tuple[bool, list[float]]:
    """Test ``rho(lambda x) -> theta`` along a decreasing schedule.

    Returns ``(member, sizes)`` where ``sizes[j] = ||rho(schedule[j] x)||``.
    Membership means every size from some index to the end of the schedule
    is below ``tol_limit``.  Default schedule: ``2**-j`` for ``j < 64``.
    """
    if schedule is None:
        schedule = [2.0**-j for j in range(64)]
    sched = [float(s) for s in schedule]
    if not sched or any(s <= 0 for s in sched) or any(b >= a for a, b in zip(sched, sched[1:])):
        raise ValueError("schedule must be a nonempty strictly decreasing sequence of positive reals")
    x = np.asarray(x, dtype=float)
    sizes = [rho.size(s * x) for s in sched]
    return sizes[-1] < tol_limit, sizes


def _fnorm_holds(rho: ModularFunctional, x: np.ndarray, delta: float) -> bool:
    return rho.size(x / delta) <= delta


def f_norm(rho: ModularFunctional, x, tol: float = 1e-12, max_doublings: int = 64) -> float:
    """``inf{delta > 0 : ||rho(x / delta)|| <= delta}`` by bracketing then bisection.

    The defining set is an upper ray (modular monotonicity), so bisection on
    its indicator is valid.  The returned value always satisfies the defining
    inequality.
    """
    x = np.asarray(x, dtype=float)
    hi = 1.0
    if _fnorm_holds(rho, x, hi):
        lo = hi / 2
        while _fnorm_holds(rho, x, lo):
            hi, lo = lo, lo / 2
            if lo < 1e-300:
                return 0.0
    else:
        for _ in range(max_doublings):
            hi *= 2.0
            if _fnorm_holds(rho, x, hi):
                break
        else:
            raise UnboundedModularError(f"no F-norm bracket below {hi} for x={x}")
        lo = hi / 2
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _fnorm_holds(rho, x, mid):
            hi = mid
        else:
            lo = mid
    return hi


def check_f_norm_properties(
    rho: ModularFunctional,
    sampler: VectorSampler | None = None,
    n: int = 10_000,
    rng=0,
    tol: float = 1e-10,
) -> Report:
    """Sample F-norm properties i-iii and the ``||rho(x)|| <= ||x||_F`` bridge."""
    sampler = sampler or vector_sampler(rho.dim)
    gen = np.random.default_rng(rng)
    rep = Report(f"f_norm[{rho.tag}]")
    zero = np.zeros(rho.dim)
    if f_norm(rho, zero, tol) != 0.0:
        rep.add("fnorm_i_zero", "||0||_F != 0")
    for _ in range(n):
        x, y = sampler(gen), sampler(gen)
        rep.checked += 1
        fx, fy = f_norm(rho, x, tol), f_norm(rho, y, tol)
        if np.any(x) and fx <= 0.0:
            rep.add("fnorm_i", "||x||_F = 0 for x != 0", x=x)
        fxy = f_norm(rho, x + y, tol)
        slack = 4 * tol * max(1.0, fx + fy)
        if fxy > fx + fy + slack:
            rep.add("fnorm_ii", "||x+y||_F > ||x||_F + ||y||_F", x=x, y=y, lhs=fxy, rhs=fx + fy)
        fm = f_norm(rho, -x, tol)
        if abs(fm - fx) > 2 * tol * max(1.0, fx):
            rep.add("fnorm_iii", "||-x||_F != ||x||_F", x=x, a=fx, b=fm)
        if fx < 1.0 and rho.size(x) > fx * (1 + 1e-12):
            rep.add("fnorm_bridge", "||rho(x)|| > ||x||_F with ||x||_F < 1", x=x)
    return rep


# ---------------------------------------------------------------------------
# sequences

@dataclass
class SequenceTrace:
    """Recorded sequence ``x_0, x_1, ...`` with an optional candidate limit and scale ``mu``."""

    points: list[np.ndarray]
    limit: np.ndarray | None = None
    mu: float = 1.0

    def __post_init__(self):
        if not len(self.points):
            raise ValueError("trace must be nonempty")
        self.points = [np.asarray(p, dtype=float) for p in self.points]
        dims = {p.shape for p in self.points}
        if len(dims) != 1:
            raise ValueError(f"trace mixes vector shapes {dims}")
        if self.limit is not None:
            self.limit = np.asarray(self.limit, dtype=float)
        if self.mu <= 0:
            raise ValueError("mu must be positive")

    def distances(self, rho: ModularFunctional) -> list[float]:
        """``||rho(mu (x_n - x))||`` for each recorded ``n``."""
        if self.limit is None:
            raise ValueError("trace has no candidate limit")
        return [rho.size(self.mu * (p - self.limit)) for p in self.points]

    def to_csv(self, path, rho: ModularFunctional) -> None:
        dist = self.distances(rho)
        d = self.points[0].size
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", *[f"x{i + 1}" for i in range(d)], "rho_dist"])
            for n, (p, r) in enumerate(zip(self.points, dist)):
                w.writerow([n, *[repr(float(c)) for c in p], repr(r)])


def rho_convergence_index(rho: ModularFunctional, trace: SequenceTrace, eps: float = DEFAULT_EPS) -> int | None:
    """Smallest ``N`` with ``||rho(mu (x_n - x))|| < eps`` for every recorded ``n >= N``."""
    if trace.limit is None:
        raise ValueError("rho-convergence needs a candidate limit")
    dist = trace.distances(rho)
    N = len(dist)
    while N > 0 and dist[N - 1] < eps:
        N -= 1
    return N if N < len(dist) else None


def is_rho_convergent(rho: ModularFunctional, trace: SequenceTrace, eps: float = DEFAULT_EPS) -> bool:
    """True when the recorded tail is consistent with rho-convergence to ``trace.limit``."""
    return rho_convergence_index(rho, trace, eps) is not None


def rho_cauchy_index(rho: ModularFunctional, trace: SequenceTrace, eps: float = DEFAULT_EPS) -> int | None:
    """Smallest ``N`` whose recorded tail is pairwise within ``eps``; the tail must hold two points."""
    pts, mu = trace.points, trace.mu
    if len(pts) == 1:
        return 0
    if rho.size(mu * (pts[-1] - pts[-2])) >= eps:
        return None
    N = len(pts) - 2
    while N > 0 and all(rho.size(mu * (pts[N - 1] - q)) < eps for q in pts[N:]):
        N -= 1
    return N


def is_rho_cauchy(rho: ModularFunctional, trace: SequenceTrace, eps: float = DEFAULT_EPS) -> bool:
    """True when the recorded tail is consistent with a rho-Cauchy sequence."""
    return rho_cauchy_index(rho, trace, eps) is not None


def check_delta2(
    rho: ModularFunctional,
    traces: Sequence[SequenceTrace],
    eps: float = DEFAULT_EPS,
    form: str = "classical",
) -> Report:
    """Look for recorded terms where ``rho(x_n)`` is small but ``rho(2 x_n)`` is not.

    ``form="literal"`` uses the same threshold on both sides
    (``||rho(2 x_n)|| < eps`` whenever ``||rho(x_n)|| < eps``).
    ``form="classical"`` is the epsilon-delta reading of
    ``rho(x_n) -> theta  implies  rho(2 x_n) -> theta`` with input threshold
    ``eps / 2``.
    """
    if form not in ("classical", "literal"):
        raise ValueError(f"unknown Delta2 form {form!r}")
    eps_in = eps if form == "literal" else eps / 2
    rep = Report(f"delta2[{rho.tag},{form}]")
    for t_idx, trace in enumerate(traces):
        for n, x in enumerate(trace.points):
            rep.checked += 1
            s1 = rho.size(x)
            if s1 < eps_in:
                s2 = rho.size(2.0 * x)
                if s2 >= eps:
                    rep.add("delta2", f"||rho(x_n)||={s1} < {eps_in} but ||rho(2x_n)||={s2}", trace=t_idx, n=n, x=x)
    return rep
