"""Cone contractions, Picard iteration and its a-priori error certificate.

A map ``T`` is a cone contraction for ``(k, alpha, beta)`` when

    rho(alpha (T x - T y))  ⪯  k rho(beta (x - y))

for all ``x, y``, with ``k`` in the cone, ``r(k) < 1`` and ``alpha > beta > 0``.
Picard iterates then satisfy the tail bound

    ||rho(beta (x_j - x_m))|| <= L ||k^m|| ||(e - k)^-1|| ||rho(beta alpha0 (x_1 - x_0))||

for ``j > m``, where ``beta/alpha + 1/alpha0 = 1`` and ``L`` is the cone's
normality constant.  :func:`picard_solve` stops on that bound or on the
observed step size, whichever fires first.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import Element, mul, neumann_inverse, norm, power, spectral_radius_estimate
from .cone import Cone, le_approx
from .modular import ModularFunctional
from .report import Report

log = logging.getLogger(__name__)

Map = Callable[[np.ndarray], np.ndarray]


class FixedPointError(RuntimeError):
    def __init__(self, message: str, trace: "PicardTrace | None" = None):
        super().__init__(message)
        self.trace = trace


class NonConvergenceError(FixedPointError):
    """``max_iter`` reached before either stopping rule fired."""


class DivergenceError(FixedPointError):
    """An iterate became NaN or infinite."""


@dataclass(frozen=True)
class ContractionSpec:
    k: Element
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.beta > 0 and self.alpha > self.beta):
            raise ValueError(f"need alpha > beta > 0, got alpha={self.alpha}, beta={self.beta}")

    def check(self, cone: Cone, n_max: int = 1000, tol: float = 1e-3) -> list[str]:
        """Problems with ``k``: cone membership and the spectral radius estimate."""
        problems = []
        if not cone.contains(self.k):
            problems.append(f"k={self.k.coords} is not in the cone")
        est = spectral_radius_estimate(self.k, n_max, tol)
        if est.estimate >= 1.0:
            problems.append(f"spectral radius estimate of k is {est.estimate:.6g} >= 1")
        return problems


def alpha0(spec: ContractionSpec) -> float:
    """Solve ``beta/alpha + 1/alpha0 = 1``."""
    if spec.alpha <= spec.beta:
        raise ValueError("alpha0 requires alpha > beta")
    return spec.alpha / (spec.alpha - spec.beta)


def apriori_bound(m: int, spec: ContractionSpec, seed: float, L: float = 1.0, inverse_norm: float | None = None) -> float:
    """``L ||k^m|| ||(e - k)^-1|| seed`` with ``seed = ||rho(beta alpha0 (x_1 - x_0))||``."""
    if seed == 0.0:
        return 0.0
    if inverse_norm is None:
        inverse_norm = norm(neumann_inverse(spec.k))
    return L * norm(power(spec.k, m)) * inverse_norm * seed


# ---------------------------------------------------------------------------
# certification

def pair_sampler(dim: int = 2, low: float = -50.0, high: float = 50.0):
    def draw(rng: np.random.Generator):
        return rng.uniform(low, high, size=dim), rng.uniform(low, high, size=dim)

    return draw


def certify_contraction(
    T: Map,
    spec: ContractionSpec,
    rho: ModularFunctional,
    cone: Cone | None = None,
    sampler=None,
    n: int = 10_000,
    rng=0,
) -> Report:
    """Check the contraction inequality on ``n`` sampled pairs.

    Besides violations the report stores, under ``extra["tightest"]``, the
    non-violating pair whose slack ``k rho(beta(x-y)) - rho(alpha(Tx-Ty))``
    has the smallest norm.
    """
    cone = cone or rho.cone
    sampler = sampler or pair_sampler(rho.dim)
    gen = np.random.default_rng(rng)
    rep = Report("contraction")
    for msg in spec.check(cone):
        rep.add("spec", msg, k=spec.k)
    tight = None
    for _ in range(n):
        x, y = sampler(gen)
        x, y = np.asarray(x, float), np.asarray(y, float)
        rep.checked += 1
        lhs = rho(spec.alpha * (T(x) - T(y)))
        rhs = mul(spec.k, rho(spec.beta * (x - y)))
        if not le_approx(lhs, rhs, cone):
            rep.add("contraction", "rho(a(Tx-Ty)) not <= k rho(b(x-y))", x=x, y=y, lhs=lhs, rhs=rhs)
            continue
        slack = rhs - lhs
        s = norm(slack)
        if tight is None or s < tight[0]:
            tight = (s, x, y, slack)
    if tight is not None:
        rep.extra["tightest"] = {"x": tight[1], "y": tight[2], "slack": tight[3], "slack_norm": tight[0]}
    return rep


# ---------------------------------------------------------------------------
# Picard iteration

@dataclass
class PicardTrace:
    """Iterates ``x_0..x_N`` with ``step_residuals[n] = ||rho(beta (x_{n+1} - x_n))||``.

    ``apriori_bounds[m]`` bounds ``||rho(beta (x_j - x_m))||`` for all ``j > m``.
    """

    iterates: list[np.ndarray]
    step_residuals: list[float] = field(default_factory=list)
    apriori_bounds: list[float] = field(default_factory=list)
    alpha0: float = math.nan
    seed: float = math.nan
    stop_rule: str = ""

    def to_csv(self, path) -> None:
        """Columns: ``n``, coordinates of ``x_n``, step residual, a-priori bound."""
        d = self.iterates[0].size
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", *[f"x{i + 1}" for i in range(d)], "step_residual", "apriori_bound"])
            for n, x in enumerate(self.iterates):
                r = repr(self.step_residuals[n]) if n < len(self.step_residuals) else ""
                b = repr(self.apriori_bounds[n]) if n < len(self.apriori_bounds) else ""
                w.writerow([n, *[repr(float(c)) for c in x], r, b])


@dataclass
class FixedPointResult:
    point: np.ndarray
    iterations: int
    residual: float
    trace: PicardTrace
    apriori_bounds: list[float]
    step_residual: float
    residual_limit: float


def picard_solve(
    T: Map,
    x0,
    spec: ContractionSpec,
    rho: ModularFunctional,
    cone: Cone | None = None,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> FixedPointResult:
    """Iterate ``x_{n+1} = T x_n`` until the tail is certified below ``tol``.

    The candidate ``x_n`` (``n >= 1``) is accepted once its step residual
    ``||rho(beta (x_{n+1} - x_n))||`` or the a-priori bound from index ``n``
    drops below ``tol``, provided the fixed-point residual
    ``||rho(alpha/2 (T x_n - x_n))||`` is at most ``tol * C`` with
    ``C = max(1, alpha / (2 beta))``: for a positively homogeneous modular
    that factor converts the beta-scaled step into the alpha/2-scaled one.
    """
    cone = cone or rho.cone
    L = cone.normal_constant
    a0 = alpha0(spec)
    inv_norm = norm(neumann_inverse(spec.k))
    C = max(1.0, spec.alpha / (2.0 * spec.beta))

    x = np.asarray(x0, dtype=float)
    _check_finite(x, None)
    trace = PicardTrace([x.copy()], alpha0=a0)
    x_next = np.asarray(T(x), dtype=float)
    _check_finite(x_next, trace)
    trace.seed = seed = rho.size(spec.beta * a0 * (x_next - x))
    trace.step_residuals.append(rho.size(spec.beta * (x_next - x)))
    k_pow = spec.k.algebra.unit
    trace.apriori_bounds.append(L * norm(k_pow) * inv_norm * seed)

    for n in range(1, max_iter + 1):
        x = x_next
        x_next = np.asarray(T(x), dtype=float)
        trace.iterates.append(x.copy())
        _check_finite(x_next, trace)
        step = rho.size(spec.beta * (x_next - x))
        k_pow = mul(spec.k, k_pow)
        bound = 0.0 if seed == 0.0 else L * norm(k_pow) * inv_norm * seed
        trace.step_residuals.append(step)
        trace.apriori_bounds.append(bound)
        if step < tol or bound < tol:
            fp_res = rho.size(0.5 * spec.alpha * (x_next - x))
            if fp_res <= tol * C:
                trace.stop_rule = "both" if step < tol and bound < tol else (
                    "step_residual" if step < tol else "apriori_bound"
                )
                log.debug("picard converged after %d iterations (%s)", n, trace.stop_rule)
                return FixedPointResult(x, n, fp_res, trace, trace.apriori_bounds, step, tol * C)
    raise NonConvergenceError(f"no convergence within {max_iter} iterations", trace)


def _check_finite(x: np.ndarray, trace: PicardTrace | None) -> None:
    if not np.all(np.isfinite(x)):
        steps = len(trace.iterates) if trace else 0
        raise DivergenceError(f"non-finite iterate {x} after {steps} steps", trace)


@dataclass
class UniquenessReport:
    points: list[np.ndarray]
    distances: dict[tuple[int, int], float]
    tol: float
    witness: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.witness is None

    def to_dict(self) -> dict:
        return {
            "pass": self.ok,
            "points": [p.tolist() for p in self.points],
            "max_distance": max(self.distances.values(), default=0.0),
            "witness": list(self.witness) if self.witness else None,
        }


def uniqueness_probe(
    T: Map,
    spec: ContractionSpec,
    rho: ModularFunctional,
    starts: Sequence,
    cone: Cone | None = None,
    tol: float = 1e-8,
    solve_tol: float = 1e-10,
    max_iter: int = 1000,
) -> UniquenessReport:
    """Solve from each start and compare the limits pairwise by ``||rho(beta (x_i - x_j))||``."""
    points = []
    for i, s in enumerate(starts):
        try:
            points.append(picard_solve(T, s, spec, rho, cone, solve_tol, max_iter).point)
        except FixedPointError as exc:
            raise type(exc)(f"start #{i} {list(np.asarray(s, float))}: {exc}", exc.trace) from exc
    dist = {}
    witness = None
    for i, j in itertools.combinations(range(len(points)), 2):
        d = rho.size(spec.beta * (points[i] - points[j]))
        dist[(i, j)] = d
        if d >= tol and (witness is None or d > dist[witness]):
            witness = (i, j)
    return UniquenessReport(points, dist, tol, witness)


# ---------------------------------------------------------------------------
# maps

def example_map(lam: float = 2.0) -> Map:
    """``T(b) = (log(4 + |b1|), arctan(3 + |b2|) + lam * b1)``."""

    def T(b):
        return np.array([math.log(4.0 + abs(b[0])), math.atan(3.0 + abs(b[1])) + lam * b[0]])

    return T


def identity_map() -> Map:
    return lambda b: np.array(b, dtype=float)


def constant_map(c=(0.0, 0.0)) -> Map:
    c = np.asarray(c, dtype=float)
    return lambda b: c.copy()


MAPS: dict[str, Callable[..., Map]] = {
    "example_t": lambda lam=2.0, **_: example_map(lam),
    "identity": lambda **_: identity_map(),
    "constant": lambda c=(0.0, 0.0), **_: constant_map(c),
}


def get_map(tag: str, **params) -> Map:
    try:
        factory = MAPS[tag]
    except KeyError:
        raise KeyError(f"unknown map {tag!r}; registered: {sorted(MAPS)}") from None
    return factory(**params)
