"""Reduce cone-valued modulars to real-valued ones.

Two reductions are provided: the nonlinear scalarization
``xi_c(b) = inf{t : b ⪯ t c}`` for ``c`` in the cone interior, and the norm
reduction ``F(x) = ||rho(x)||``.

For the norm reduction in a commutative algebra, a cone contraction with
constant ``k`` yields ``F(alpha(Tx - Ty)) <= L ||k|| F(beta(x - y))`` by
normality and submultiplicativity; the scalar constant is ``L ||k||``.  The
two-sided form ``a* rho a`` of C*-algebra valued modulars, where the scalar
constant becomes ``||a||**2``, is not modelled here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .algebra import Element, norm
from .cone import Cone, le, ll
from .modular import ModularFunctional

ScalarFunctional = Callable[[np.ndarray], float]


class UnboundedScalarizationError(ValueError):
    pass


@dataclass(frozen=True)
class ScalarizationParams:
    c: Element
    cone: Cone

    def __post_init__(self):
        if not ll(self.cone.algebra.zero, self.c, self.cone):
            raise ValueError(f"c={self.c.coords} is not in the interior of the {self.cone.tag} cone")


def xi_c_closed_form(b: Element, params: ScalarizationParams) -> float:
    """``max_i b_i / c_i``, valid for the quadrant cone only."""
    return max(bi / ci for bi, ci in zip(b.coords, params.c.coords))


def xi_c_bisect(b: Element, params: ScalarizationParams, tol: float = 1e-12, max_doublings: int = 1100) -> float:
    """``inf{t : b ⪯ t c}`` by bisection; the set of admissible ``t`` is an upper ray."""
    c, cone = params.c, params.cone

    def ok(t: float) -> bool:
        return le(b, c.scale(t), cone)

    hi = 1.0
    for _ in range(max_doublings):
        if ok(hi):
            break
        hi *= 2.0
    else:
        raise UnboundedScalarizationError(f"no upper bracket for xi_c at b={b.coords}")
    step = 1.0
    lo = hi - step
    for _ in range(max_doublings):
        if not ok(lo):
            break
        hi, step = lo, 2.0 * step
        lo = hi - step
    else:
        raise UnboundedScalarizationError(f"xi_c unbounded below at b={b.coords}")
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def xi_c(b: Element, params: ScalarizationParams, tol: float = 1e-12, method: str = "auto") -> float:
    """Nonlinear scalarization of ``b`` along ``c``.

    ``method="auto"`` uses the closed form on the quadrant cone and bisection
    elsewhere.
    """
    if method == "closed" or (method == "auto" and params.cone.tag == "quadrant"):
        return xi_c_closed_form(b, params)
    if method in ("auto", "bisect"):
        return xi_c_bisect(b, params, tol)
    raise ValueError(f"unknown method {method!r}")


def scalar_modular(rho: ModularFunctional, params: ScalarizationParams, method: str = "auto") -> ScalarFunctional:
    """``rho* = xi_c o rho``; for the abs-pair modular this is ``max |a_i| / c_i``."""

    def rho_star(x) -> float:
        return xi_c(rho(x), params, method=method)

    return rho_star


def norm_modular(rho: ModularFunctional) -> ScalarFunctional:
    """``F(x) = ||rho(x)||``, a real-valued modular whenever rho is a cone modular on a normal cone."""

    def F(x) -> float:
        return norm(rho(x))

    return F


def scalar_contraction_constant(k: Element, L: float = 1.0) -> float:
    """Scalar constant ``L ||k||`` carried by ``F`` from a cone contraction with constant ``k``."""
    return L * norm(k)


@dataclass
class Witness:
    a: np.ndarray
    b: np.ndarray
    image_value: float
    source_value: float

    def to_dict(self) -> dict:
        return {
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "rho_star_Ta_minus_Tb": self.image_value,
            "rho_star_a_minus_b": self.source_value,
        }


DEFAULT_PAIR = (np.array([1.0, 0.0]), np.array([0.0, 0.0]))


def non_contraction_witness(
    T: Callable[[np.ndarray], np.ndarray],
    rho_star: ScalarFunctional,
    candidate_pairs: Iterable = (),
) -> Witness | None:
    """First pair with ``rho*(Ta - Tb) > rho*(a - b)``, trying ``a=(1,0), b=(0,0)`` first.

    Such a pair shows ``T`` is not even nonexpansive for ``rho*``.  Returns
    ``None`` when no candidate qualifies.
    """
    for a, b in _with_default_pair(candidate_pairs):
        a, b = np.asarray(a, float), np.asarray(b, float)
        img = rho_star(np.asarray(T(a), float) - np.asarray(T(b), float))
        src = rho_star(a - b)
        if img > src and math.isfinite(img):
            return Witness(a, b, float(img), float(src))
    return None


def _with_default_pair(pairs):
    yield DEFAULT_PAIR
    yield from pairs
