"""Unital Banach algebras of small dimension.

Elements are immutable coordinate tuples bound to an :class:`Algebra`.  Two
instances ship with the library: ``scalar`` (the real line) and ``dual_pair``
(pairs with ``(b1, b2)(a1, a2) = (b1 a1, b1 a2 + b2 a1)`` and the l1 norm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Coords = tuple[float, ...]


class AlgebraError(Exception):
    """Base class for algebra failures."""


class AlgebraMismatchError(AlgebraError, TypeError):
    """Operands belong to different algebra instances."""


class AlgebraAxiomError(AlgebraError, ValueError):
    """A registered instance failed a sampled axiom check."""


class NoConvergenceError(AlgebraError):
    """Powers of the element do not decay; the Neumann series diverges."""


class TruncationError(AlgebraError):
    """The Neumann series had not converged after ``n_max`` terms."""

    def __init__(self, message: str, partial: "Element", residual: float):
        super().__init__(message)
        self.partial = partial
        self.residual = residual


@dataclass(frozen=True, eq=False)
class Algebra:
    """Descriptor of a finite-dimensional unital Banach algebra.

    ``product`` and ``norm_fn`` act on raw coordinate tuples.  Identity
    comparison is used for instance matching, so build each algebra once.
    """

    tag: str
    dim: int
    product: Callable[[Coords, Coords], Coords] = field(repr=False)
    norm_fn: Callable[[Coords], float] = field(repr=False)
    unit_coords: Coords

    def __post_init__(self):
        if len(self.unit_coords) != self.dim:
            raise ValueError(f"unit has {len(self.unit_coords)} coordinates, expected {self.dim}")
        if all(c == 0.0 for c in self.unit_coords):
            raise ValueError("unit must differ from zero")

    def __call__(self, *coords: float) -> "Element":
        if len(coords) == 1 and isinstance(coords[0], (tuple, list, np.ndarray)):
            coords = tuple(coords[0])
        if len(coords) != self.dim:
            raise ValueError(f"{self.tag} expects {self.dim} coordinates, got {len(coords)}")
        return Element(tuple(float(c) for c in coords), self)

    @property
    def unit(self) -> "Element":
        return Element(self.unit_coords, self)

    @property
    def zero(self) -> "Element":
        return Element((0.0,) * self.dim, self)


@dataclass(frozen=True)
class Element:
    coords: Coords
    algebra: Algebra = field(repr=False, compare=False)

    def _check(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if other.algebra is not self.algebra:
            raise AlgebraMismatchError(
                f"cannot combine {self.algebra.tag!r} and {other.algebra.tag!r} elements"
            )

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra is other.algebra and self.coords == other.coords

    def __hash__(self):
        return hash((self.algebra.tag, self.coords))

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(tuple(a + b for a, b in zip(self.coords, other.coords)), self.algebra)

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(tuple(a - b for a, b in zip(self.coords, other.coords)), self.algebra)

    def __neg__(self) -> "Element":
        return Element(tuple(-a for a in self.coords), self.algebra)

    def __mul__(self, other):
        if isinstance(other, Element):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, s: float) -> "Element":
        s = float(s)
        return Element(tuple(s * a for a in self.coords), self.algebra)

    def norm(self) -> float:
        return norm(self)

    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coords)

    def to_list(self) -> list[float]:
        return list(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def mul(u: Element, v: Element) -> Element:
    u._check(v)
    return Element(tuple(u.algebra.product(u.coords, v.coords)), u.algebra)


def norm(u: Element) -> float:
    return float(u.algebra.norm_fn(u.coords))


def power(u: Element, n: int) -> Element:
    """Return ``u**n`` by iterated left multiplication, ``u^n = u * u^(n-1)``."""
    if n < 0:
        raise ValueError("power requires n >= 0")
    p = u.algebra.unit
    for _ in range(n):
        p = mul(u, p)
    return p


# ---------------------------------------------------------------------------
# built-in instances

def _scalar_product(a: Coords, b: Coords) -> Coords:
    return (a[0] * b[0],)


def _scalar_norm(a: Coords) -> float:
    return abs(a[0])


def _dual_pair_product(b: Coords, a: Coords) -> Coords:
    return (b[0] * a[0], b[0] * a[1] + b[1] * a[0])


def _l1_norm(a: Coords) -> float:
    return sum(map(abs, a))


SCALAR = Algebra("scalar", 1, _scalar_product, _scalar_norm, (1.0,))
DUAL_PAIR = Algebra("dual_pair", 2, _dual_pair_product, _l1_norm, (1.0, 0.0))

ALGEBRAS: dict[str, Algebra] = {"scalar": SCALAR, "dual_pair": DUAL_PAIR}


def get_algebra(tag: str) -> Algebra:
    try:
        return ALGEBRAS[tag]
    except KeyError:
        raise KeyError(f"unknown algebra {tag!r}; registered: {sorted(ALGEBRAS)}") from None


def validate_algebra(
    algebra: Algebra,
    n: int = 200,
    rng: np.random.Generator | int | None = 0,
    rtol: float = 1e-9,
) -> list[str]:
    """Sample the Banach algebra axioms and return a list of failure messages.

    Checks distributivity, associativity, scalar compatibility, the unit law,
    submultiplicativity and norm definiteness on ``n`` random triples.
    """
    rng = np.random.default_rng(rng)
    problems: list[str] = []
    zero, unit = algebra.zero, algebra.unit

    def close(x: Element, y: Element) -> bool:
        scale = 1.0 + max(norm(x), norm(y))
        return norm(x - y) <= rtol * scale

    if norm(zero) != 0.0:
        problems.append("norm(zero) != 0")
    for _ in range(n):
        u, v, w = (algebra(rng.normal(scale=3.0, size=algebra.dim)) for _ in range(3))
        s = float(rng.normal())
        if not close(mul(u + v, w), mul(u, w) + mul(v, w)) or not close(
            mul(u, v + w), mul(u, v) + mul(u, w)
        ):
            problems.append(f"distributivity fails at {u.coords}, {v.coords}, {w.coords}")
        if not close(mul(mul(u, v), w), mul(u, mul(v, w))):
            problems.append(f"associativity fails at {u.coords}, {v.coords}, {w.coords}")
        if not close(mul(u, v).scale(s), mul(u.scale(s), v)) or not close(
            mul(u, v).scale(s), mul(u, v.scale(s))
        ):
            problems.append(f"scalar compatibility fails at {u.coords}, {v.coords}")
        if not close(mul(unit, u), u) or not close(mul(u, unit), u):
            problems.append(f"unit law fails at {u.coords}")
        if norm(mul(u, v)) > norm(u) * norm(v) * (1 + rtol) + rtol:
            problems.append(f"submultiplicativity fails at {u.coords}, {v.coords}")
        if not u.is_zero() and norm(u) <= 0.0:
            problems.append(f"norm vanishes at nonzero {u.coords}")
        if len(problems) > 20:
            break
    return problems


def register_algebra(
    tag: str,
    dim: int,
    product: Callable[[Coords, Coords], Coords],
    norm_fn: Callable[[Coords], float],
    unit: Sequence[float],
    validate: bool = True,
    seed: int = 0,
) -> Algebra:
    """Create and register a user algebra; sampled axioms are checked unless ``validate=False``."""
    algebra = Algebra(tag, dim, product, norm_fn, tuple(float(c) for c in unit))
    if validate:
        problems = validate_algebra(algebra, rng=seed)
        if problems:
            raise AlgebraAxiomError(f"algebra {tag!r} failed validation: {problems[0]}")
    ALGEBRAS[tag] = algebra
    return algebra


# ---------------------------------------------------------------------------
# spectral radius and Neumann inverse

@dataclass
class SpectralEstimate:
    """Running-minimum estimate of ``inf_n ||u^n||^(1/n)``.

    ``values[i]`` is ``||u^(i+1)||^(1/(i+1))``; only the last ``tail_len``
    entries are kept in ``tail``.  The estimate is an upper bound for the
    spectral radius whatever ``n`` it stopped at.
    """

    estimate: float
    n: int
    tail: list[float]
    stopped_early: bool = False
    exact: bool = False
    overflow: bool = False

    def __float__(self) -> float:
        return self.estimate


def spectral_radius_estimate(
    u: Element,
    n_max: int = 1000,
    tol: float = 1e-3,
    tail_len: int = 16,
) -> SpectralEstimate:
    """Estimate the spectral radius of ``u`` from the Gelfand sequence.

    Powers are renormalised at every step so that ``log ||u^n||`` is
    accumulated without overflow.  The loop stops early when
    ``|v_n - v_ceil(n/2)| < tol``; successive differences shrink like
    ``log(n)/n**2`` and would stop far too soon on slowly converging inputs.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    values: list[float] = []
    best = math.inf
    log_norm = 0.0
    p = u.algebra.unit
    for n in range(1, n_max + 1):
        p = mul(u, p)
        nrm = norm(p)
        if nrm == 0.0:
            values.append(0.0)
            return SpectralEstimate(0.0, n, values[-tail_len:], stopped_early=n < n_max, exact=True)
        if not math.isfinite(nrm):
            est = best if values else math.inf
            return SpectralEstimate(est, n - 1, values[-tail_len:], overflow=True)
        log_norm += math.log(nrm)
        p = p.scale(1.0 / nrm)
        v = math.exp(log_norm / n)
        values.append(v)
        best = min(best, v)
        if n >= 2 and abs(v - values[(n + 1) // 2 - 1]) < tol:
            return SpectralEstimate(best, n, values[-tail_len:], stopped_early=n < n_max)
    return SpectralEstimate(best, n_max, values[-tail_len:])


def neumann_inverse(
    u: Element,
    tol: float = 1e-12,
    n_max: int = 100_000,
    window: int = 256,
) -> Element:
    """Invert ``e - u`` by summing ``e + u + u^2 + ... + u^N``.

    ``N`` is the first index with ``||u^N|| < tol``.  Since
    ``(e - u) * S_N = e - u^(N+1)``, the result satisfies
    ``||(e - u) z - e|| <= ||u|| * tol`` (the documented constant is
    ``C = ||u||``).  If ``||u^n||`` fails to decrease for ``window``
    consecutive powers the series is declared divergent.
    """
    total = u.algebra.unit
    term = u.algebra.unit
    if norm(term) < tol:
        return total
    prev = norm(term)
    stalled = 0
    for _ in range(1, n_max + 1):
        term = mul(u, term)
        nrm = norm(term)
        if not math.isfinite(nrm):
            raise NoConvergenceError(f"powers of {u.coords} overflow")
        total = total + term
        if nrm < tol:
            return total
        stalled = stalled + 1 if nrm >= prev else 0
        if stalled >= window:
            raise NoConvergenceError(
                f"||u^n|| non-decreasing over {window} powers for u={u.coords}; spectral radius >= 1?"
            )
        prev = nrm
    residual = norm(mul(u.algebra.unit - u, total) - u.algebra.unit)
    raise TruncationError(f"Neumann series not converged after {n_max} terms", total, residual)
