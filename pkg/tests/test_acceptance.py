"""Acceptance criteria.  Each test carries ``@pytest.mark.criterion(n)``; the
terminal summary (see conftest.py) prints one PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest

from conemod.algebra import DUAL_PAIR as A
from conemod.algebra import mul, neumann_inverse, norm, power, spectral_radius_estimate
from conemod.cone import half_plane_cone, normality_estimate, quadrant_cone, verify_cone_axioms
from conemod.fixpoint import (
    ContractionSpec,
    certify_contraction,
    example_map,
    identity_map,
    pair_sampler,
    picard_solve,
    uniqueness_probe,
)
from conemod.modular import (
    abs_pair,
    check_axioms,
    check_f_norm_properties,
    check_monotonicity,
    check_scalar_modular,
    jump_modular,
)
from conemod.scalarize import ScalarizationParams, non_contraction_witness, norm_modular, scalar_modular

# independent roots: scipy bisection of log(4 + x) - x on [1, 2] and of
# arctan(3 + y) + 2 x1 - y on [0, 10], frozen here
X1_STAR = 1.7490313860127014
X2_STAR = 4.943630827893388

LAM = 2.0
P = quadrant_cone()
rho = abs_pair(P)
T = example_map(LAM)
K = A(0.5, LAM)
SPEC = ContractionSpec(K, 2.0, 1.0)
N = 10_000


def _solve():
    return picard_solve(T, [0.0, 0.0], SPEC, rho, P, tol=1e-10)


@pytest.mark.criterion(1)
@pytest.mark.parametrize("lam", [2.0, 100.0])
def test_spectral_radius_of_example_constant(lam):
    t0 = time.perf_counter()
    est = spectral_radius_estimate(A(0.5, lam), n_max=1000)
    elapsed = time.perf_counter() - t0
    assert 0.5 <= est.estimate <= 0.51, est
    assert elapsed < 1.0


@pytest.mark.criterion(2)
def test_neumann_identity():
    t0 = time.perf_counter()
    z = neumann_inverse(K)
    elapsed = time.perf_counter() - t0
    e = A.unit
    assert norm(mul(e - K, z) - e) < 1e-8
    assert norm(z - A(2.0, 4 * LAM)) < 1e-8
    assert max(abs(a - b) for a, b in zip(z.coords, (2.0, 4 * LAM))) < 1e-8
    assert elapsed < 1.0


@pytest.mark.criterion(3)
def test_example_fixed_point():
    t0 = time.perf_counter()
    res = _solve()
    elapsed = time.perf_counter() - t0
    x = res.point
    assert abs(x[0] - X1_STAR) < 1e-9
    assert abs(x[1] - X2_STAR) < 1e-8
    assert rho.size(0.5 * SPEC.alpha * (T(x) - x)) < 1e-9
    assert res.iterations < 200
    assert elapsed < 1.0


@pytest.mark.criterion(4)
def test_uniqueness_from_five_starts():
    rng = np.random.default_rng(42)
    starts = rng.uniform(-10, 10, size=(5, 2))
    rep = uniqueness_probe(T, SPEC, rho, starts, P, tol=1e-8)
    assert rep.ok, rep.to_dict()
    for p in rep.points:
        assert rho.size(p - np.array([X1_STAR, X2_STAR])) < 1e-8


@pytest.mark.criterion(5)
def test_contraction_certificate_example_constant():
    # alpha=2, beta=1 with k=(1/2, lam) exactly as stated; see the decisions ledger
    rep = certify_contraction(T, SPEC, rho, P, pair_sampler(2, -50.0, 50.0), N, rng=42)
    assert rep.checked == N
    found = rep.n_violations
    assert found == 0, f"{found} violations; first witness {rep.violations[0].witness}"


@pytest.mark.criterion(5)
def test_contraction_certificate_small_alpha_violates():
    spec = ContractionSpec(K, 1.0, 0.5)
    rep = certify_contraction(T, spec, rho, P, pair_sampler(2, -50.0, 50.0), N, rng=42)
    assert rep.n_violations >= 1
    v = rep.violations[0]
    assert v.axiom == "contraction" and {"x", "y", "lhs", "rhs"} <= set(v.witness)


@pytest.mark.criterion(6)
def test_steps_dominated_by_proof_bound():
    res = _solve()
    xs = res.trace.iterates
    L = P.normal_constant
    r0 = rho.size(SPEC.beta * (xs[1] - xs[0]))
    for n in range(len(xs) - 1):
        step = rho.size(SPEC.beta * (xs[n + 1] - xs[n]))
        assert step == res.trace.step_residuals[n]
        assert step <= L * norm(power(K, n)) * r0 * (1 + 1e-9), n


@pytest.mark.criterion(7)
def test_non_contraction_witness():
    rho_star = scalar_modular(rho, ScalarizationParams(A(1.0, 1.0), P))
    w = non_contraction_witness(T, rho_star)
    assert w is not None
    assert w.a.tolist() == [1.0, 0.0] and w.b.tolist() == [0.0, 0.0]
    assert w.image_value == 2.0 and w.source_value == 1.0
    assert w.image_value > w.source_value
    assert np.allclose(T(w.a) - T(w.b), [math.log(5) - math.log(4), LAM])


@pytest.mark.criterion(8)
def test_flagship_suites():
    rng = np.random.default_rng(42)
    reports = [
        verify_cone_axioms(P, n=N, rng=rng),
        check_axioms(rho, n=N, rng=rng),
        check_monotonicity(rho, n=N, rng=rng),
        check_f_norm_properties(rho, n=N, rng=rng),
    ]
    for rep in reports:
        assert rep.checked == N, rep.name
        assert rep.ok, (rep.name, rep.violations[:1])
    est = normality_estimate(P, n=N, rng=rng)
    assert est.conclusive and est.estimate <= 1.0


@pytest.mark.criterion(8)
def test_defect_fixtures_named():
    cone_rep = verify_cone_axioms(half_plane_cone(), n=N, rng=42)
    assert "item4_pointed" in cone_rep.axioms_violated()
    mod_rep = check_axioms(jump_modular(), n=N, rng=42)
    assert "cmf1_definite" in mod_rep.axioms_violated()
    map_rep = certify_contraction(identity_map(), SPEC, rho, P, n=N, rng=42)
    assert "contraction" in map_rep.axioms_violated()
    for rep in (cone_rep, mod_rep, map_rep):
        assert rep.violations[0].witness


@pytest.mark.criterion(9)
def test_norm_reduction_is_modular():
    rep = check_scalar_modular(norm_modular(rho), n=N, rng=42)
    assert rep.checked == N
    assert rep.ok, rep.violations[:1]
