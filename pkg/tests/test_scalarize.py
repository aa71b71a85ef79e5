import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conemod.algebra import DUAL_PAIR as A
from conemod.cone import half_plane_cone, le, quadrant_cone
from conemod.fixpoint import constant_map, example_map, identity_map
from conemod.modular import abs_pair, check_scalar_modular
from conemod.scalarize import (
    DEFAULT_PAIR,
    ScalarizationParams,
    UnboundedScalarizationError,
    non_contraction_witness,
    norm_modular,
    scalar_contraction_constant,
    scalar_modular,
    xi_c,
    xi_c_bisect,
)

P = quadrant_cone()
rho = abs_pair(P)
ONES = ScalarizationParams(A(1, 1), P)
coord = st.floats(-1e3, 1e3, allow_nan=False)
elements = st.tuples(coord, coord).map(lambda c: A(*c))
positive = st.floats(0.01, 100)


def test_params_require_interior():
    with pytest.raises(ValueError):
        ScalarizationParams(A(1, 0), P)
    with pytest.raises(ValueError):
        ScalarizationParams(A(-1, 1), P)


def test_xi_c_examples():
    assert xi_c(A(3, 5), ONES) == 5.0
    assert xi_c(A.zero, ONES) == 0.0
    assert xi_c(A(4, 3), ScalarizationParams(A(2, 1), P)) == 3.0
    assert xi_c(A(-4, -2), ONES) == -2.0


def test_xi_c_bisect_examples():
    assert xi_c(A(3, 5), ONES, method="bisect") == pytest.approx(5.0, abs=1e-11)
    assert xi_c(A(4, 3), ScalarizationParams(A(2, 1), P), method="bisect") == pytest.approx(3.0, abs=1e-11)
    with pytest.raises(ValueError):
        xi_c(A(1, 1), ONES, method="newton")


@given(elements, positive, positive)
@settings(max_examples=80)
def test_closed_form_matches_bisection(b, c1, c2):
    params = ScalarizationParams(A(c1, c2), P)
    closed = xi_c(b, params, method="closed")
    got = xi_c(b, params, method="bisect")
    # bisection returns an admissible t, one band-width of slack above the infimum at most
    assert got == pytest.approx(closed, rel=1e-9, abs=1e-9)
    assert le(b, params.c.scale(got), P)


@given(elements, st.floats(0, 1e3))
def test_xi_c_positively_homogeneous(b, t):
    assert xi_c(b.scale(t), ONES) == pytest.approx(t * xi_c(b, ONES), rel=1e-12, abs=1e-300)


@given(elements, elements)
def test_xi_c_monotone(a, b):
    hi = A(max(a[0], b[0]), max(a[1], b[1]))
    assert xi_c(a, ONES) <= xi_c(hi, ONES)


def test_bisect_needs_cone_with_bracket():
    # on the half-plane cone b ⪯ t c only constrains the first coordinate
    params = ScalarizationParams(A(1, 1), half_plane_cone())
    assert xi_c(A(7, 2), params) == pytest.approx(7.0, abs=1e-11)
    assert xi_c(A(-3, 100), params) == pytest.approx(-3.0, abs=1e-11)
    with pytest.raises(UnboundedScalarizationError):
        xi_c_bisect(A(1e308, 1), params, max_doublings=10)


def test_scalar_modular_values():
    rs = scalar_modular(rho, ONES)
    assert rs([-2.0, 3.0]) == 3.0
    assert rs([0.0, 0.0]) == 0.0
    weighted = scalar_modular(rho, ScalarizationParams(A(2, 1), P))
    assert weighted([4.0, -1.0]) == 2.0


def test_norm_modular_values():
    F = norm_modular(rho)
    assert F([3.0, -4.0]) == 7.0
    assert F([0.0, 0.0]) == 0.0


def test_norm_modular_is_scalar_modular():
    rep = check_scalar_modular(norm_modular(rho), n=10_000, rng=0)
    assert rep.ok, rep.violations[:2]
    assert rep.checked == 10_000


def test_scalar_contraction_constant():
    assert scalar_contraction_constant(A(0.5, 2)) == 2.5
    assert scalar_contraction_constant(A(0.5, 2), L=2.0) == 5.0


def test_witness_default_example():
    w = non_contraction_witness(example_map(2.0), scalar_modular(rho, ONES))
    assert w is not None
    assert np.array_equal(w.a, DEFAULT_PAIR[0]) and np.array_equal(w.b, DEFAULT_PAIR[1])
    # Ta - Tb = (log 5 - log 4, lam) and a - b = (1, 0)
    assert w.image_value == 2.0
    assert w.source_value == 1.0
    d = w.to_dict()
    assert d["rho_star_Ta_minus_Tb"] == 2.0 and d["a"] == [1.0, 0.0]


def test_witness_absent_for_nonexpansive_maps():
    rs = scalar_modular(rho, ONES)
    pairs = [([1, 2], [3, -4]), ([0, 5], [0, 0])]
    assert non_contraction_witness(constant_map((1.0, 1.0)), rs, pairs) is None
    assert non_contraction_witness(identity_map(), rs, pairs) is None


def test_witness_uses_extra_candidates():
    rs = scalar_modular(rho, ONES)
    swap = lambda b: np.array([b[1], 2 * b[0]])  # noqa: E731
    # (1,0) -> (0,2) doubles the gap, so the default pair already qualifies
    assert non_contraction_witness(swap, rs).image_value == 2.0
    # shrinks the default pair, triples the extra one
    half = lambda b: 0.5 * np.asarray(b) if b[0] == 1.0 else 3.0 * np.asarray(b)  # noqa: E731
    w = non_contraction_witness(half, rs, [([0.0, 1.0], [0.0, 0.0])])
    assert w is not None and w.a.tolist() == [0.0, 1.0]


@pytest.mark.parametrize("c1,c2", [(1.0, 1.0), (1.0, 1.5), (2.0, 3.0), (1.0, 0.5)])
def test_witness_survives_weights_below_lambda(c1, c2):
    # rho*(Ta - Tb) = max((log5 - log4)/c1, lam/c2) exceeds rho*(a - b) = 1/c1 while c2/c1 < lam
    lam = 2.0
    w = non_contraction_witness(example_map(lam), scalar_modular(rho, ScalarizationParams(A(c1, c2), P)))
    assert w is not None
    assert w.image_value == pytest.approx(max(np.log(1.25) / c1, lam / c2))
    assert w.source_value == pytest.approx(1.0 / c1)


def test_witness_disappears_for_large_weight():
    w = non_contraction_witness(example_map(2.0), scalar_modular(rho, ScalarizationParams(A(1.0, 4.0), P)))
    assert w is None
