import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conemod.algebra import DUAL_PAIR as A
from conemod.cone import (
    element_sampler,
    get_cone,
    half_plane_cone,
    le,
    ll,
    normality_estimate,
    normality_report,
    ordered_pair_sampler,
    quadrant_cone,
    verify_cone_axioms,
    whole_space_cone,
)

P = quadrant_cone()
coord = st.floats(-100, 100, allow_nan=False)
elements = st.tuples(coord, coord).map(lambda c: A(*c))


def test_le_examples():
    assert le(A(1, 2), A(2, 3), P)
    assert le(A(4, -1), A(4, -1), P)
    assert not le(A(1, 0), A(0, 5), P)


def test_ll_examples():
    assert ll(A.zero, A(1, 1), P)
    assert not ll(A.zero, A(1, 0), P)
    assert not ll(A(3, 3), A(3, 3), P)


def test_membership_tolerance_band():
    assert P.contains(A(-1e-13, 1.0))
    assert not P.contains(A(-1e-9, 1.0))


@given(elements, elements)
def test_quadrant_order_closed_form(x, y):
    assert le(x, y, P) == (x[0] <= y[0] + 1e-12 and x[1] <= y[1] + 1e-12)


@given(elements, elements, elements)
def test_order_reflexive_transitive(x, y, z):
    assert le(x, x, P)
    if le(x, y, P) and le(y, z, P):
        # the membership band is 1e-12, so chaining two comparisons can lose 2e-12
        assert min((z - x).coords) >= -2e-12
        assert le(x, z, get_cone("quadrant")) or min((z - x).coords) < -1e-12


@given(elements, elements)
def test_antisymmetry_and_strict_implies_weak(x, y):
    if le(x, y, P) and le(y, x, P):
        assert np.allclose(x.coords, y.coords, atol=1e-12)
    if ll(x, y, P):
        assert le(x, y, P)


def test_quadrant_axioms_clean():
    rep = verify_cone_axioms(P, n=10_000, rng=1)
    assert rep.ok, rep.violations[:3]
    assert rep.checked == 10_000
    assert rep.verdict == "no violation found at recorded resolution"


def test_whole_plane_is_not_pointed():
    rep = verify_cone_axioms(whole_space_cone(), n=200, rng=0)
    assert "item4_pointed" in rep.axioms_violated()
    w = next(v for v in rep.violations if v.axiom == "item4_pointed").witness
    assert w["x"] == -w["minus_x"] and not w["x"].is_zero()


def test_half_plane_item4_witness_on_second_axis():
    rep = verify_cone_axioms(half_plane_cone(), n=2_000, rng=0)
    assert "item4_pointed" in rep.axioms_violated()
    w = next(v for v in rep.violations if v.axiom == "item4_pointed").witness
    # only points on the b2-axis lie in both P and -P
    assert w["x"][0] == 0.0 and w["x"][1] != 0.0


def test_verify_reports_missing_unit():
    from conemod.cone import Cone

    bad = Cone("no_unit", A, lambda x: x[1] >= 0 and x[0] <= 0, lambda x: x[1] > 0 and x[0] < 0)
    rep = verify_cone_axioms(bad, n=500)
    assert "item1_unit" in rep.axioms_violated()


def test_normality_quadrant_l1():
    est = normality_estimate(P, n=10_000, rng=3)
    assert est.conclusive and est.accepted > 100
    assert est.estimate <= 1.0 + 1e-15
    assert est.estimate > 0.99
    assert normality_report(est).ok


def test_normality_trivial_samplers():
    same = normality_estimate(P, lambda rng: (A(1, 2), A(1, 2)), n=5)
    assert same.estimate == 1.0
    zero_x = normality_estimate(P, lambda rng: (A.zero, A(rng.random() + 0.1, 1.0)), n=5)
    assert zero_x.estimate == 0.0


def test_normality_inconclusive():
    est = normality_estimate(P, lambda rng: (A(1, 1), A(0, 0)), n=50)
    assert not est.conclusive
    rep = normality_report(est)
    assert rep.ok and "inconclusive" in rep.notes[0]
    with pytest.raises(ValueError):
        float(est)


def test_samplers_are_deterministic():
    s = ordered_pair_sampler(element_sampler(A))
    r1 = [s(g) for g in [np.random.default_rng(7)] for _ in range(3)]
    r2 = [s(g) for g in [np.random.default_rng(7)] for _ in range(3)]
    assert r1 == r2
