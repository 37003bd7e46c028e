import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magkit import (
    build_space,
    build_space_from_dist,
    magnitude_1d,
    magnitude_exact,
    magnitude_homogeneous_cross,
    magnitude_two_point,
    pmag,
    similarity,
)
from magkit.errors import DuplicateValues, NonPositiveDistance, NotPositiveDefinite, UnsortedInput
from magkit.exact import magnitude_1d_estimate, solve_weighting
from magkit.oracles import cross_polytope


def exact(points, t=1.0):
    return magnitude_exact(similarity(build_space(points), t))


def test_single_point():
    est, w = exact([[4.0]])
    assert est.value == 1 and w.w.tolist() == [1.0]


@pytest.mark.parametrize("d", [0.01, 0.5, math.log(2), 3.0, 25.0])
def test_two_points_match_closed_form(d):
    est, _ = exact([[0.0], [d]])
    assert est.value == pytest.approx(2 / (1 + math.exp(-d)), abs=1e-12)


def test_equilateral_ln2():
    d = math.log(2)
    est, w = magnitude_exact(similarity(build_space_from_dist([[0, d, d], [d, 0, d], [d, d, 0]])))
    assert est.value == pytest.approx(1.5, abs=1e-12)
    np.testing.assert_allclose(w.w, 0.5, atol=1e-12)


def test_two_point_closed_form_values():
    assert magnitude_two_point(math.log(3)) == pytest.approx(1.5, abs=1e-15)
    assert abs(magnitude_two_point(40.0) - 2) <= 1e-12
    assert magnitude_two_point(1e-12) == pytest.approx(1.0, abs=1e-11)
    with pytest.raises(NonPositiveDistance):
        magnitude_two_point(0.0)


@pytest.mark.parametrize("t", [0.1, 1.0, 5.0])
def test_cross_polytope_d1_is_two_points(t):
    assert magnitude_homogeneous_cross(1, t) == pytest.approx(2 / (1 + math.exp(-2 * t)), rel=1e-14)


@pytest.mark.parametrize("D, t", [(2, 1.0), (5, 0.3), (20, 2.0), (60, 5.0)])
def test_cross_polytope_matches_dense(D, t):
    dense = magnitude_exact(similarity(cross_polytope(D, t)))[0].value
    assert magnitude_homogeneous_cross(D, t) == pytest.approx(dense, rel=1e-10)
    assert magnitude_homogeneous_cross(D, t) <= 2 * D


def test_1d_examples():
    assert magnitude_1d([7.0]) == 1
    assert magnitude_1d([0.0, math.log(3)]) == pytest.approx(1.5, abs=1e-15)
    xs = np.arange(10.0)
    assert magnitude_1d(xs) == pytest.approx(exact(xs[:, None])[0].value, abs=1e-9)


def test_1d_huge_gaps_saturate():
    assert magnitude_1d([0.0, 1e6, 3e9]) == 3.0


def test_1d_input_checks():
    with pytest.raises(UnsortedInput):
        magnitude_1d([1.0, 0.0])
    with pytest.raises(DuplicateValues):
        magnitude_1d([0.0, 0.0])


def test_1d_estimate_record():
    est = magnitude_1d_estimate([0.0, 1.0])
    assert est.method == "closed_form_1d" and est.pmag == est.value


def test_pmag_on_mixed_signs():
    w = np.array([1.2, -0.2])
    assert pmag(w) == pytest.approx(1.2) and w.sum() == pytest.approx(1.0)


def test_negative_weights_appear():
    # three collinear points with the middle one close: middle weight dips below zero
    est, w = exact([[0.0], [0.05], [3.0]], t=1.0)
    assert est.pmag >= est.value


def test_singular_zeta_is_jittered():
    w, jittered = solve_weighting(np.ones((3, 3)))
    assert jittered and np.all(np.isfinite(w))


def test_indefinite_matrix_raises():
    with pytest.raises(NotPositiveDefinite):
        solve_weighting(np.array([[1.0, 2.0], [2.0, 1.0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_1d_closed_form_matches_solver(n, seed):
    xs = np.sort(np.random.default_rng(seed).uniform(0, 20, n))
    if np.any(np.diff(xs) == 0):
        return
    assert magnitude_1d(xs) == pytest.approx(exact(xs[:, None])[0].value, abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_monotone_in_points(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 2))
    full = exact(X)[0].value
    sub = exact(X[:-1])[0].value
    assert full >= sub - 1e-10
    assert 1 - 1e-10 <= full <= n + 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_scale_monotone_and_limits(n, seed):
    X = np.random.default_rng(seed).uniform(0, 5, (n, 2))
    sp = build_space(X)
    ts = np.geomspace(1e-2, 10, 20) / sp.diameter
    vals = [magnitude_exact(similarity(sp, t))[0].value for t in ts]
    assert np.all(np.diff(vals) >= -1e-9)
    small = magnitude_exact(similarity(sp, 1e-4 / sp.diameter))[0].value
    assert abs(small - 1) <= 1e-3
    big = magnitude_exact(similarity(sp, 40 / sp.min_gap))[0].value
    assert abs(big - n) <= 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 25), st.integers(1, 3), st.floats(1.0, 4.0), st.integers(0, 2**32 - 1))
def test_scaling_bounds(n, dim, t, seed):
    sp = build_space(np.random.default_rng(seed).standard_normal((n, dim)))
    base = magnitude_exact(similarity(sp, 1.0))[0].value
    scaled = magnitude_exact(similarity(sp, t))[0].value
    assert base / t - 1e-9 <= scaled <= t**dim * base + 1e-9


def test_residual_small_on_well_conditioned(rng):
    est, w = exact(rng.uniform(0, 30, (200, 2)))
    assert est.residual_norm <= 1e-8
    assert w.residual_norm == est.residual_norm
