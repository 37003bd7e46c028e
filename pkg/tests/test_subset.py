import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magkit import (
    brute_force_best_subset,
    build_space,
    estimate_param_magnitude,
    greedy_select,
    magnitude_1d,
    magnitude_exact,
    random_select,
    similarity,
)
from magkit.errors import InputError
from magkit.oracles import cross_polytope
from magkit.subset import ordered_curve


def test_greedy_two_points_forced():
    sp = build_space([[0.0], [2.0]])
    curve = greedy_select(sp, tolerance_k=1e-9)
    assert curve.sizes == [1, 2]
    assert curve.final == pytest.approx(magnitude_exact(similarity(sp))[0].value, rel=1e-12)


def test_greedy_curve_is_monotone_and_bounded(rng):
    sp = build_space(rng.standard_normal((120, 2)))
    curve = greedy_select(sp, tolerance_k=1e-6)
    assert np.all(np.diff(curve.magnitudes) > 0)
    assert curve.final <= magnitude_exact(similarity(sp))[0].value + 1e-9
    assert len(set(curve.point_ids)) == len(curve.point_ids)


def test_greedy_stops_on_tolerance(rng):
    sp = build_space(rng.standard_normal((200, 2)) * 0.2)
    curve = greedy_select(sp, tolerance_k=0.05)
    assert curve.stopped_at < 200
    m = curve.magnitudes
    assert all((b - a) / a >= 0.05 for a, b in zip(m, m[1:]))


def test_greedy_respects_budget(rng):
    sp = build_space(rng.standard_normal((50, 2)))
    assert greedy_select(sp, max_size=7, tolerance_k=1e-9).stopped_at == 7


def test_greedy_seeded(rng):
    sp = build_space(rng.standard_normal((50, 2)))
    a = greedy_select(sp, rng_seed=4)
    b = greedy_select(sp, rng_seed=4)
    assert a.point_ids == b.point_ids


@pytest.mark.parametrize("bad", [dict(tolerance_k=0), dict(tolerance_k=1), dict(max_size=0)])
def test_greedy_rejects(bad):
    with pytest.raises(InputError):
        greedy_select(build_space([[0.0], [1.0]]), **bad)


def test_greedy_within_guarantee_1d_n8_k3():
    xs = np.sort(np.random.default_rng(8).uniform(0, 6, 8))
    sp = build_space(xs[:, None])
    _, best = brute_force_best_subset(sp, 1.0, 3)
    got = greedy_select(sp, tolerance_k=1e-12, max_size=3).final
    assert got >= (1 - 1 / math.e) * best


def test_random_select_endpoints(rng):
    sp = build_space(rng.standard_normal((40, 2)))
    curve = random_select(sp, sizes=[1, 40], rng_seed=2)
    assert curve.magnitudes[0] == 1.0
    assert curve.magnitudes[1] == pytest.approx(magnitude_exact(similarity(sp))[0].value, rel=1e-10)


def test_random_select_reproducible(rng):
    sp = build_space(rng.standard_normal((120, 2)))
    a = random_select(sp, sizes=[10, 50, 100], rng_seed=7)
    b = random_select(sp, sizes=[10, 50, 100], rng_seed=7)
    assert list(a.rows()) == list(b.rows())
    assert a.sizes == [10, 50, 100]


def test_cross_polytope_breaks_diminishing_returns():
    # adding the origin after the whole cross-polytope gains more than adding it first
    sp = cross_polytope(500, 5.0)
    space = build_space(np.vstack([np.zeros(500), sp.points]))
    curve = ordered_curve(space, 1.0, list(range(1, space.n)) + [0])
    assert curve.magnitudes[-1] - curve.magnitudes[-2] > 1.0


def test_param_magnitude_examples():
    assert estimate_param_magnitude([0.5, 2.0]).value == pytest.approx(1 + math.tanh(0.75), abs=1e-15)
    const = estimate_param_magnitude(np.full(50, 3.0))
    assert const.value == 1 and "degenerate" in const.flags


def test_param_magnitude_full_sample_is_exact(rng):
    p = rng.standard_normal(400).round(2)
    est = estimate_param_magnitude(p, sample_size=400)
    assert est.value == magnitude_1d(np.unique(p))


def test_param_magnitude_sample_keeps_extremes(rng):
    p = rng.standard_normal(10_000)
    est = estimate_param_magnitude(p, sample_size=100, rng_seed=1)
    assert est.iterations <= 102
    assert est.value <= magnitude_1d(np.unique(p)) + 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 9), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_greedy_guarantee_property(n, k, seed):
    k = min(k, n)
    xs = np.sort(np.random.default_rng(seed).uniform(0, 8, n))
    if np.any(np.diff(xs) < 1e-6):
        return
    sp = build_space(xs[:, None])
    _, best = brute_force_best_subset(sp, 1.0, k)
    got = greedy_select(sp, tolerance_k=1e-12, max_size=k, rng_seed=seed).final
    assert got >= (1 - 1 / math.e) * best - 1e-12
