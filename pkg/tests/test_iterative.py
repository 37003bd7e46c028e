import csv
import math

import numpy as np
import pytest

from magkit import SolverConfig, build_space, build_space_from_dist, magnitude_exact, similarity, solve_gd, solve_iter_norm
from magkit.errors import Diverged, InputError


def two_point(d=math.log(2)):
    return similarity(build_space([[0.0], [d]]))


def equilateral(n=5, d=0.8):
    D = np.full((n, n), d)
    np.fill_diagonal(D, 0)
    return similarity(build_space_from_dist(D))


@pytest.mark.parametrize("kwargs", [dict(max_iters=0), dict(tol=0), dict(learning_rate=-1), dict(momentum=1.0), dict(batch_size=0)])
def test_config_validation(kwargs):
    with pytest.raises(InputError):
        SolverConfig(**kwargs)


@pytest.mark.parametrize("d", [0.1, 1.0, 4.0])
def test_iter_norm_two_points_one_step(d):
    est, w, trace = solve_iter_norm(two_point(d))
    assert est.iterations == 1
    assert est.value == pytest.approx(2 / (1 + math.exp(-d)), abs=1e-14)
    np.testing.assert_allclose(w.w, 1 / (1 + math.exp(-d)))


def test_iter_norm_homogeneous_one_step():
    sim = equilateral()
    est, _, _ = solve_iter_norm(sim)
    assert est.iterations == 1 and est.converged
    assert est.value == pytest.approx(magnitude_exact(sim)[0].value, abs=1e-12)


def test_iter_norm_weights_positive(rng):
    sim = similarity(build_space(rng.standard_normal((300, 2))))
    est, w, trace = solve_iter_norm(sim, SolverConfig(max_iters=50))
    assert np.all(w.w > 0)
    assert est.pmag == est.value
    assert len(trace) == est.iterations == 50
    assert not est.converged and "max_iters" in est.flags


def test_iter_norm_agrees_with_exact_on_spread_cloud(rng):
    sim = similarity(build_space(rng.uniform(0, 40, (400, 2))))
    est, _, _ = solve_iter_norm(sim, SolverConfig(max_iters=1000, tol=1e-6))
    exact = magnitude_exact(sim)[0].value
    assert abs(est.value - exact) / exact <= max(10 * 1e-6, 1e-4) * 400


def test_gd_two_points_ln2():
    est, _, _ = solve_gd(two_point(), SolverConfig(max_iters=5000, tol=1e-9))
    assert est.value == pytest.approx(4 / 3, abs=1e-4)


def test_gd_single_point():
    est, w, _ = solve_gd(similarity(build_space([[1.0]])), SolverConfig(max_iters=5000, tol=1e-9))
    assert est.converged and w.w[0] == pytest.approx(1, abs=1e-8)


def test_gd_zero_start_loss_is_n(rng):
    sim = similarity(build_space(rng.standard_normal((20, 2))))
    _, _, trace = solve_gd(sim, SolverConfig(max_iters=1, momentum=0.0), w0=np.zeros(20))
    r = sim.zeta @ np.zeros(20) - 1
    assert r @ r == 20
    assert trace.loss[0] < 20


def test_gd_momentum_free_loss_non_increasing(rng):
    sim = similarity(build_space(rng.uniform(0, 14, (50, 2))))
    _, _, trace = solve_gd(sim, SolverConfig(max_iters=2000, momentum=0.0, tol=1e-10))
    assert np.all(np.diff(trace.loss) <= 1e-12)


def test_gd_minibatch_reproducible(rng):
    sim = similarity(build_space(rng.uniform(0, 14, (50, 2))))
    cfg = SolverConfig(max_iters=30, batch_size=8, rng_seed=3)
    a = solve_gd(sim, cfg)[1].w
    b = solve_gd(sim, cfg)[1].w
    np.testing.assert_array_equal(a, b)


def test_gd_diverges_with_huge_step(rng):
    sim = similarity(build_space(rng.standard_normal((40, 2))))
    with pytest.raises(Diverged):
        solve_gd(sim, SolverConfig(max_iters=500, learning_rate=5.0, momentum=0.0))


def test_trace_csv(tmp_path):
    _, _, trace = solve_iter_norm(equilateral())
    path = tmp_path / "trace.csv"
    trace.to_csv(path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["iteration", "estimate", "residual", "loss", "elapsed_seconds"]
    assert len(rows) == 2 and rows[1][0] == "1"
