"""Iterative approximations of the weighting.

Two O(n^2)-per-iteration schemes: heavy-ball gradient descent on the squared
weighting loss ``sum_i (sum_j zeta_ij w_j - 1)^2`` and iterative
normalization, which rescales every weight by its own row sum.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import Diverged, InputError, NonFiniteUpdate
from .exact import MagnitudeEstimate, Weighting, make_weighting, pmag
from .metric import SimilarityMatrix

# consecutive loss increases before a run may be declared diverged
DIVERGENCE_PATIENCE = 10


@dataclass
class SolverConfig:
    max_iters: int = 1000
    tol: float = 1e-6
    learning_rate: float = 0.01
    momentum: float = 0.9
    batch_size: int | None = None  # None means full batch
    rng_seed: int = 0
    record_trace: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise InputError("max_iters must be >= 1")
        if not self.tol > 0:
            raise InputError("tol must be > 0")
        if not self.learning_rate > 0:
            raise InputError("learning_rate must be > 0")
        if not 0 <= self.momentum < 1:
            raise InputError("momentum must be in [0, 1)")
        if self.batch_size is not None and self.batch_size < 1:
            raise InputError("batch_size must be >= 1")


@dataclass
class ConvergenceTrace:
    estimate: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    loss: list = field(default_factory=list)
    elapsed: list = field(default_factory=list)

    def __len__(self):
        return len(self.estimate)

    def record(self, estimate, residual, loss, elapsed):
        self.estimate.append(float(estimate))
        self.residual.append(float(residual))
        self.loss.append(float(loss))
        self.elapsed.append(float(elapsed))

    def rows(self):
        for i, row in enumerate(zip(self.estimate, self.residual, self.loss, self.elapsed), start=1):
            yield (i, *row)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "estimate", "residual", "loss", "elapsed_seconds"])
            writer.writerows(self.rows())


def _finish(method, zeta, w, scale, iterations, converged, start):
    weighting = make_weighting(zeta, w, scale)
    est = MagnitudeEstimate(
        value=float(w.sum()),
        pmag=pmag(w),
        method=method,
        iterations=iterations,
        residual_norm=weighting.residual_norm,
        wall_time=time.perf_counter() - start,
        converged=converged,
        flags=() if converged else ("max_iters",),
    )
    return est, weighting


def solve_iter_norm(
    sim: SimilarityMatrix, cfg: SolverConfig | None = None
) -> tuple[MagnitudeEstimate, Weighting, ConvergenceTrace]:
    """Iterative normalization.

    Starts from ``w = 1``; each iteration computes ``G = zeta @ w`` from the
    previous weights and sets ``w /= G`` for all points at once. Stops when
    ``max |G - 1| <= tol``. Weights stay strictly positive throughout.
    """
    cfg = cfg or SolverConfig()
    zeta = sim.zeta
    trace = ConvergenceTrace()
    start = time.perf_counter()

    w = np.ones(sim.n)
    G = zeta @ w
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        if not (np.all(G > 0) and np.all(np.isfinite(G))):
            raise NonFiniteUpdate(f"row sum not positive/finite at iteration {it}")
        w = w / G
        G = zeta @ w
        r = G - 1.0
        res = np.abs(r).max()
        if cfg.record_trace:
            trace.record(w.sum(), res, r @ r, time.perf_counter() - start)
        if res <= cfg.tol:
            converged = True
            break
    est, weighting = _finish("iter_norm", zeta, w, sim.scale, it, converged, start)
    return est, weighting, trace


def solve_gd(
    sim: SimilarityMatrix, cfg: SolverConfig | None = None, w0: np.ndarray | None = None
) -> tuple[MagnitudeEstimate, Weighting, ConvergenceTrace]:
    """Heavy-ball gradient descent on ``||zeta w - 1||^2`` starting at ``w = 1``.

    Full batch uses the exact gradient ``2 zeta (zeta w - 1)``. With
    ``cfg.batch_size`` set, each iteration is one epoch over a seeded
    permutation of the rows, taking one momentum step per mini-batch with
    the gradient of that batch's rows only.

    Raises :class:`Diverged` when the loss turns non-finite, or when it has
    risen for ``DIVERGENCE_PATIENCE`` consecutive iterations and sits above
    its starting value (heavy-ball oscillation alone can produce long runs of
    increases, but never beyond the initial loss in a stable run).
    """
    cfg = cfg or SolverConfig()
    zeta = sim.zeta
    n = sim.n
    trace = ConvergenceTrace()
    rng = np.random.default_rng(cfg.rng_seed)
    lr, beta = cfg.learning_rate, cfg.momentum
    start = time.perf_counter()

    w = np.ones(n) if w0 is None else np.array(w0, dtype=float)
    v = np.zeros(n)
    r = zeta @ w - 1.0
    loss0 = prev = r @ r
    rising = 0
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        if cfg.batch_size is None or cfg.batch_size >= n:
            v = beta * v + 2.0 * (zeta @ r)
            w = w - lr * v
        else:
            perm = rng.permutation(n)
            for lo in range(0, n, cfg.batch_size):
                rows = perm[lo : lo + cfg.batch_size]
                zb = zeta[rows]
                v = beta * v + 2.0 * (zb.T @ (zb @ w - 1.0))
                w = w - lr * v
        r = zeta @ w - 1.0
        loss = r @ r
        res = np.abs(r).max()
        if cfg.record_trace:
            trace.record(w.sum(), res, loss, time.perf_counter() - start)
        if not np.isfinite(loss):
            raise Diverged(f"loss became non-finite at iteration {it}")
        rising = rising + 1 if loss > prev else 0
        if rising >= DIVERGENCE_PATIENCE and loss > loss0:
            raise Diverged(f"loss rose for {rising} iterations to {loss:.3g} at iteration {it}")
        prev = loss
        if res <= cfg.tol:
            converged = True
            break
    est, weighting = _finish("gd", zeta, w, sim.scale, it, converged, start)
    return est, weighting, trace
