"""Ground-truth magnitude via Cholesky, plus closed forms for special spaces."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DuplicateValues, NonPositiveDistance, NotPositiveDefinite, UnsortedInput
from .metric import SimilarityMatrix

METHODS = (
    "exact",
    "closed_form_1d",
    "closed_form_homogeneous",
    "gd",
    "iter_norm",
    "greedy_subset",
    "hierarchy_subset",
)

# tanh(40) == 1.0 in double precision
_TANH_CLAMP = 40.0


@dataclass(frozen=True)
class Weighting:
    w: np.ndarray
    residual: np.ndarray
    scale: float

    @property
    def residual_norm(self) -> float:
        return float(np.abs(self.residual).max()) if self.residual.size else 0.0


@dataclass(frozen=True)
class MagnitudeEstimate:
    value: float
    pmag: float
    method: str
    iterations: int = 0
    residual_norm: float = 0.0
    wall_time: float = 0.0
    converged: bool = True
    flags: tuple = field(default=())

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "pmag": self.pmag,
            "method": self.method,
            "iterations": self.iterations,
            "residual_norm": self.residual_norm,
            "wall_time": self.wall_time,
            "converged": self.converged,
            "flags": list(self.flags),
        }


def make_weighting(zeta: np.ndarray, w: np.ndarray, scale: float) -> Weighting:
    return Weighting(w, zeta @ w - 1.0, scale)


def pmag(w) -> float:
    """Sum of the positive weights."""
    w = w.w if isinstance(w, Weighting) else np.asarray(w, dtype=float)
    return float(np.clip(w, 0, None).sum())


def solve_weighting(zeta: np.ndarray) -> tuple[np.ndarray, bool]:
    """Solve ``zeta @ w = 1`` by Cholesky; returns ``(w, jittered)``.

    One step of iterative refinement is applied. If the factorization fails,
    it is retried once with ``1e-10 * trace / n`` added to the diagonal.
    """
    n = zeta.shape[0]
    ones = np.ones(n)
    jittered = False
    try:
        cf = scipy.linalg.cho_factor(zeta, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        jitter = 1e-10 * np.trace(zeta) / n
        try:
            cf = scipy.linalg.cho_factor(zeta + jitter * np.eye(n), lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(
                "similarity matrix is not positive definite (duplicate or degenerate points?)"
            ) from exc
        jittered = True
    w = scipy.linalg.cho_solve(cf, ones, check_finite=False)
    r = ones - zeta @ w
    w = w + scipy.linalg.cho_solve(cf, r, check_finite=False)
    if not np.all(np.isfinite(w)):
        raise NotPositiveDefinite("non-finite weighting")
    return w, jittered


def magnitude_exact(sim: SimilarityMatrix) -> tuple[MagnitudeEstimate, Weighting]:
    start = time.perf_counter()
    w, jittered = solve_weighting(sim.zeta)
    weighting = make_weighting(sim.zeta, w, sim.scale)
    est = MagnitudeEstimate(
        value=float(w.sum()),
        pmag=pmag(w),
        method="exact",
        iterations=1,
        residual_norm=weighting.residual_norm,
        wall_time=time.perf_counter() - start,
        flags=("jitter",) if jittered else (),
    )
    return est, weighting


def magnitude_of_dist(dist: np.ndarray, t: float = 1.0) -> float:
    """Magnitude of a raw distance matrix; small helper for oracles."""
    z = np.exp(-t * np.asarray(dist, dtype=float))
    np.fill_diagonal(z, 1.0)
    return float(solve_weighting(z)[0].sum())


def magnitude_two_point(d: float) -> float:
    if not d > 0:
        raise NonPositiveDistance(f"distance must be positive, got {d!r}")
    return 2.0 / (1.0 + math.exp(-d))


def magnitude_homogeneous_cross(D: int, t: float) -> float:
    """Magnitude of {±t e_1, ..., ±t e_D} in R^D.

    The space is homogeneous, so every weight equals 1 / (row sum of zeta):
    one antipode at 2t and 2(D-1) neighbours at t*sqrt(2).
    """
    if D < 1 or not t > 0:
        raise ValueError("need D >= 1 and t > 0")
    return 2 * D / (1 + math.exp(-2 * t) + 2 * (D - 1) * math.exp(-t * math.sqrt(2)))


def magnitude_1d(xs) -> float:
    """Exact magnitude of a finite subset of the real line.

    ``xs`` must be strictly increasing. Equals 1 + sum of tanh(gap / 2).
    """
    x = np.asarray(xs, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("need at least one point")
    gaps = np.diff(x)
    if np.any(gaps < 0):
        raise UnsortedInput("values must be sorted ascending")
    if np.any(gaps == 0):
        raise DuplicateValues("values must be distinct")
    return float(1.0 + np.tanh(np.minimum(gaps / 2, _TANH_CLAMP)).sum())


def magnitude_1d_estimate(xs) -> MagnitudeEstimate:
    start = time.perf_counter()
    v = magnitude_1d(xs)
    return MagnitudeEstimate(v, v, "closed_form_1d", wall_time=time.perf_counter() - start)
