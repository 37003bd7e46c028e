"""Magnitude function over a scale grid and magnitude-dimension estimates."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InsufficientWindow, MagnitudeError
from .exact import magnitude_exact
from .iterative import SolverConfig, solve_gd, solve_iter_norm
from .metric import MetricSpace, similarity

BACKENDS = ("exact", "iter_norm", "gd")


@dataclass
class ScaleSweep:
    scales: np.ndarray
    values: np.ndarray
    methods: list
    errors: list = field(default_factory=list)

    @property
    def slopes(self) -> np.ndarray:
        """d log Mag / d log t between adjacent grid points."""
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.diff(np.log(self.values)) / np.diff(np.log(self.scales))

    def rows(self):
        for t, v, m, e in zip(self.scales, self.values, self.methods, self.errors):
            yield (float(t), float(v), m, e or "")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "magnitude", "method", "error_flag"])
            writer.writerows(self.rows())


def default_grid(space: MetricSpace, steps: int = 32) -> np.ndarray:
    """Log-spaced scales from 0.01/diameter to 100/min-gap."""
    if space.n < 2:
        return np.logspace(-2, 2, steps)
    return np.geomspace(0.01 / space.diameter, 100.0 / space.min_gap, steps)


def sqrt_r_scale(r: int) -> float:
    """Scale t = sqrt(r) used for trajectory data measured over r training samples."""
    return float(np.sqrt(r))


def magnitude_function(
    space: MetricSpace, scales=None, method: str = "exact", method_cfg: SolverConfig | None = None
) -> ScaleSweep:
    """Evaluate t -> Mag(tX) on a sorted grid.

    A backend failure at one scale is recorded in ``errors`` with a nan
    value instead of aborting the sweep.
    """
    if method not in BACKENDS:
        raise InputError(f"unknown method {method!r}; expected one of {BACKENDS}")
    scales = default_grid(space) if scales is None else np.asarray(scales, dtype=float).ravel()
    if scales.size == 0 or np.any(scales <= 0) or np.any(np.diff(scales) < 0):
        raise InputError("scales must be positive and sorted ascending")
    values = np.full(scales.size, np.nan)
    errors: list = [None] * scales.size
    for i, t in enumerate(scales):
        sim = similarity(space, t)
        try:
            if method == "exact":
                est, _ = magnitude_exact(sim)
            elif method == "iter_norm":
                est, _, _ = solve_iter_norm(sim, method_cfg)
            else:
                est, _, _ = solve_gd(sim, method_cfg)
            values[i] = est.value
        except MagnitudeError as exc:
            errors[i] = exc.code
    return ScaleSweep(scales, values, [method] * scales.size, errors)


def magnitude_dimension(sweep: ScaleSweep, window=None) -> float:
    """Least-squares slope of log Mag against log t over ``window``.

    ``window`` is a slice or an ``(start, stop)`` index pair; the default is
    the whole sweep. Non-finite values are skipped.
    """
    if window is None:
        window = slice(None)
    elif not isinstance(window, slice):
        window = slice(*window)
    t = np.asarray(sweep.scales)[window]
    v = np.asarray(sweep.values)[window]
    ok = np.isfinite(v) & (v > 0)
    if ok.sum() < 2:
        raise InsufficientWindow("need at least two finite values in the window")
    x, y = np.log(t[ok]), np.log(v[ok])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def window_for_range(sweep: ScaleSweep, t_min: float, t_max: float) -> slice:
    """Index window covering scales within [t_min, t_max]."""
    idx = np.flatnonzero((sweep.scales >= t_min) & (sweep.scales <= t_max))
    if idx.size == 0:
        raise InsufficientWindow("no scales in range")
    return slice(int(idx[0]), int(idx[-1]) + 1)
