"""Subset-selection approximations of magnitude."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .bordered import BorderedMagnitude
from .errors import InputError
from .exact import MagnitudeEstimate, magnitude_1d
from .metric import MetricSpace, similarity


@dataclass
class SelectionCurve:
    sizes: list = field(default_factory=list)
    point_ids: list = field(default_factory=list)
    magnitudes: list = field(default_factory=list)
    tolerance_used: float | None = None
    stopped_at: int = 0
    method: str = ""

    def append(self, size, point_id, magnitude):
        self.sizes.append(int(size))
        self.point_ids.append(int(point_id))
        self.magnitudes.append(float(magnitude))
        self.stopped_at = int(size)

    @property
    def final(self) -> float:
        return self.magnitudes[-1] if self.magnitudes else 0.0

    def value_at(self, size: int) -> float:
        return self.magnitudes[self.sizes.index(size)]

    def rows(self):
        return zip(self.sizes, self.point_ids, self.magnitudes)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["size", "point_id", "magnitude"])
            writer.writerows(self.rows())

    def as_estimate(self, method: str, wall_time: float = 0.0) -> MagnitudeEstimate:
        return MagnitudeEstimate(self.final, self.final, method, iterations=len(self.sizes), wall_time=wall_time)


def greedy_select(
    space: MetricSpace,
    t: float = 1.0,
    tolerance_k: float = 1e-3,
    max_size: int | None = None,
    rng_seed: int = 0,
) -> SelectionCurve:
    """Greedy magnitude maximization.

    Starts from one seeded random point, then repeatedly adds the point with
    the largest magnitude gain (lowest id on ties). Stops before adding a
    point whose relative gain ``(new - old) / old`` is below ``tolerance_k``,
    or once ``max_size`` points are selected.
    """
    n = space.n
    max_size = n if max_size is None else max_size
    if not 0 < tolerance_k < 1:
        raise InputError("tolerance_k must be in (0, 1)")
    if not 1 <= max_size <= n:
        raise InputError(f"max_size must be in [1, {n}]")

    zeta = similarity(space, t).zeta
    rng = np.random.default_rng(rng_seed)
    bm = BorderedMagnitude(zeta, track=True)
    curve = SelectionCurve(tolerance_used=tolerance_k, method="greedy")
    first = int(rng.integers(n))
    curve.append(1, first, bm.add(first))

    while bm.k < max_size:
        g = bm.gains()
        g[bm.in_set] = -np.inf
        best = int(np.argmax(g))
        if g[best] / bm.value < tolerance_k:
            break
        curve.append(bm.k + 1, best, bm.add(best))
    return curve


def random_select(space: MetricSpace, t: float = 1.0, sizes=None, rng_seed: int = 0) -> SelectionCurve:
    """Magnitudes of nested seeded-random subsets at the requested sizes."""
    n = space.n
    sizes = list(range(1, n + 1)) if sizes is None else sorted(set(int(s) for s in sizes))
    if sizes and not 1 <= sizes[0] <= sizes[-1] <= n:
        raise InputError(f"sizes must lie in [1, {n}]")
    order = np.random.default_rng(rng_seed).permutation(n)
    curve = SelectionCurve(method="random")
    if not sizes:
        return curve
    bm = BorderedMagnitude(similarity(space, t).zeta, track=False)
    wanted = set(sizes)
    for i, p in enumerate(order[: sizes[-1]], start=1):
        value = bm.add(p)
        if i in wanted:
            curve.append(i, p, value)
    return curve


def ordered_curve(space: MetricSpace, t: float, order, budget: int | None = None, method: str = "") -> SelectionCurve:
    """Magnitude after each prefix of a fixed point order."""
    order = list(order)
    budget = len(order) if budget is None else budget
    bm = BorderedMagnitude(similarity(space, t).zeta, track=False)
    curve = SelectionCurve(method=method)
    for i, p in enumerate(order[:budget], start=1):
        curve.append(i, p, bm.add(p))
    return curve


def estimate_param_magnitude(params, sample_size: int = 1000, rng_seed: int = 0) -> MagnitudeEstimate:
    """Magnitude estimate for a parameter vector on the real line.

    Takes the smallest and largest entries plus a seeded uniform sample of
    ``sample_size`` entries, drops exact ties, and evaluates the 1D closed
    form on the result. A constant vector gives 1 with the ``degenerate``
    flag set.
    """
    p = np.asarray(params, dtype=float).ravel()
    if p.size < 2:
        raise InputError("need at least two parameters")
    if sample_size < 2:
        raise InputError("sample_size must be >= 2")
    if not np.all(np.isfinite(p)):
        raise InputError("parameters must be finite")
    start = time.perf_counter()
    rng = np.random.default_rng(rng_seed)
    if sample_size >= p.size:
        sample = p
    else:
        sample = p[rng.choice(p.size, size=sample_size, replace=False)]
    values = np.unique(np.concatenate([[p.min(), p.max()], sample]))
    value = magnitude_1d(values)
    flags = ("degenerate",) if values.size == 1 else ()
    return MagnitudeEstimate(
        value, value, "closed_form_1d", iterations=int(values.size), wall_time=time.perf_counter() - start, flags=flags
    )
