"""Finite metric spaces and their similarity matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (
    AsymmetryExceedsTolerance,
    DuplicatePoints,
    EmptyInput,
    NegativeDistance,
    NonFiniteCoordinate,
    NonPositiveScale,
    NonzeroDiagonal,
    NotSquare,
)

METRICS = {"euclidean": "euclidean", "manhattan": "cityblock"}
SYMMETRY_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """n points with a dense distance matrix.

    ``points``/``metric`` are set for point clouds and ``None`` for spaces
    built from an explicit matrix. ``multiplicity`` is only set when
    duplicates were merged on construction.
    """

    dist: np.ndarray
    points: np.ndarray | None = None
    metric: str | None = None
    multiplicity: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def point_ids(self) -> np.ndarray:
        return np.arange(self.n)

    @property
    def diameter(self) -> float:
        if "diameter" not in self._cache:
            self._cache["diameter"] = float(self.dist.max()) if self.n > 1 else 0.0
        return self._cache["diameter"]

    @property
    def min_gap(self) -> float:
        """Smallest distance between two distinct points (inf for one point)."""
        if "min_gap" not in self._cache:
            if self.n < 2:
                gap = np.inf
            else:
                iu = np.triu_indices(self.n, 1)
                gap = float(self.dist[iu].min())
            self._cache["min_gap"] = gap
        return self._cache["min_gap"]

    def subspace(self, ids) -> MetricSpace:
        ids = np.asarray(ids, dtype=int)
        pts = None if self.points is None else _frozen(self.points[ids])
        return MetricSpace(_frozen(self.dist[np.ix_(ids, ids)]), pts, self.metric)

    def scaled(self, t: float) -> MetricSpace:
        """The space tX with every distance multiplied by ``t``."""
        _check_scale(t)
        pts = None if self.points is None else _frozen(self.points * t)
        return MetricSpace(_frozen(self.dist * t), pts, self.metric, self.multiplicity)


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    zeta: np.ndarray
    scale: float
    space: MetricSpace

    @property
    def n(self) -> int:
        return self.zeta.shape[0]


def _check_scale(t):
    if not np.isfinite(t) or t <= 0:
        raise NonPositiveScale(f"scale must be positive and finite, got {t!r}")


def pairwise(points: np.ndarray, metric: str = "euclidean", other: np.ndarray | None = None) -> np.ndarray:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {sorted(METRICS)}")
    other = points if other is None else other
    return cdist(points, other, metric=METRICS[metric])


def build_space(points, metric: str = "euclidean", duplicates: str = "reject") -> MetricSpace:
    """Build a space from an ``(n, D)`` coordinate array.

    ``duplicates="reject"`` raises :class:`DuplicatePoints` on repeated rows;
    ``"dedup"`` keeps the first occurrence of each and records how often it
    appeared in ``multiplicity``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptyInput("need at least one point")
    if pts.shape[1] == 0:
        raise EmptyInput("points need at least one coordinate")
    if not np.all(np.isfinite(pts)):
        raise NonFiniteCoordinate("coordinates must be finite")
    if duplicates not in ("reject", "dedup"):
        raise ValueError(f"unknown duplicate policy {duplicates!r}")

    multiplicity = None
    _, first, counts = np.unique(pts, axis=0, return_index=True, return_counts=True)
    if np.any(counts > 1):
        if duplicates == "reject":
            raise DuplicatePoints(f"{int(np.sum(counts - 1))} duplicate point(s)")
        order = np.argsort(first)
        pts = pts[first[order]]
        multiplicity = _frozen(counts[order]).astype(int)

    d = pairwise(pts, metric)
    np.fill_diagonal(d, 0.0)
    if pts.shape[0] > 1 and not np.all(d[~np.eye(len(d), dtype=bool)] > 0):
        # distinct rows closer than float resolution
        raise DuplicatePoints("distinct points at zero distance")
    return MetricSpace(_frozen(d), _frozen(pts), metric, multiplicity)


def build_space_from_dist(dist) -> MetricSpace:
    """Wrap an explicit distance matrix, symmetrizing it as ``(d + d.T) / 2``."""
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {d.shape}")
    if d.shape[0] == 0:
        raise EmptyInput("empty distance matrix")
    if not np.all(np.isfinite(d)):
        raise NonFiniteCoordinate("distances must be finite")
    if np.any(np.abs(d - d.T) > SYMMETRY_TOL):
        raise AsymmetryExceedsTolerance(f"max asymmetry {np.abs(d - d.T).max():.3g}")
    if np.any(d < 0):
        raise NegativeDistance("distances must be non-negative")
    if np.any(np.diag(d) != 0):
        raise NonzeroDiagonal("diagonal must be zero")
    d = (d + d.T) / 2
    if d.shape[0] > 1 and not np.all(d[~np.eye(len(d), dtype=bool)] > 0):
        raise DuplicatePoints("distinct points at zero distance")
    return MetricSpace(_frozen(d))


def similarity(space: MetricSpace, t: float = 1.0) -> SimilarityMatrix:
    """zeta_ij = exp(-t * d_ij), with an exact unit diagonal."""
    _check_scale(t)
    z = np.exp(-t * space.dist)
    np.fill_diagonal(z, 1.0)
    return SimilarityMatrix(_frozen(z), float(t), space)


def mean_pairwise_distance(space: MetricSpace, exact_limit: int = 5000, n_pairs: int = 100_000, seed: int = 0) -> float:
    n = space.n
    if n < 2:
        return 0.0
    if n <= exact_limit:
        return float(space.dist.sum() / (n * (n - 1)))
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, n_pairs)
    j = rng.integers(0, n - 1, n_pairs)
    j = j + (j >= i)
    return float(space.dist[i, j].mean())
