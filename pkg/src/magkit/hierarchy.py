"""Discrete center hierarchy: nested independent covering sets with doubling radii.

Level 0 holds every point. Level ``i >= 1`` is a minimal independent covering
set of level ``i - 1`` at radius ``2**(i - 1)``: every point of level ``i - 1``
is within the radius of some center, and centers are pairwise farther apart
than the radius. Independence implies minimality, since a removed center
would leave itself uncovered. The top level is the first singleton.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import DuplicatePoint, InputError, UnknownPoint
from .metric import MetricSpace, build_space_from_dist, pairwise
from .subset import SelectionCurve, ordered_curve


def radius(level: int) -> float:
    return 0.0 if level == 0 else 2.0 ** (level - 1)


class _DistanceStore:
    """Growable point store answering distance queries by id."""

    def __init__(self, space: MetricSpace):
        n = space.n
        self.metric = space.metric
        if space.points is not None:
            self.coords = np.array(space.points, dtype=float)
            self.matrix = None
        else:
            self.coords = None
            self.matrix = np.array(space.dist, dtype=float)
        self.size = n

    def dist(self, i: int, ids) -> np.ndarray:
        ids = np.fromiter(ids, dtype=int) if not isinstance(ids, np.ndarray) else ids
        if ids.size == 0:
            return np.zeros(0)
        if self.matrix is not None:
            return self.matrix[i, ids]
        return pairwise(self.coords[i][None, :], self.metric, self.coords[ids])[0]

    def submatrix(self, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=int)
        if self.matrix is not None:
            return self.matrix[np.ix_(ids, ids)]
        return pairwise(self.coords[ids], self.metric)

    def submatrix_between(self, rows, cols) -> np.ndarray:
        rows, cols = np.asarray(rows, dtype=int), np.asarray(cols, dtype=int)
        if self.matrix is not None:
            return self.matrix[np.ix_(rows, cols)]
        return pairwise(self.coords[rows], self.metric, self.coords[cols])

    def add(self, coords=None, distances=None) -> int:
        new = self.size
        if self.matrix is not None:
            if distances is None:
                raise InputError("this hierarchy is backed by a distance matrix; pass distances")
            d = np.asarray(distances, dtype=float)
            if d.shape != (new,) or np.any(d < 0) or not np.all(np.isfinite(d)):
                raise InputError(f"need {new} finite non-negative distances")
            m = np.zeros((new + 1, new + 1))
            m[:new, :new] = self.matrix
            m[new, :new] = m[:new, new] = d
            self.matrix = m
        else:
            if coords is None:
                raise InputError("pass coordinates for the new point")
            q = np.asarray(coords, dtype=float).ravel()
            if q.shape != (self.coords.shape[1],) or not np.all(np.isfinite(q)):
                raise InputError(f"need {self.coords.shape[1]} finite coordinates")
            self.coords = np.vstack([self.coords, q])
        self.size += 1
        return new


class CoverHierarchy:
    """Mutable discrete center hierarchy over a growable point store.

    Not thread-safe for writers; build with :func:`build_hierarchy`.
    """

    def __init__(self, store: _DistanceStore, levels: list[set[int]]):
        self._store = store
        self.levels = levels

    @property
    def height(self) -> int:
        return len(self.levels) - 1

    @property
    def radii(self) -> list[float]:
        return [radius(i) for i in range(len(self.levels))]

    @property
    def points(self) -> set[int]:
        return self.levels[0]

    def distance(self, i: int, j: int) -> float:
        return float(self._store.dist(i, np.array([j]))[0])

    def diameter(self) -> float:
        ids = sorted(self.points)
        if len(ids) < 2:
            return 0.0
        return float(self._store.submatrix(ids).max())

    def _covered(self, x: int, level: int, exclude: int | None = None) -> bool:
        centers = [c for c in self.levels[level] if c != exclude]
        if x in self.levels[level] and x != exclude:
            return True
        return bool(np.any(self._store.dist(x, np.array(centers, dtype=int)) <= radius(level)))

    def _scan(self, ids, r: float) -> set[int]:
        centers: list[int] = []
        for p in sorted(ids):
            if not centers or not np.any(self._store.dist(p, np.array(centers)) <= r):
                centers.append(p)
        return set(centers)

    def _extend_and_trim(self):
        while len(self.levels[-1]) > 1:
            self.levels.append(self._scan(self.levels[-1], radius(len(self.levels))))
        top = next(i for i, s in enumerate(self.levels) if len(s) <= 1)
        del self.levels[top + 1 :]

    def parent(self) -> dict[int, dict[int, int]]:
        """For each level i >= 1, map every point of level i-1 to its nearest center."""
        out = {}
        for i in range(1, len(self.levels)):
            centers = np.array(sorted(self.levels[i]), dtype=int)
            m = {}
            for x in sorted(self.levels[i - 1]):
                d = self._store.dist(x, centers)
                m[x] = int(centers[int(np.argmin(d))])
            out[i] = m
        return out

    def traversal_order(self) -> list[int]:
        """Top level first, then each lower level's new points, ascending id within a level."""
        order: list[int] = []
        seen: set[int] = set()
        for level in reversed(self.levels):
            new = sorted(level - seen)
            order.extend(new)
            seen.update(new)
        return order

    def insert_point(self, coords=None, distances=None) -> int:
        """Add a point and return its id.

        The point joins level ``j`` for ``j = 1, 2, ...`` for as long as no
        center of level ``j`` lies within ``2**(j - 1)``; new top levels are
        added when it ends up uncovered at the top.
        """
        ids = np.array(sorted(self.points), dtype=int)
        q = self._store.add(coords, distances)
        if ids.size and np.any(self._store.dist(q, ids) == 0):
            # roll back the store so ids stay dense
            self._store.size -= 1
            if self._store.matrix is not None:
                self._store.matrix = self._store.matrix[:-1, :-1]
            else:
                self._store.coords = self._store.coords[:-1]
            raise DuplicatePoint("point coincides with an existing point")
        self.levels[0].add(q)
        j = 1
        while j < len(self.levels) and not self._covered(q, j):
            self.levels[j].add(q)
            j += 1
        self._extend_and_trim()
        return q

    def delete_point(self, pid: int) -> None:
        """Remove a point; centers of the level below are promoted in ascending id order to restore covering."""
        if pid not in self.points:
            raise UnknownPoint(pid)
        for level in self.levels:
            level.discard(pid)
        for j in range(1, len(self.levels)):
            for x in sorted(self.levels[j - 1] - self.levels[j]):
                if not self._covered(x, j):
                    self.levels[j].add(x)
        self._extend_and_trim()

    def check_invariants(self) -> list[str]:
        """Directly verify nesting, covering, independence, minimality and height."""
        problems = []
        for i in range(1, len(self.levels)):
            lower, upper, r = self.levels[i - 1], self.levels[i], radius(i)
            if not upper <= lower:
                problems.append(f"level {i} not nested in level {i - 1}")
            rows, centers = sorted(lower), sorted(upper)
            cover = self._store.submatrix_between(rows, centers) <= r
            count = cover.sum(axis=1)
            for x in np.array(rows)[count == 0]:
                problems.append(f"level {i}: point {x} uncovered")
            if len(centers) > 1:
                D = self._store.submatrix(centers)
                np.fill_diagonal(D, np.inf)
                if np.any(D <= r):
                    problems.append(f"level {i}: centers within radius {r}")
            # a center is removable if every point it covers has a second cover
            for j, c in enumerate(centers):
                if np.all(count[cover[:, j]] >= 2):
                    problems.append(f"level {i}: center {c} removable")
        if len(self.levels[-1]) > 1:
            problems.append("top level is not a singleton")
        if self.height > height_bound(self.diameter()):
            problems.append(f"height {self.height} exceeds bound {height_bound(self.diameter())}")
        return problems

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "levels": [sorted(int(x) for x in s) for s in self.levels],
            "radii": self.radii,
            "parent": {str(i): {str(k): v for k, v in m.items()} for i, m in self.parent().items()},
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def height_bound(diameter: float) -> int:
    """Levels needed until the radius reaches the diameter: ceil(log2 diam) + 1, at least 1."""
    if diameter <= 0:
        return 0
    return max(math.ceil(math.log2(diameter)) + 1, 1)


def build_hierarchy(space: MetricSpace) -> CoverHierarchy:
    """Build levels bottom-up by an ascending-id greedy scan at each radius."""
    h = CoverHierarchy(_DistanceStore(space), [set(range(space.n))])
    h._extend_and_trim()
    return h


def approx_magnitude_topdown(h: CoverHierarchy, t: float = 1.0, budget: int | None = None) -> SelectionCurve:
    """Magnitude after each point of the top-down traversal, up to ``budget`` points."""
    order = h.traversal_order()
    budget = len(order) if budget is None else budget
    if not 0 <= budget <= len(order):
        raise InputError(f"budget must be in [0, {len(order)}]")
    order = order[:budget]
    if not order:
        return SelectionCurve(method="hierarchy")
    local = build_space_from_dist(h._store.submatrix(order))
    curve = ordered_curve(local, t, range(len(order)), method="hierarchy")
    curve.point_ids = [order[i] for i in curve.point_ids]
    return curve
