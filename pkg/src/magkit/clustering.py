"""Magnitude clustering and threshold persistence.

A point joins the cluster whose magnitude it raises least, provided that
increase is below the threshold ``theta``; otherwise it seeds a new cluster.
Distances are first rescaled so the mean pairwise distance is 1, and the
similarity scale is fixed at 1 afterwards.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .bordered import BorderedMagnitude
from .errors import InputError
from .metric import MetricSpace, mean_pairwise_distance, similarity


@dataclass
class ClusteringResult:
    assignment: np.ndarray
    threshold: float
    trace: list = field(default_factory=list)  # (point, cluster, best_increase, merged)
    start_point: int = 0

    @property
    def cluster_count(self) -> int:
        return int(self.assignment.max()) + 1 if self.assignment.size else 0

    def clusters(self) -> list[list[int]]:
        return [np.flatnonzero(self.assignment == c).tolist() for c in range(self.cluster_count)]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["point_id", "cluster_id"])
            writer.writerows((i, int(c)) for i, c in enumerate(self.assignment))

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "threshold": self.threshold,
            "cluster_count": self.cluster_count,
            "start_point": self.start_point,
            "assignment": [int(c) for c in self.assignment],
            "trace": [
                {"point": p, "cluster": c, "best_increase": inc, "merged": m} for p, c, inc, m in self.trace
            ],
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


@dataclass
class PersistenceProfile:
    thresholds: np.ndarray
    counts: np.ndarray

    @property
    def persistent_count(self) -> int:
        """Count with the longest contiguous run of thresholds; ties go to the smaller count."""
        best_len, best = 0, None
        i = 0
        counts = list(self.counts)
        while i < len(counts):
            j = i
            while j + 1 < len(counts) and counts[j + 1] == counts[i]:
                j += 1
            run = j - i + 1
            if run > best_len or (run == best_len and counts[i] < best):
                best_len, best = run, counts[i]
            i = j + 1
        return int(best)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["theta", "cluster_count"])
            writer.writerows((float(t), int(c)) for t, c in zip(self.thresholds, self.counts))


def normalized_similarity(space: MetricSpace) -> np.ndarray:
    mean = mean_pairwise_distance(space)
    if mean <= 0:
        return np.ones((space.n, space.n))
    return similarity(space, 1.0 / mean).zeta


def cluster(space: MetricSpace, theta: float, rng_seed: int = 0, zeta: np.ndarray | None = None) -> ClusteringResult:
    """Run the magnitude clusterer at threshold ``theta``.

    Each of the n-1 rounds picks the (point, cluster) pair with the smallest
    magnitude increase, lowest point id then lowest cluster id on ties.
    """
    if theta < 0:
        raise InputError("theta must be >= 0")
    n = space.n
    if n < 1:
        raise InputError("need at least one point")
    if zeta is None:
        zeta = normalized_similarity(space)
    start = int(np.random.default_rng(rng_seed).integers(n))
    assignment = np.full(n, -1, dtype=int)
    remaining = np.ones(n, dtype=bool)

    groups = [BorderedMagnitude(zeta, track=True)]
    groups[0].add(start)
    assignment[start] = 0
    remaining[start] = False
    trace = []
    for _ in range(n - 1):
        # rows: clusters, columns: points; np.argmin takes the first minimum in
        # column-major order, i.e. lowest point id, then lowest cluster id
        gains = np.stack([g.gains() for g in groups])
        gains[:, ~remaining] = np.inf
        flat = int(np.argmin(gains.T))
        b, c = divmod(flat, len(groups))
        best = float(gains[c, b])
        if best < theta:
            groups[c].add(b)
            assignment[b] = c
            merged = True
        else:
            g = BorderedMagnitude(zeta, track=True)
            g.add(b)
            groups.append(g)
            c = len(groups) - 1
            assignment[b] = c
            merged = False
        remaining[b] = False
        trace.append((int(b), int(c), best, merged))
    return ClusteringResult(assignment, float(theta), trace, start)


def default_thetas(steps: int = 24) -> np.ndarray:
    return np.geomspace(1e-3, 1.0, steps)


def persistence_sweep(space: MetricSpace, thetas=None, rng_seed: int = 0) -> PersistenceProfile:
    thetas = default_thetas() if thetas is None else np.asarray(thetas, dtype=float).ravel()
    if thetas.size == 0 or np.any(thetas < 0) or np.any(np.diff(thetas) < 0):
        raise InputError("thresholds must be non-negative and sorted ascending")
    zeta = normalized_similarity(space)
    counts = np.array([cluster(space, th, rng_seed, zeta=zeta).cluster_count for th in thetas])
    return PersistenceProfile(thetas, counts)
