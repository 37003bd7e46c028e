"""Incremental magnitude of a growing subset by bordering its Cholesky factor.

Adding a point ``s`` with similarity column ``b = zeta[S, s]`` to a set ``S``
with factor ``L L^T = zeta[S, S]`` gives, by block elimination,

    Mag(S + s) = Mag(S) + (1 - b^T w_S)^2 / (1 - b^T zeta_S^{-1} b)

where ``w_S`` is the weighting of ``S``. Writing ``y = L^{-1} b`` and
``z = L^{-1} 1`` the two scalars are ``z . y`` and ``1 - y . y``. For tracked
candidates ``y`` is kept for every point and gets one new entry per addition,
so all marginal gains are refreshed in O(k) each.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import NotPositiveDefinite

# Schur complements below this are treated as a singular extension.
_SCHUR_FLOOR = 1e-300


class BorderedMagnitude:
    """Magnitude of a subset of a fixed similarity matrix, grown point by point.

    Parameters
    ----------
    zeta : ndarray, shape (n, n)
        Similarity matrix of the ambient space.
    track : bool
        Keep ``L^{-1} zeta[S, :]`` for all n points so :meth:`gains` is
        available. Costs O(k n) memory.
    """

    def __init__(self, zeta: np.ndarray, track: bool = True):
        self.zeta = zeta
        self.n = zeta.shape[0]
        self.track = track
        self.members: list[int] = []
        self.in_set = np.zeros(self.n, dtype=bool)
        cap = 2
        self._L = np.zeros((cap, cap))
        self._z = np.zeros(cap)
        self.value = 0.0
        if track:
            self._Y = np.zeros((cap, self.n))
            self._schur = np.ones(self.n)
            self._u = np.zeros(self.n)

    @property
    def k(self) -> int:
        return len(self.members)

    def _grow(self):
        cap = 2 * self._L.shape[0]
        k = self.k
        L = np.zeros((cap, cap))
        L[:k, :k] = self._L[:k, :k]
        self._L = L
        z = np.zeros(cap)
        z[:k] = self._z[:k]
        self._z = z
        if self.track:
            Y = np.zeros((cap, self.n))
            Y[:k] = self._Y[:k]
            self._Y = Y

    def _column(self, s: int) -> tuple[np.ndarray, float, float]:
        """(y, schur, u) for a candidate s against the current set."""
        k = self.k
        if self.track:
            return self._Y[:k, s], float(self._schur[s]), float(self._u[s])
        if k == 0:
            return np.zeros(0), 1.0, 0.0
        b = self.zeta[self.members, s]
        y = scipy.linalg.solve_triangular(self._L[:k, :k], b, lower=True, check_finite=False)
        return y, float(1.0 - y @ y), float(self._z[:k] @ y)

    def gain(self, s: int) -> float:
        """Mag(S + s) - Mag(S)."""
        if self.in_set[s]:
            return 0.0
        _, schur, u = self._column(s)
        return (1.0 - u) ** 2 / max(schur, _SCHUR_FLOOR)

    def gains(self) -> np.ndarray:
        """Marginal gain of every point (0 for members); requires ``track``."""
        if not self.track:
            raise RuntimeError("gains() needs track=True")
        g = (1.0 - self._u) ** 2 / np.maximum(self._schur, _SCHUR_FLOOR)
        g[self.in_set] = 0.0
        return g

    def add(self, s: int) -> float:
        """Add point ``s`` and return the new magnitude."""
        s = int(s)
        if self.in_set[s]:
            raise ValueError(f"point {s} already in the set")
        y, schur, u = self._column(s)
        if not schur > 0:
            raise NotPositiveDefinite(f"adding point {s} makes the subset singular (schur={schur:.3g})")
        k = self.k
        if k + 1 > self._L.shape[0]:
            self._grow()
        delta = np.sqrt(schur)
        self._L[k, :k] = y
        self._L[k, k] = delta
        zk = (1.0 - u) / delta
        self._z[k] = zk
        self.value += zk * zk
        if self.track:
            row = (self.zeta[s] - y @ self._Y[:k]) / delta
            self._Y[k] = row
            self._schur -= row * row
            self._u += zk * row
        self.members.append(s)
        self.in_set[s] = True
        return self.value

    def weights(self) -> np.ndarray:
        """Weighting of the current subset, ordered as :attr:`members`."""
        k = self.k
        if k == 0:
            return np.zeros(0)
        return scipy.linalg.solve_triangular(self._L[:k, :k].T, self._z[:k], lower=False, check_finite=False)
