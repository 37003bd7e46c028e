"""Independent checks: brute-force subsets, the cross-polytope gap, submodularity."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateValues, InputError, TooLarge, TriangleViolation
from .exact import magnitude_1d, magnitude_exact, magnitude_homogeneous_cross, magnitude_of_dist
from .metric import MetricSpace, build_space, build_space_from_dist, similarity

SLACK_TOL = 1e-9
BRUTE_FORCE_MAX_N = 20


@dataclass
class SubmodularityReport:
    """Slack of f(S+A) + f(S+B) >= f(S+A+B) + f(S); ``holds`` iff slack >= -1e-9."""

    description: str
    mag_with_first: float
    mag_with_second: float
    mag_with_both: float
    mag_base: float
    extra: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.mag_with_first + self.mag_with_second - self.mag_with_both - self.mag_base

    @property
    def verdict(self) -> str:
        return "holds" if self.slack >= -SLACK_TOL else "violated"

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "values": {
                "with_first": self.mag_with_first,
                "with_second": self.mag_with_second,
                "with_both": self.mag_with_both,
                "base": self.mag_base,
            },
            "slack": self.slack,
            "verdict": self.verdict,
            **self.extra,
        }


def cross_polytope(D: int, t: float) -> MetricSpace:
    """The 2D points ±t e_i in R^D."""
    if D < 1 or not t > 0:
        raise InputError("need D >= 1 and t > 0")
    e = t * np.eye(D)
    return build_space(np.vstack([e, -e]))


def counterexample_gap(D: int, t: float) -> float:
    """Mag(X + origin) - Mag(X) for the cross-polytope, by two dense solves."""
    X = cross_polytope(D, t)
    with_origin = build_space(np.vstack([X.points, np.zeros(D)]))
    before, _ = magnitude_exact(similarity(X, 1.0))
    after, _ = magnitude_exact(similarity(with_origin, 1.0))
    return after.value - before.value


def counterexample_gap_closed_form(D: int, t: float) -> float:
    """Same gap from the homogeneous closed form plus one bordering step.

    The origin is at distance t from all 2D points, and every weight of X is
    Mag(X) / 2D, so the Schur complement is 1 - e^{-2t} Mag(X) and the sum of
    the bordered inverse is ((1 - 2e^{-t}) Mag(X) + 1) / (1 - e^{-2t} Mag(X)).
    """
    m = magnitude_homogeneous_cross(D, t)
    a = math.exp(-t)
    return ((1 - 2 * a) * m + 1) / (1 - a * a * m) - m


def limit_gap(t: float) -> float:
    """(e^t - e^{t sqrt2})^2 / (e^{2t} - e^{t sqrt2}), evaluated without cancellation."""
    if not t > 0:
        raise InputError("t must be positive")
    r2 = math.sqrt(2)
    return math.exp((2 - r2) * t) * math.expm1((r2 - 1) * t) ** 2 / math.expm1((2 - r2) * t)


def _mag1d(values) -> float:
    if len(values) == 0:
        return 0.0
    return magnitude_1d(np.sort(np.asarray(values, dtype=float)))


def check_submodular_1d(xs, x1: float, x2: float) -> SubmodularityReport:
    xs = np.asarray(xs, dtype=float).ravel()
    allv = np.concatenate([xs, [x1, x2]])
    if np.unique(allv).size != allv.size:
        raise DuplicateValues("base points and both additions must be distinct")
    return SubmodularityReport(
        f"1d n={xs.size} x1={x1:g} x2={x2:g}",
        _mag1d(np.append(xs, x1)),
        _mag1d(np.append(xs, x2)),
        _mag1d(np.append(xs, [x1, x2])),
        _mag1d(xs),
    )


def check_submodular_sets(space: MetricSpace, base, first, second, t: float = 1.0, description: str = "") -> SubmodularityReport:
    """Slack for disjoint id sets ``base``, ``first``, ``second`` of ``space``."""
    base, first, second = (list(map(int, s)) for s in (base, first, second))

    def mag(ids):
        if not ids:
            return 0.0
        return magnitude_of_dist(space.dist[np.ix_(ids, ids)], t)

    return SubmodularityReport(
        description or f"sets |S|={len(base)} |A|={len(first)} |B|={len(second)}",
        mag(base + first),
        mag(base + second),
        mag(base + first + second),
        mag(base),
    )


def check_cross_polytope(D: int, t: float) -> SubmodularityReport:
    """Submodularity with S empty, A = origin, B = cross-polytope: violated iff the gap exceeds 1."""
    X = cross_polytope(D, t)
    space = build_space(np.vstack([np.zeros(D), X.points]))
    rep = check_submodular_sets(space, [], [0], range(1, space.n), 1.0, f"cross-polytope D={D} t={t:g}")
    rep.extra["gap"] = rep.mag_with_both - rep.mag_with_second
    return rep


def check_submodular_3pt(d1: float, d2: float, d3: float) -> SubmodularityReport:
    """Worst slack over all pairs of subsets of a 3-point space.

    ``d1 = d(x1, x2)``, ``d2 = d(x1, x3)``, ``d3 = d(x2, x3)``.
    """
    d = sorted((d1, d2, d3))
    if d[0] <= 0:
        raise InputError("distances must be positive")
    if d[2] > d[0] + d[1] + 1e-12 * d[2]:
        raise TriangleViolation(f"{d1:g}, {d2:g}, {d3:g} violate the triangle inequality")
    dist = np.array([[0, d1, d2], [d1, 0, d3], [d2, d3, 0]], dtype=float)
    mags = {}
    for r in range(4):
        for ids in itertools.combinations(range(3), r):
            mags[frozenset(ids)] = magnitude_of_dist(dist[np.ix_(ids, ids)]) if ids else 0.0
    worst, worst_pair = np.inf, None
    for S in mags:
        for T in mags:
            slack = mags[S] + mags[T] - mags[S | T] - mags[S & T]
            if slack < worst:
                worst, worst_pair = slack, (S, T)
    S, T = worst_pair
    base = S & T
    return SubmodularityReport(
        f"3pt d=({d1:g},{d2:g},{d3:g}) S={sorted(S)} T={sorted(T)}",
        mags[S],
        mags[T],
        mags[S | T],
        mags[base],
    )


def brute_force_best_subset(space: MetricSpace, t: float, k: int) -> tuple[tuple[int, ...], float]:
    """Magnitude-maximizing k-subset by full enumeration; lexicographically first on ties."""
    n = space.n
    if n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"n={n} exceeds {BRUTE_FORCE_MAX_N}")
    if not 1 <= k <= n:
        raise InputError(f"k must be in [1, {n}]")
    zeta = similarity(space, t).zeta
    best, best_val = None, -np.inf
    combos = itertools.combinations(range(n), k)
    while True:
        chunk = np.array(list(itertools.islice(combos, 4096)), dtype=int)
        if chunk.size == 0:
            break
        blocks = zeta[chunk[:, :, None], chunk[:, None, :]]
        vals = np.linalg.solve(blocks, np.ones((len(chunk), k, 1)))[..., 0].sum(axis=1)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best = float(vals[i]), tuple(int(x) for x in chunk[i])
    return best, best_val


def triangle_from_dists(d1, d2, d3) -> MetricSpace:
    return build_space_from_dist([[0, d1, d2], [d1, 0, d3], [d2, d3, 0]])
