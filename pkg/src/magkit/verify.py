"""Verification suites behind ``magkit verify``."""

from __future__ import annotations

import time

import numpy as np

from .exact import magnitude_homogeneous_cross, magnitude_exact
from .metric import similarity
from .oracles import (
    check_cross_polytope,
    check_submodular_1d,
    check_submodular_3pt,
    counterexample_gap,
    counterexample_gap_closed_form,
    cross_polytope,
    limit_gap,
)

GAP_RANGE = (7.16, 7.20)
SUITES = ("counterexample", "submod-1d", "submod-3pt", "submod-rd")


def suite_counterexample(D: int = 500, t: float = 5.0) -> dict:
    start = time.perf_counter()
    gap = counterexample_gap(D, t)
    elapsed = time.perf_counter() - start
    closed = counterexample_gap_closed_form(D, t)
    dense = magnitude_exact(similarity(cross_polytope(D, t), 1.0))[0].value
    formula = magnitude_homogeneous_cross(D, t)
    one_dim = max(counterexample_gap(1, s) for s in (0.1, 1.0, 5.0, 40.0))
    limits = {str(s): limit_gap(s) for s in (0.1, 1.0, 5.0)}
    passed = (
        GAP_RANGE[0] <= gap <= GAP_RANGE[1]
        and abs(gap - closed) <= 1e-6
        and abs(dense - formula) <= 1e-6 * formula
        and one_dim <= 1 + 1e-9
        and all(v > 0 for v in limits.values())
    )
    return {
        "passed": bool(passed),
        "D": D,
        "t": t,
        "gap": gap,
        "expected_range": list(GAP_RANGE),
        "gap_closed_form": closed,
        "homogeneous_dense": dense,
        "homogeneous_formula": formula,
        "max_gap_1d": one_dim,
        "limit_gap": limits,
        "seconds": elapsed,
    }


def suite_submod_1d(fuzz: int = 10_000, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    violations, worst = 0, np.inf
    for _ in range(fuzz):
        m = int(rng.integers(1, 9))
        vals = rng.uniform(-10, 10, m + 2)
        if np.unique(vals).size < vals.size:
            continue
        rep = check_submodular_1d(vals[:m], vals[m], vals[m + 1])
        worst = min(worst, rep.slack)
        violations += rep.verdict == "violated"
    # x1, x2 in different gaps of X: slack is exactly zero
    equal = check_submodular_1d([0.0, 5.0, 10.0], 2.0, 7.5)
    same_gap = check_submodular_1d([0.0, 10.0], 4.0, 6.0)
    passed = violations == 0 and abs(equal.slack) <= 1e-10 and same_gap.slack > 0
    return {
        "passed": bool(passed),
        "instances": fuzz,
        "violations": violations,
        "worst_slack": worst,
        "different_gap_slack": equal.slack,
        "same_gap_slack": same_gap.slack,
    }


def random_triangle(rng) -> tuple[float, float, float]:
    d1, d2 = rng.uniform(1e-3, 5.0, 2)
    lo, hi = abs(d1 - d2), d1 + d2
    d3 = rng.uniform(max(lo, 1e-3), hi)
    return float(d1), float(d2), float(d3)


def suite_submod_3pt(fuzz: int = 10_000, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    violations, worst = 0, np.inf
    for _ in range(fuzz):
        rep = check_submodular_3pt(*random_triangle(rng))
        worst = min(worst, rep.slack)
        violations += rep.verdict == "violated"
    return {"passed": violations == 0, "instances": fuzz, "violations": violations, "worst_slack": worst}


def suite_submod_rd(dims=(50, 100, 500), scales=(2.0, 3.0, 5.0)) -> dict:
    """Scan the cross-polytope family; expects at least one violation."""
    found = []
    for D in dims:
        for t in scales:
            rep = check_cross_polytope(D, t)
            if rep.verdict == "violated":
                found.append({"D": D, "t": t, "gap": rep.extra["gap"], "slack": rep.slack})
    return {"passed": bool(found), "violations": found, "scanned": len(dims) * len(scales)}


def run_suites(which: str = "all", fuzz: int = 10_000, seed: int = 0) -> dict:
    names = SUITES if which == "all" else (which,)
    results = {}
    for name in names:
        if name == "counterexample":
            results[name] = suite_counterexample()
        elif name == "submod-1d":
            results[name] = suite_submod_1d(fuzz, seed)
        elif name == "submod-3pt":
            results[name] = suite_submod_3pt(fuzz, seed)
        elif name == "submod-rd":
            results[name] = suite_submod_rd()
        else:
            raise ValueError(f"unknown suite {name!r}")
    return {
        "schema_version": 1,
        "command": "verify",
        "suites": results,
        "passed": all(r["passed"] for r in results.values()),
    }
