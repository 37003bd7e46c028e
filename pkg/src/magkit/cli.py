"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 solver error, 3 verification failure.
Errors are written to stderr as ``{"code": ..., "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from contextlib import contextmanager
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .clustering import cluster, default_thetas, persistence_sweep
from .errors import InputError, MagnitudeError, SolverError
from .exact import magnitude_1d_estimate, magnitude_exact
from .hierarchy import approx_magnitude_topdown, build_hierarchy
from .io import file_digest, read_dist, read_points, write_weights
from .iterative import SolverConfig, solve_gd, solve_iter_norm
from .metric import build_space, build_space_from_dist, similarity
from .scale import magnitude_dimension, magnitude_function, sqrt_r_scale
from .subset import greedy_select, random_select
from .verify import run_suites

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@contextmanager
def pinned_threads(n: int | None):
    if n is None:
        yield None
        return
    from threadpoolctl import threadpool_limits

    with threadpool_limits(limits=n):
        yield n


def _threads(args) -> int | None:
    if getattr(args, "threads", None) is not None:
        return args.threads
    env = os.environ.get("MAGKIT_THREADS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"MAGKIT_THREADS must be an integer, got {env!r}") from exc
    return None


def _load_space(args):
    if args.dist:
        return build_space_from_dist(read_dist(args.input))
    return build_space(read_points(args.input), metric=args.metric, duplicates=args.duplicates)


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, default=_json_default)
    print(text, file=out or sys.stdout)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def _solver_cfg(args) -> SolverConfig:
    return SolverConfig(
        max_iters=args.max_iters,
        tol=args.tol,
        learning_rate=args.lr,
        momentum=args.momentum,
        batch_size=args.batch_size,
        rng_seed=args.seed,
    )


def run_record(command, args, est, config) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "input_digest": file_digest(args.input),
        "config": config,
        "method": est.method,
        "magnitude": est.value,
        "pmag": est.pmag,
        "iterations": est.iterations,
        "residual": est.residual_norm,
        "wall_time": est.wall_time,
        "converged": est.converged,
        "flags": list(est.flags),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def cmd_compute(args) -> int:
    space = _load_space(args)
    config = {
        "scale": args.scale,
        "metric": None if args.dist else args.metric,
        "threads": _threads(args),
    }
    if args.method == "closed-1d":
        if space.points is None or space.points.shape[1] != 1:
            raise UsageError("closed-1d needs a one-column point file")
        xs = np.sort(space.points[:, 0]) * args.scale
        est, w = magnitude_1d_estimate(xs), None
    else:
        sim = similarity(space, args.scale)
        if args.method == "exact":
            est, weighting = magnitude_exact(sim)
        else:
            cfg = _solver_cfg(args)
            config.update(tol=cfg.tol, max_iters=cfg.max_iters, seed=cfg.rng_seed)
            if args.method == "iter-norm":
                est, weighting, trace = solve_iter_norm(sim, cfg)
            else:
                config.update(learning_rate=cfg.learning_rate, momentum=cfg.momentum, batch_size=cfg.batch_size)
                est, weighting, trace = solve_gd(sim, cfg)
            if args.trace:
                trace.to_csv(args.trace)
        w = weighting.w
    if args.weights:
        if w is None:
            raise UsageError("--weights is not available for closed-1d")
        write_weights(args.weights, w)
    _emit(run_record("compute", args, est, config))
    return EXIT_OK


def _grid(args, space):
    if args.preset == "sqrt-r":
        if args.r is None:
            raise UsageError("--preset sqrt-r needs --r")
        return np.array([sqrt_r_scale(args.r)])
    if args.t_steps is not None and args.t_steps < 1:
        raise UsageError("--t-steps must be >= 1")
    if (args.t_min is None) != (args.t_max is None):
        raise UsageError("give both --t-min and --t-max")
    steps = args.t_steps or 32
    if args.t_min is None:
        from .scale import default_grid

        return default_grid(space, steps)
    if not 0 < args.t_min <= args.t_max:
        raise UsageError("need 0 < t-min <= t-max")
    if steps == 1:
        return np.array([args.t_min])
    return np.geomspace(args.t_min, args.t_max, steps)


def cmd_function(args) -> int:
    space = _load_space(args)
    sweep = magnitude_function(space, _grid(args, space), method=args.method.replace("-", "_"))
    if args.out:
        sweep.to_csv(args.out)
    out = {
        "schema_version": SCHEMA_VERSION,
        "command": "function",
        "input_digest": file_digest(args.input),
        "scales": sweep.scales,
        "values": sweep.values,
        "errors": sweep.errors,
    }
    if args.dimension:
        try:
            lo, hi = (int(x) if x else None for x in args.dimension.split(":"))
        except ValueError as exc:
            raise UsageError("--dimension takes START:STOP indices") from exc
        out["dimension"] = magnitude_dimension(sweep, slice(lo, hi))
    _emit(out)
    return EXIT_OK


def cmd_subset(args) -> int:
    space = _load_space(args)
    start = time.perf_counter()
    if args.method == "greedy":
        curve = greedy_select(space, args.scale, args.tolerance, args.budget, args.seed)
    elif args.method == "hierarchy":
        h = build_hierarchy(space)
        if args.dump_hierarchy:
            h.to_json(args.dump_hierarchy)
        curve = approx_magnitude_topdown(h, args.scale, args.budget)
    else:
        if args.sizes:
            try:
                sizes = [int(s) for s in args.sizes.split(",")]
            except ValueError as exc:
                raise UsageError("--sizes takes a comma-separated list of integers") from exc
        else:
            sizes = list(range(1, (args.budget or space.n) + 1))
        curve = random_select(space, args.scale, sizes, args.seed)
    elapsed = time.perf_counter() - start
    if args.out:
        curve.to_csv(args.out)
    _emit(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "subset",
            "input_digest": file_digest(args.input),
            "method": args.method,
            "scale": args.scale,
            "size": curve.stopped_at,
            "magnitude": curve.final,
            "wall_time": elapsed,
            "curve": [list(r) for r in curve.rows()],
        }
    )
    return EXIT_OK


def cmd_hierarchy(args) -> int:
    h = build_hierarchy(_load_space(args))
    text = h.to_json(args.out)
    if not args.out:
        print(text)
    return EXIT_OK


def cmd_cluster(args) -> int:
    space = _load_space(args)
    if (args.theta is None) == (not args.sweep):
        raise UsageError("give exactly one of --theta or --sweep")
    if args.theta is not None:
        res = cluster(space, args.theta, args.seed)
        if args.out:
            res.to_csv(args.out)
        if args.trace:
            res.to_json(args.trace)
        _emit(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "cluster",
                "input_digest": file_digest(args.input),
                "threshold": args.theta,
                "cluster_count": res.cluster_count,
                "assignment": res.assignment,
            }
        )
        return EXIT_OK
    if not 0 < args.theta_min <= args.theta_max or args.theta_steps < 1:
        raise UsageError("need 0 < theta-min <= theta-max and theta-steps >= 1")
    thetas = np.geomspace(args.theta_min, args.theta_max, args.theta_steps)
    prof = persistence_sweep(space, thetas, args.seed)
    if args.out:
        prof.to_csv(args.out)
    _emit(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "cluster",
            "input_digest": file_digest(args.input),
            "thresholds": prof.thresholds,
            "counts": prof.counts,
            "persistent_count": prof.persistent_count,
        }
    )
    return EXIT_OK


def bench_table(sizes, methods, repeats, seed, iters=50, lr=0.01, exact_limit=12000):
    """Rows of (size, method, mean_time, std_time, mean_abs_rel_error) on N(0, I_2) clouds."""
    rows = []
    for n in sizes:
        clouds = [np.random.default_rng(seed + r).standard_normal((n, 2)) for r in range(repeats)]
        sims = [similarity(build_space(X), 1.0) for X in clouds]
        truth = [magnitude_exact(s)[0].value for s in sims] if n <= exact_limit else None
        for method in methods:
            times, errs = [], []
            for r, sim in enumerate(sims):
                if method == "exact":
                    est, _ = magnitude_exact(sim)
                elif method == "iter-norm":
                    est, _, _ = solve_iter_norm(sim, SolverConfig(max_iters=iters, record_trace=False))
                elif method == "gd":
                    est, _, _ = solve_gd(sim, SolverConfig(max_iters=iters, learning_rate=lr, record_trace=False))
                else:
                    raise UsageError(f"unknown bench method {method!r}")
                times.append(est.wall_time)
                if truth is not None:
                    errs.append(abs(est.value - truth[r]) / truth[r])
            rows.append(
                {
                    "size": n,
                    "method": method,
                    "mean_time": float(np.mean(times)),
                    "std_time": float(np.std(times)),
                    "mean_abs_rel_error": float(np.mean(errs)) if errs else None,
                }
            )
    return rows


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError as exc:
        raise UsageError("--sizes takes a comma-separated list of integers") from exc
    methods = args.methods.split(",")
    if any(m not in ("exact", "iter-norm", "gd") for m in methods) or args.repeats < 1 or min(sizes) < 1:
        raise UsageError("bad --methods, --sizes or --repeats")
    threads = _threads(args) or 1
    with pinned_threads(threads):
        rows = bench_table(sizes, methods, args.repeats, args.seed, args.iters, args.lr)
    if args.out:
        import csv

        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    _emit({"schema_version": SCHEMA_VERSION, "command": "bench", "threads": threads, "rows": rows})
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suites(args.suite, fuzz=args.fuzz, seed=args.seed)
    _emit(report)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _add_input(p):
    p.add_argument("input", help="CSV file: points, or a distance matrix with --dist")
    p.add_argument("--dist", action="store_true", help="input is an n x n distance matrix")
    p.add_argument("--metric", choices=["euclidean", "manhattan"], default="euclidean")
    p.add_argument("--duplicates", choices=["reject", "dedup"], default="reject")
    p.add_argument("--threads", type=int, default=None, help="BLAS thread count (env MAGKIT_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="magkit", description="Metric magnitude of finite point clouds.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="magnitude at one scale")
    _add_input(p)
    p.add_argument("--method", choices=["exact", "iter-norm", "gd", "closed-1d"], default="exact")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", help="write the weighting CSV here")
    p.add_argument("--trace", help="write the convergence trace CSV here (iterative methods)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("function", help="magnitude function over a scale grid")
    _add_input(p)
    p.add_argument("--method", choices=["exact", "iter-norm", "gd"], default="exact")
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--t-steps", type=int)
    p.add_argument("--preset", choices=["sqrt-r"])
    p.add_argument("--r", type=int, help="training-set size for --preset sqrt-r")
    p.add_argument("--dimension", help="START:STOP index window for the slope estimate")
    p.add_argument("--out", help="sweep CSV path")
    p.set_defaults(func=cmd_function)

    p = sub.add_parser("subset", help="subset-selection curve")
    _add_input(p)
    p.add_argument("--method", choices=["greedy", "hierarchy", "random"], default="greedy")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--budget", type=int)
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.add_argument("--sizes", help="comma-separated sizes (random)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="curve CSV path")
    p.add_argument("--dump-hierarchy", help="hierarchy JSON path (hierarchy method)")
    p.set_defaults(func=cmd_subset)

    p = sub.add_parser("hierarchy", help="dump the discrete center hierarchy as JSON")
    _add_input(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("cluster", help="magnitude clustering")
    _add_input(p)
    p.add_argument("--theta", type=float)
    p.add_argument("--sweep", action="store_true", help="threshold persistence sweep")
    th = default_thetas()
    p.add_argument("--theta-min", type=float, default=float(th[0]))
    p.add_argument("--theta-max", type=float, default=float(th[-1]))
    p.add_argument("--theta-steps", type=int, default=len(th))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="assignment CSV (or profile CSV with --sweep)")
    p.add_argument("--trace", help="trace JSON path")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("bench", help="timing/accuracy table on N(0, I_2) clouds")
    p.add_argument("--sizes", default="1000,2000")
    p.add_argument("--methods", default="exact,iter-norm")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="numerical checks of the submodularity results")
    p.add_argument("suite", choices=["counterexample", "submod-1d", "submod-3pt", "submod-rd", "all"])
    p.add_argument("--fuzz", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        with pinned_threads(_threads(args) if args.command != "bench" else None):
            return args.func(args)
    except SolverError as exc:
        _emit({"code": exc.code, "message": str(exc)}, sys.stderr)
        return EXIT_SOLVER
    except (MagnitudeError, OSError) as exc:
        code = exc.code if isinstance(exc, MagnitudeError) else type(exc).__name__
        _emit({"code": code, "message": str(exc)}, sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
