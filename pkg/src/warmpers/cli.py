"""Command-line front end.

Subcommands: compute (barcode + optional reusable state), update (warm-start
from a state file), synth (deterministic synthetic inputs), bench
(perturbation suites reported as CSV), optimize (gradient ascent on the
persistence loss of a point cloud).

Exit codes: 0 success, 1 usage error, 2 input parse error, 3 structural
error.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional

from . import bench as bench_mod
from .errors import DegenerateGradientError, InputError, StructuralError, UsageError
from .field import PrimeField
from .fileio import (read_distance_matrix, read_image, read_points, write_image,
                     write_points)
from .filtration import (ENCLOSING, FilteredComplex, diff_filtrations,
                         lower_star_cubical, lower_star_freudenthal,
                         rips_filtration)
from .persistence import (compute_persistence, format_barcode, loss_gradient_rips,
                          persistence_loss, update_persistence)
from .reduction import OperationCounters
from .state import load_state, save_state
from .synth import synth, uniform_square_points

COMPLEX_KINDS = ("freudenthal", "cubical", "rips")


def _parse_rmax(text: str):
    if text == "enc":
        return ENCLOSING
    if text == "inf":
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"--rmax must be a number, 'enc', or 'inf', got {text!r}")


def _build_complex(kind: str, path: str, max_dim: int, rmax, use_dist: bool) -> FilteredComplex:
    if kind == "rips":
        if use_dist:
            return rips_filtration(dist=read_distance_matrix(path), r_max=rmax,
                                   max_dim=max_dim)
        return rips_filtration(read_points(path), r_max=rmax, max_dim=max_dim)
    image = read_image(path)
    if kind == "freudenthal":
        return lower_star_freudenthal(image)
    if kind == "cubical":
        return lower_star_cubical(image)
    raise UsageError(f"unknown complex kind {kind!r}")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_compute(args) -> int:
    rmax = _parse_rmax(args.rmax)
    cx = _build_complex(args.complex, args.input, args.max_dim, rmax, args.dist)
    keep_basis = args.basis or args.state is not None
    counters = OperationCounters()
    state, barcode = compute_persistence(
        cx, mode=args.mode, use_clearing=args.clearing, keep_basis=keep_basis,
        fld=PrimeField(args.field), counters=counters)
    _emit(format_barcode(barcode, include_zero=args.include_zero_bars), args.out)
    if args.state:
        recipe = {"complex": args.complex, "max_dim": args.max_dim,
                  "rmax": args.rmax, "field": args.field, "dist": bool(args.dist),
                  "include_zero_bars": bool(args.include_zero_bars)}
        save_state(args.state, state, recipe, fmt=args.state_format)
    return 0


def _report_line(report, timings: bool) -> str:
    return ",".join(report.row(timings))


def cmd_update(args) -> int:
    state, recipe = load_state(args.state)
    if not recipe:
        raise UsageError(f"state {args.state} carries no construction recipe")
    rmax = _parse_rmax(recipe["rmax"])
    new_cx = _build_complex(recipe["complex"], args.input, recipe["max_dim"],
                            rmax, recipe.get("dist", False))
    diff = diff_filtrations(state.complex, new_cx, state.mode, state.field)
    counters = OperationCounters()
    import time
    t0 = time.perf_counter()
    new_state, barcode = update_persistence(state, new_cx, counters=counters, diff=diff)
    wall_ms = (time.perf_counter() - t0) * 1e3
    _emit(format_barcode(barcode, include_zero=recipe.get("include_zero_bars", False)),
          args.out)
    out_state = args.state_out or args.state
    save_state(out_state, new_state, recipe, fmt=args.state_format)
    if args.report:
        rep = bench_mod.TrialReport(
            "update", 0, 0.0, diff.normalized_kendall_tau(), diff.n_inserted(),
            diff.n_deleted(), diff.add_fraction(), diff.del_fraction(),
            counters.column_additions, counters.pivot_eliminations,
            counters.swaps, wall_ms if args.timings else None)
        _append_report(args.report, [rep], args.timings)
    return 0


def _append_report(path: str, reports, timings: bool) -> None:
    import os
    text = bench_mod.report_csv(reports, timings=timings)
    header, body = text.split("\n", 1)
    if path == "-":
        sys.stdout.write(text)
        return
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    with open(path, "a") as fh:
        if not exists:
            fh.write(header + "\n")
        fh.write(body)


def cmd_synth(args) -> int:
    data = synth(args.kind, n=args.n, sigma=args.sigma, seed=args.seed)
    if args.kind in ("s2d", "s3d"):
        write_image(args.out, data)
    else:
        write_points(args.out, data)
    return 0


def cmd_bench(args) -> int:
    reports = bench_mod.run_suite(
        args.suite, trials=args.trials, seed=args.seed, n_points=args.points,
        max_dim=args.max_dim, mode=args.mode, use_clearing=args.clearing,
        grid_n=args.grid, quantile_cap=args.quantile_cap, jobs=args.jobs)
    _emit(bench_mod.report_csv(reports, timings=args.timings), args.out)
    return 0


def cmd_optimize(args) -> int:
    pts = uniform_square_points(args.n, seed=args.seed)
    initial = pts.copy()
    rmax = _parse_rmax(args.rmax)

    def build(points):
        return rips_filtration(points, r_max=rmax, max_dim=args.dim)

    state = None
    losses: List[float] = []
    for step in range(args.steps + 1):
        cx = build(pts)
        if args.update == "warm":
            if state is None:
                state, barcode = compute_persistence(cx, mode=args.mode)
            else:
                state, barcode = update_persistence(state, cx)
        else:
            _, barcode = compute_persistence(cx, mode=args.mode)
        losses.append(persistence_loss(barcode, args.p, args.q, args.i0, args.dim))
        if step == args.steps:
            break
        try:
            grad = loss_gradient_rips(pts, cx, barcode, args.p, args.q, args.i0, args.dim)
        except DegenerateGradientError as exc:
            sys.stderr.write(f"step {step}: degenerate gradient ({exc}); skipping step\n")
            continue
        pts = pts + args.lr * grad
    loss_csv = "step,loss\n" + "".join(f"{i},{v!r}\n" for i, v in enumerate(losses))
    _emit(loss_csv, f"{args.out_prefix}_loss.csv" if args.out_prefix else None)
    if args.out_prefix:
        write_points(f"{args.out_prefix}_initial.txt", initial)
        write_points(f"{args.out_prefix}_final.txt", pts)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warmpers",
        description="Persistent homology with warm-start factorization updates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_compute_flags(p):
        p.add_argument("--mode", choices=("homology", "cohomology"), default="homology")
        p.add_argument("--clearing", action=argparse.BooleanOptionalAction, default=True)
        p.add_argument("--field", type=int, default=2, help="prime field modulus")

    p = sub.add_parser("compute", help="compute a barcode from an input file")
    p.add_argument("input")
    p.add_argument("--complex", choices=COMPLEX_KINDS, required=True)
    common_compute_flags(p)
    p.add_argument("--basis", action=argparse.BooleanOptionalAction, default=False,
                   help="form the basis V (implied by --state)")
    p.add_argument("--max-dim", type=int, default=1, help="top reported dimension (rips)")
    p.add_argument("--rmax", default="enc", help="rips radius: number, 'enc', or 'inf'")
    p.add_argument("--dist", action="store_true", help="input is a distance matrix")
    p.add_argument("--out", default=None, help="barcode file (default stdout)")
    p.add_argument("--state", default=None, help="write a reusable state file")
    p.add_argument("--state-format", choices=("binary", "text"), default="binary")
    p.add_argument("--include-zero-bars", action="store_true")
    p.set_defaults(fn=cmd_compute)

    p = sub.add_parser("update", help="update a stored state to a new input")
    p.add_argument("input")
    p.add_argument("--state", required=True)
    p.add_argument("--state-out", default=None, help="default: overwrite --state")
    p.add_argument("--state-format", choices=("binary", "text"), default="binary")
    p.add_argument("--out", default=None, help="barcode file (default stdout)")
    p.add_argument("--report", default=None, help="append a RunReport CSV row")
    p.add_argument("--timings", action="store_true", help="include wall-clock column")
    p.set_defaults(fn=cmd_update)

    p = sub.add_parser("synth", help="write synthetic images or point clouds")
    p.add_argument("--kind", choices=("s2d", "s3d", "circle", "eight", "sphere2"),
                   required=True)
    p.add_argument("--n", type=int, default=0, help="size (grid side or point count)")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("bench", help="run a perturbation suite, emit CSV")
    p.add_argument("--suite", choices=bench_mod.SUITES, required=True)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--max-dim", type=int, default=1)
    p.add_argument("--grid", type=int, default=32, help="levelset grid side")
    p.add_argument("--mode", choices=("homology", "cohomology"), default=None)
    p.add_argument("--clearing", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--quantile-cap", type=float, default=0.35,
                   help="distance quantile bounding insert/delete suite radii")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timings", action="store_true")
    p.add_argument("--out", default=None, help="CSV file (default stdout)")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("optimize", help="gradient ascent on the persistence loss")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--update", choices=("scratch", "warm"), default="warm")
    p.add_argument("--mode", choices=("homology", "cohomology"), default="cohomology")
    p.add_argument("--rmax", default="enc")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--i0", type=int, default=1)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--out-prefix", default=None,
                   help="write <prefix>_loss.csv and point clouds (default: loss to stdout)")
    p.set_defaults(fn=cmd_optimize)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    except StructuralError as exc:
        sys.stderr.write(f"structural error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
