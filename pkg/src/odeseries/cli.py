"""Command-line front end: solve, compare, reduce.

Exit codes for `solve` (and `compare` on failure paths):
    0  converged / comparison passed
    1  input or config error
    2  term budget exhausted (or comparison above threshold)
    3  divergence detected
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import config as cfg
from . import oracle, report
from .expr import ExprError
from .fundmat import WronskianError
from .problem import validate
from .series import StopReason, solve_series

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MAX_TERMS = 2
EXIT_DIVERGING = 3

_STOP_EXIT = {
    StopReason.TOLERANCE_MET: EXIT_OK,
    StopReason.MAX_TERMS_REACHED: EXIT_MAX_TERMS,
    StopReason.DIVERGING: EXIT_DIVERGING,
}


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to the JSON run config")
    p.add_argument("--terms", type=int, help="override options.max_terms")
    p.add_argument("--grid", type=int, help="override options.grid_nodes")
    p.add_argument("--abs-tol", type=float, help="override options.abs_tol")
    p.add_argument("--rel-tol", type=float, help="override options.rel_tol")
    p.add_argument("--out", default=".", help="output directory (default: cwd)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odeseries",
        description="Series solver for y' = A(x) y + F(x) via an H+Z split.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run the series solver, write outputs")
    _add_common_flags(p_solve)

    p_compare = sub.add_parser(
        "compare", help="solve and cross-check against the RK4 integrator"
    )
    _add_common_flags(p_compare)
    p_compare.add_argument(
        "--threshold", type=float, default=1e-3,
        help="largest acceptable sup difference (default 1e-3)",
    )

    p_reduce = sub.add_parser(
        "reduce", help="turn an nth-order-equation config into a system config"
    )
    p_reduce.add_argument("--config", required=True)
    p_reduce.add_argument("--out", default=".", help="output directory")
    return parser


def _load_with_overrides(args) -> cfg.RunConfig:
    import json

    path = Path(args.config)
    try:
        obj = json.loads(path.read_text())
    except OSError as err:
        raise cfg.ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise cfg.ConfigError(f"config {path} is not valid JSON: {err}") from err
    if not isinstance(obj, dict):
        raise cfg.ConfigError("config must be a JSON object")
    opts = dict(obj.get("options", {}))
    if args.terms is not None:
        opts["max_terms"] = args.terms
    if args.grid is not None:
        opts["grid_nodes"] = args.grid
    if args.abs_tol is not None:
        opts["abs_tol"] = args.abs_tol
    if args.rel_tol is not None:
        opts["rel_tol"] = args.rel_tol
    obj["options"] = opts
    return cfg.parse_run_config(obj)


def _prepare(rc: cfg.RunConfig):
    grid, table = cfg.build_table(rc)
    vr = validate(rc.problem, grid)
    if not vr.ok:
        raise cfg.ConfigError("; ".join(vr.errors))
    for note in vr.infos:
        print(f"note: {note}", file=sys.stderr)
    return grid, table


def cmd_solve(args) -> int:
    rc = _load_with_overrides(args)
    grid, table = _prepare(rc)
    started = time.perf_counter()
    solution = solve_series(rc.problem, table, rc.options)
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if "solution-csv" in rc.outputs:
        report.write_solution_csv(outdir / "solution.csv", solution.partial_sum)
    if "terms-csv" in rc.outputs:
        report.write_terms_csv(outdir / "terms.csv", solution.terms)
    if "diagnostics-json" in rc.outputs:
        report.write_diagnostics_json(
            outdir / "diagnostics.json", solution, grid, elapsed_ms
        )
    if "plot-data" in rc.outputs:
        report.write_plot_data(outdir / "terms.dat", solution.terms)
    if "figures" in rc.outputs:
        report.render_figures(outdir, solution)

    print(
        f"{solution.stop_reason.value}: {len(solution.terms)} terms, "
        f"residual_sup = {solution.residual_sup:.3e}, {elapsed_ms:.1f} ms"
    )
    return _STOP_EXIT[solution.stop_reason]


def cmd_compare(args) -> int:
    rc = _load_with_overrides(args)
    grid, table = _prepare(rc)
    solution = solve_series(rc.problem, table, rc.options)

    k0 = grid.index_of(rc.problem.x0)
    # series value at x0: M(x0) c (the forcing integral vanishes there)
    y0 = table.m[k0] @ rc.problem.c
    rk4 = oracle.rk4_solve(rc.problem, grid, y0)
    cmp = oracle.compare(solution.partial_sum.values, rk4.values)
    print(
        f"{solution.stop_reason.value}: sup_diff = {cmp.sup_diff:.6e} "
        f"(threshold {args.threshold:.1e})"
    )
    if solution.stop_reason is StopReason.DIVERGING:
        return EXIT_DIVERGING
    return EXIT_OK if cmp.sup_diff <= args.threshold else EXIT_MAX_TERMS


def cmd_reduce(args) -> int:
    import json

    path = Path(args.config)
    try:
        obj = json.loads(path.read_text())
    except OSError as err:
        raise cfg.ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise cfg.ConfigError(f"config {path} is not valid JSON: {err}") from err
    out_obj = cfg.reduce_config(obj)
    cfg.parse_run_config(dict(out_obj))  # the emitted config must run as-is
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    out_path = outdir / f"{path.stem}-system.json"
    out_path.write_text(json.dumps(out_obj, indent=2) + "\n")
    print(str(out_path))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"solve": cmd_solve, "compare": cmd_compare, "reduce": cmd_reduce}
    try:
        return handlers[args.command](args)
    except (cfg.ConfigError, ExprError, WronskianError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except oracle.BlowUpError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DIVERGING


if __name__ == "__main__":
    sys.exit(main())
