"""JSON run-config ingestion.

Config schema (all expressions are strings in the variable x):

    n            int, system dimension
    interval     [a, b]
    x0           base point (must be a grid node)
    c            n numbers
    A            n x n expression strings  -- or --  H and Z, same shape
    F            optional n expression strings
    split        {"strategy": "user"|"constant_mean"|"constant_at_point"|"diagonal",
                  "point": number?}
    fundamental  {"mode": "constant_h"} or {"mode": "columns", "columns": [[...], ...]}
    options      {"max_terms", "abs_tol", "rel_tol", "grid_nodes"}
    outputs      subset of ["solution-csv", "terms-csv", "diagnostics-json",
                            "plot-data", "figures"]
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import expr as ex
from . import problem as pb
from .fundmat import FundamentalMatrixTable, fundamental_constant_h, fundamental_user
from .grid import Grid
from .series import SeriesOptions

KNOWN_OUTPUTS = ("solution-csv", "terms-csv", "diagnostics-json", "plot-data", "figures")

# when the built-in provider is asked for constant H, its samples may vary
# across the grid by at most this much
CONSTANT_H_TOL = 1e-12


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    problem: pb.Problem
    options: SeriesOptions
    fundamental_mode: str  # "constant_h" | "columns"
    fundamental_columns: Optional[list[ex.VectorExpr]] = None
    outputs: list[str] = field(default_factory=list)


def _require(obj: dict, key: str):
    if key not in obj:
        raise ConfigError(f"missing config field '{key}'")
    return obj[key]


def _parse_matrix_field(obj, name: str, n: int) -> ex.MatrixExpr:
    if (not isinstance(obj, list) or len(obj) != n
            or any(not isinstance(r, list) or len(r) != n for r in obj)):
        raise ConfigError(f"field '{name}' must be an {n}x{n} array of strings")
    try:
        return ex.parse_matrix(obj)
    except ex.ExprError as err:
        raise ConfigError(f"field '{name}': {err}") from err


def parse_run_config(obj: dict) -> RunConfig:
    try:
        n = int(_require(obj, "n"))
    except (TypeError, ValueError):
        raise ConfigError("field 'n' must be an integer") from None
    if n < 1:
        raise ConfigError("field 'n' must be >= 1")

    interval = _require(obj, "interval")
    if not isinstance(interval, list) or len(interval) != 2:
        raise ConfigError("field 'interval' must be [a, b]")
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ConfigError(f"field 'interval': need a < b, got [{lo}, {hi}]")

    x0 = float(_require(obj, "x0"))
    c_list = _require(obj, "c")
    if not isinstance(c_list, list) or len(c_list) != n:
        raise ConfigError(f"field 'c' must hold {n} numbers")
    c = np.array([float(v) for v in c_list])

    opts_obj = obj.get("options", {})
    try:
        options = SeriesOptions(
            max_terms=int(opts_obj.get("max_terms", 50)),
            abs_tol=float(opts_obj.get("abs_tol", 1e-10)),
            rel_tol=float(opts_obj.get("rel_tol", 1e-8)),
            grid_nodes=int(opts_obj.get("grid_nodes", 1001)),
        )
    except ValueError as err:
        raise ConfigError(f"field 'options': {err}") from err
    grid = Grid(lo, hi, options.grid_nodes)

    split_obj = obj.get("split", {})
    strategy = split_obj.get("strategy")
    a_expr = None
    if "H" in obj and "Z" in obj:
        if strategy not in (None, pb.USER):
            raise ConfigError("explicit H and Z require split strategy 'user'")
        h_expr = _parse_matrix_field(obj["H"], "H", n)
        z_expr = _parse_matrix_field(obj["Z"], "Z", n)
        if "A" in obj:
            a_expr = _parse_matrix_field(obj["A"], "A", n)
    elif "A" in obj:
        a_expr = _parse_matrix_field(obj["A"], "A", n)
        strategy = strategy or pb.CONSTANT_MEAN
        if strategy == pb.USER:
            raise ConfigError("split strategy 'user' requires explicit H and Z")
        point = split_obj.get("point")
        try:
            h_expr, z_expr = pb.split_coefficient(
                a_expr, strategy, grid,
                point=float(point) if point is not None else None,
            )
        except (ValueError, ex.ExprError) as err:
            raise ConfigError(f"split failed: {err}") from err
    else:
        raise ConfigError("config must define either 'A' or both 'H' and 'Z'")

    forcing = None
    if "F" in obj:
        f_list = obj["F"]
        if not isinstance(f_list, list) or len(f_list) != n:
            raise ConfigError(f"field 'F' must hold {n} expression strings")
        try:
            forcing = ex.parse_vector(f_list)
        except ex.ExprError as err:
            raise ConfigError(f"field 'F': {err}") from err

    try:
        prob = pb.Problem(
            n=n, h=h_expr, z=z_expr, forcing=forcing,
            interval=(lo, hi), x0=x0, c=c, a=a_expr,
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err

    fund_obj = obj.get("fundamental", {"mode": "constant_h"})
    mode = fund_obj.get("mode", "constant_h")
    columns = None
    if mode == "columns":
        cols_obj = fund_obj.get("columns")
        if (not isinstance(cols_obj, list) or len(cols_obj) != n
                or any(not isinstance(col, list) or len(col) != n for col in cols_obj)):
            raise ConfigError("fundamental columns must be n lists of n strings")
        try:
            columns = [ex.parse_vector(col) for col in cols_obj]
        except ex.ExprError as err:
            raise ConfigError(f"fundamental columns: {err}") from err
    elif mode != "constant_h":
        raise ConfigError(f"unknown fundamental mode {mode!r}")

    outputs = obj.get("outputs", [])
    for name in outputs:
        if name not in KNOWN_OUTPUTS:
            raise ConfigError(
                f"unknown output {name!r}; known: {', '.join(KNOWN_OUTPUTS)}"
            )

    return RunConfig(
        problem=prob, options=options,
        fundamental_mode=mode, fundamental_columns=columns,
        outputs=list(outputs),
    )


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path} is not valid JSON: {err}") from err
    if not isinstance(obj, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return parse_run_config(obj)


def build_table(rc: RunConfig) -> tuple[Grid, FundamentalMatrixTable]:
    """Grid plus fundamental-matrix table for a parsed run config."""
    lo, hi = rc.problem.interval
    grid = Grid(lo, hi, rc.options.grid_nodes)
    if rc.fundamental_mode == "columns":
        return grid, fundamental_user(rc.fundamental_columns, grid)
    h0 = ex.eval_matrix(rc.problem.h, rc.problem.x0)
    spread = max(
        float(np.max(np.abs(ex.eval_matrix(rc.problem.h, x) - h0)))
        for x in grid.nodes
    )
    scale = max(1.0, float(np.max(np.abs(h0))))
    if spread > CONSTANT_H_TOL * scale:
        raise ConfigError(
            "H varies over the grid; the built-in provider only handles constant H "
            "-- supply fundamental columns instead"
        )
    return grid, fundamental_constant_h(h0, grid, rc.problem.x0)


def reduce_config(obj: dict) -> dict:
    """Turn a single nth-order-equation config into a system run config.

    Input keys: order, coefficients (a1..an), optional forcing, plus any of
    interval / x0 / c / split / fundamental / options / outputs to pass
    through (with defaults filled so the result runs as-is).
    """
    try:
        order = int(_require(obj, "order"))
    except (TypeError, ValueError):
        raise ConfigError("field 'order' must be an integer") from None
    coeffs_obj = _require(obj, "coefficients")
    if not isinstance(coeffs_obj, list) or len(coeffs_obj) != order:
        raise ConfigError(f"field 'coefficients' must hold {order} strings")
    try:
        coeffs = tuple(ex.parse(s) for s in coeffs_obj)
        forcing = ex.parse(obj["forcing"]) if obj.get("forcing") else None
        spec = pb.CompanionSpec(order=order, coefficients=coeffs, forcing=forcing)
    except (ex.ExprError, ValueError) as err:
        raise ConfigError(str(err)) from err

    a_expr, f_expr = pb.companion_reduce(spec)
    out = {
        "n": order,
        "interval": obj.get("interval", [0.0, 1.0]),
        "x0": obj.get("x0", obj.get("interval", [0.0, 1.0])[0]),
        "c": obj.get("c", [1.0] * order),
        "A": [[ex.to_source(e) for e in row] for row in a_expr.entries],
        "split": obj.get("split", {"strategy": pb.CONSTANT_MEAN}),
        "fundamental": obj.get("fundamental", {"mode": "constant_h"}),
        "options": obj.get("options", {}),
        "outputs": obj.get("outputs", ["solution-csv", "diagnostics-json"]),
    }
    if f_expr is not None:
        out["F"] = [ex.to_source(e) for e in f_expr.entries]
    return out
