"""Fundamental matrix of the H-system, tabulated on the grid.

The built-in provider handles constant H via the matrix exponential,
M(x) = exp((x - x_ref) H).  Variable H requires user-supplied solution
columns; there is no general closed form to fall back on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as ex
from .grid import Grid
from .matcore import mat_det, mat_exp, mat_inv

# reject a table when |W| at some node drops below this fraction of max |W|
WRONSKIAN_REL_THRESHOLD = 1e-10

INVERSE_CHECK_TOL = 1e-10


class WronskianError(ValueError):
    """Candidate solution columns are (numerically) linearly dependent."""

    def __init__(self, message: str, node: int, x: float):
        super().__init__(message)
        self.node = node
        self.x = x


@dataclass(frozen=True)
class FundamentalMatrixTable:
    grid: Grid
    m: np.ndarray       # (N, n, n) fundamental matrix per node
    m_inv: np.ndarray   # (N, n, n)
    wronskian: np.ndarray  # (N,)

    @property
    def n(self) -> int:
        return self.m.shape[1]


def _build_table(grid: Grid, m: np.ndarray) -> FundamentalMatrixTable:
    wronskian = np.array([mat_det(mk) for mk in m])
    w_max = float(np.max(np.abs(wronskian)))
    for k, w in enumerate(wronskian):
        if abs(w) < WRONSKIAN_REL_THRESHOLD * w_max or w_max == 0.0:
            raise WronskianError(
                f"Wronskian vanishes at node {k} (x = {grid.nodes[k]}): W = {w:.3e}",
                node=k, x=float(grid.nodes[k]),
            )
    m_inv = np.stack([mat_inv(mk) for mk in m])
    ident = np.eye(m.shape[1])
    for k in range(grid.n_nodes):
        scale = max(1.0, float(np.max(np.abs(m[k]))) * float(np.max(np.abs(m_inv[k]))))
        if np.max(np.abs(m[k] @ m_inv[k] - ident)) > INVERSE_CHECK_TOL * scale:
            raise WronskianError(
                f"inverse check failed at node {k}", node=k, x=float(grid.nodes[k])
            )
    return FundamentalMatrixTable(grid=grid, m=m, m_inv=m_inv, wronskian=wronskian)


def fundamental_constant_h(h: np.ndarray, grid: Grid, x_ref: float) -> FundamentalMatrixTable:
    """Table for constant H: M(x_k) = exp((x_k - x_ref) H)."""
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"H must be square, got shape {h.shape}")
    if not grid.a <= x_ref <= grid.b:
        raise ValueError(f"x_ref = {x_ref} outside [{grid.a}, {grid.b}]")
    m = np.stack([mat_exp((x - x_ref) * h) for x in grid.nodes])
    return _build_table(grid, m)


def fundamental_user(columns: Sequence[ex.VectorExpr], grid: Grid) -> FundamentalMatrixTable:
    """Table from user-supplied solution columns, evaluated nodewise.

    Column j becomes column j of M.  Rejected if the Wronskian falls
    below the relative threshold at any node.
    """
    n = len(columns)
    for j, col in enumerate(columns):
        if col.n != n:
            raise ValueError(f"column {j} has dimension {col.n}, expected {n}")
    m = np.empty((grid.n_nodes, n, n))
    for k, x in enumerate(grid.nodes):
        for j, col in enumerate(columns):
            m[k, :, j] = ex.eval_vector(col, x)
    return _build_table(grid, m)


@dataclass(frozen=True)
class FundamentalCheck:
    max_residual: float
    threshold: float
    flagged: bool


def check_fundamental(table: FundamentalMatrixTable, h_samples: np.ndarray) -> FundamentalCheck:
    """Central-difference check of M' = H M over interior nodes.

    The residual of an exact table is pure truncation error, O(spacing^2);
    the flag threshold scales accordingly.
    """
    grid = table.grid
    if h_samples.shape != table.m.shape:
        raise ValueError("H samples must match the table grid and dimension")
    dx = grid.spacing
    residual = 0.0
    for k in range(1, grid.n_nodes - 1):
        deriv = (table.m[k + 1] - table.m[k - 1]) / (2.0 * dx)
        residual = max(residual, float(np.max(np.abs(deriv - h_samples[k] @ table.m[k]))))
    m_scale = float(np.max(np.abs(table.m)))
    h_scale = float(np.max(np.abs(h_samples)))
    threshold = 5.0 * (1.0 + h_scale) ** 3 * max(1.0, m_scale) * dx**2
    return FundamentalCheck(
        max_residual=residual, threshold=threshold, flagged=residual > threshold
    )
