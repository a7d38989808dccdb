"""Independent verification: a fixed-step classical Runge-Kutta integrator
for the full system and finite-difference residual evaluation.

Shares only the expression evaluator and matrix arithmetic with the series
machinery, so agreement between the two is meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid
from .problem import Problem


class BlowUpError(RuntimeError):
    """Integration state left the finite range."""

    def __init__(self, message: str, node: int):
        super().__init__(message)
        self.node = node


@dataclass(frozen=True)
class OracleSolution:
    grid: Grid
    values: np.ndarray  # (N, n)
    method: str = "RK4"


def _rhs(p: Problem, x: float, y: np.ndarray) -> np.ndarray:
    return p.coefficient_at(x) @ y + p.forcing_at(x)


def _rk4_step(p: Problem, x: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = _rhs(p, x, y)
    k2 = _rhs(p, x + 0.5 * h, y + 0.5 * h * k1)
    k3 = _rhs(p, x + 0.5 * h, y + 0.5 * h * k2)
    k4 = _rhs(p, x + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_solve(p: Problem, grid: Grid, y_at_x0: np.ndarray) -> OracleSolution:
    """Classical RK4 marched right from x0 to b and left from x0 to a,
    one step per grid interval."""
    if y_at_x0.shape != (p.n,):
        raise ValueError("initial vector dimension does not match the system")
    k0 = grid.index_of(p.x0)
    nodes = grid.nodes
    dx = grid.spacing
    values = np.empty((grid.n_nodes, p.n))
    values[k0] = y_at_x0
    # overflow surfaces as non-finite state and becomes a BlowUpError
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(k0, grid.n_nodes - 1):
            values[k + 1] = _rk4_step(p, nodes[k], values[k], dx)
            if not np.all(np.isfinite(values[k + 1])):
                raise BlowUpError(f"solution blew up at node {k + 1}", node=k + 1)
        for k in range(k0, 0, -1):
            values[k - 1] = _rk4_step(p, nodes[k], values[k], -dx)
            if not np.all(np.isfinite(values[k - 1])):
                raise BlowUpError(f"solution blew up at node {k - 1}", node=k - 1)
    return OracleSolution(grid=grid, values=values)


def residual(values: np.ndarray, p: Problem, grid: Grid) -> float:
    """sup over interior nodes of |central-difference y' - A y - F|_inf."""
    if values.shape != (grid.n_nodes, p.n):
        raise ValueError("values do not match the grid / system dimension")
    nodes = grid.nodes
    dx = grid.spacing
    worst = 0.0
    for k in range(1, grid.n_nodes - 1):
        deriv = (values[k + 1] - values[k - 1]) / (2.0 * dx)
        gap = deriv - p.coefficient_at(nodes[k]) @ values[k] - p.forcing_at(nodes[k])
        worst = max(worst, float(np.max(np.abs(gap))))
    return worst


@dataclass(frozen=True)
class Comparison:
    sup_diff: float
    per_node_diff: np.ndarray  # (N,)


def compare(a: np.ndarray, b: np.ndarray) -> Comparison:
    """Nodewise inf-norm differences between two sampled solutions."""
    if a.shape != b.shape:
        raise ValueError(f"cannot compare shapes {a.shape} and {b.shape}")
    per_node = np.max(np.abs(a - b), axis=1)
    return Comparison(sup_diff=float(np.max(per_node)), per_node_diff=per_node)
