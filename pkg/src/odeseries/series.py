"""Series construction: correction terms by variation of parameters,
partial sums, and empirical convergence detection.

Each term solves y_j' = H y_j + Z y_{j-1} (with the forcing folded into
term 0).  The nested multiple integrals collapse to one cumulative
integral per term:

    term_{j+1}(x) = M(x) * CumInt(x0 -> x; M^-1(t) Z(t) term_j(t)),

which is the same object by induction on j, at O(N) cost per term.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import expr as ex
from . import oracle
from .fundmat import FundamentalMatrixTable
from .grid import Grid
from .problem import Problem


@dataclass(frozen=True)
class GridVectorFunction:
    grid: Grid
    values: np.ndarray  # (N, n)

    def __post_init__(self):
        if self.values.shape[0] != self.grid.n_nodes or self.values.ndim != 2:
            raise ValueError("values must hold one n-vector per grid node")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid function values must be finite")

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class SeriesOptions:
    max_terms: int = 50
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    grid_nodes: int = 1001

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.grid_nodes < 3 or self.grid_nodes % 2 == 0:
            raise ValueError("grid_nodes must be odd and >= 3")


class StopReason(str, enum.Enum):
    TOLERANCE_MET = "ToleranceMet"
    MAX_TERMS_REACHED = "MaxTermsReached"
    DIVERGING = "Diverging"


@dataclass
class SeriesSolution:
    terms: list[GridVectorFunction]
    partial_sum: GridVectorFunction
    term_sup_norms: list[float]
    converged: bool
    stop_reason: StopReason
    residual_sup: float = field(default=float("nan"))


def cum_integrate(samples: np.ndarray, grid: Grid, x0: float) -> np.ndarray:
    """Cumulative composite-trapezoid antiderivative anchored at x0.

    Result vanishes at the x0 node and is negative-signed for nodes left
    of x0 when the integrand is positive.  Works on (N,) or (N, m) input.
    """
    k0 = grid.index_of(x0)
    acc = cumulative_trapezoid(samples, x=grid.nodes, axis=0, initial=0.0)
    return acc - acc[k0]


def term0_homogeneous(table: FundamentalMatrixTable, c: np.ndarray) -> GridVectorFunction:
    """First term of the homogeneous series: M(x) c."""
    if c.shape != (table.n,):
        raise ValueError(f"constant vector has dimension {c.shape}, expected ({table.n},)")
    values = np.einsum("kij,j->ki", table.m, c)
    return GridVectorFunction(grid=table.grid, values=values)


def term0_nonhomogeneous(
    table: FundamentalMatrixTable,
    forcing: ex.VectorExpr,
    x0: float,
    c: np.ndarray,
) -> GridVectorFunction:
    """First term with forcing: M(x) [c + CumInt(x0 -> x; M^-1(t) F(t))]."""
    if c.shape != (table.n,):
        raise ValueError(f"constant vector has dimension {c.shape}, expected ({table.n},)")
    grid = table.grid
    f_samples = np.stack([ex.eval_vector(forcing, x) for x in grid.nodes])
    integrand = np.einsum("kij,kj->ki", table.m_inv, f_samples)
    coeff = c + cum_integrate(integrand, grid, x0)
    values = np.einsum("kij,kj->ki", table.m, coeff)
    return GridVectorFunction(grid=grid, values=values)


def _next_term_from_samples(
    table: FundamentalMatrixTable,
    z_samples: np.ndarray,
    prev_values: np.ndarray,
    x0: float,
) -> np.ndarray:
    zy = np.einsum("kij,kj->ki", z_samples, prev_values)
    integrand = np.einsum("kij,kj->ki", table.m_inv, zy)
    coeff = cum_integrate(integrand, table.grid, x0)
    return np.einsum("kij,kj->ki", table.m, coeff)


def next_term(
    table: FundamentalMatrixTable,
    z: ex.MatrixExpr,
    prev: GridVectorFunction,
    x0: float,
) -> GridVectorFunction:
    """One variation-of-parameters step; exactly zero at x0."""
    if prev.grid != table.grid:
        raise ValueError("previous term is on a different grid")
    z_samples = np.stack([ex.eval_matrix(z, x) for x in table.grid.nodes])
    values = _next_term_from_samples(table, z_samples, prev.values, x0)
    return GridVectorFunction(grid=table.grid, values=values)


def partial_sum(terms: Sequence[GridVectorFunction], l: int) -> GridVectorFunction:
    """Nodewise sum of terms 0..l, added in index order."""
    if not 0 <= l < len(terms):
        raise IndexError(f"partial-sum index {l} out of range 0..{len(terms) - 1}")
    acc = terms[0].values.copy()
    for t in terms[1 : l + 1]:
        acc = acc + t.values
    return GridVectorFunction(grid=terms[0].grid, values=acc)


# divergence heuristic: this many consecutive growing terms, last ratio > 2
_DIVERGE_STREAK = 3
_DIVERGE_RATIO = 2.0


def solve_series(
    p: Problem,
    table: FundamentalMatrixTable,
    opts: Optional[SeriesOptions] = None,
) -> SeriesSolution:
    """Generate terms until tolerance, the term budget, or divergence.

    Stops with ToleranceMet when the latest term's sup norm falls below
    abs_tol + rel_tol * |current partial sum|.  An exactly-zero correction
    converges immediately and is not stored (Z == 0 keeps only term 0).
    """
    opts = opts or SeriesOptions()
    grid = table.grid
    if grid.n_nodes != opts.grid_nodes:
        raise ValueError("table grid does not match the requested grid_nodes")
    z_samples = np.stack([ex.eval_matrix(p.z, x) for x in grid.nodes])

    if p.homogeneous:
        t0 = term0_homogeneous(table, p.c)
    else:
        t0 = term0_nonhomogeneous(table, p.forcing, p.x0, p.c)
    terms = [t0]
    norms = [t0.sup_norm]
    running = t0.values.copy()

    converged = False
    reason = StopReason.MAX_TERMS_REACHED
    growth_streak = 0
    for _ in range(1, opts.max_terms):
        values = _next_term_from_samples(table, z_samples, terms[-1].values, p.x0)
        nrm = float(np.max(np.abs(values)))
        threshold = opts.abs_tol + opts.rel_tol * float(np.max(np.abs(running)))
        if nrm == 0.0:
            converged = True
            reason = StopReason.TOLERANCE_MET
            break
        terms.append(GridVectorFunction(grid=grid, values=values))
        norms.append(nrm)
        running = running + values
        if nrm <= threshold:
            converged = True
            reason = StopReason.TOLERANCE_MET
            break
        if nrm > norms[-2]:
            growth_streak += 1
            if growth_streak >= _DIVERGE_STREAK and nrm / norms[-2] > _DIVERGE_RATIO:
                reason = StopReason.DIVERGING
                break
        else:
            growth_streak = 0

    solution = SeriesSolution(
        terms=terms,
        partial_sum=GridVectorFunction(grid=grid, values=running),
        term_sup_norms=norms,
        converged=converged,
        stop_reason=reason,
    )
    solution.residual_sup = oracle.residual(running, p, grid)
    return solution
