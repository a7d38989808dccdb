"""Series solver for first-order linear systems y' = A(x) y + F(x).

Split A into H + Z, solve the H-system exactly through its fundamental
matrix, generate correction terms by variation of parameters, and sum the
series with convergence diagnostics.  An independent fixed-step RK4
integrator certifies the result.
"""

from .fundmat import (
    FundamentalMatrixTable,
    check_fundamental,
    fundamental_constant_h,
    fundamental_user,
)
from .grid import Grid
from .oracle import compare, residual, rk4_solve
from .problem import CompanionSpec, Problem, companion_reduce, split_coefficient, validate
from .series import (
    GridVectorFunction,
    SeriesOptions,
    SeriesSolution,
    StopReason,
    cum_integrate,
    next_term,
    partial_sum,
    solve_series,
    term0_homogeneous,
    term0_nonhomogeneous,
)

__version__ = "0.1.0"

__all__ = [
    "CompanionSpec",
    "FundamentalMatrixTable",
    "Grid",
    "GridVectorFunction",
    "Problem",
    "SeriesOptions",
    "SeriesSolution",
    "StopReason",
    "check_fundamental",
    "companion_reduce",
    "compare",
    "cum_integrate",
    "fundamental_constant_h",
    "fundamental_user",
    "next_term",
    "partial_sum",
    "residual",
    "rk4_solve",
    "solve_series",
    "split_coefficient",
    "term0_homogeneous",
    "term0_nonhomogeneous",
    "validate",
]
