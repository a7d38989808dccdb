"""Problem model: the linear system, its H+Z split, and the reduction of a
single nth-order scalar equation to a first-order system."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from . import expr as ex
from .grid import Grid
from .matcore import mat_det

# Split strategies
USER = "user"
CONSTANT_MEAN = "constant_mean"
CONSTANT_AT_POINT = "constant_at_point"
DIAGONAL = "diagonal"

STRATEGIES = (USER, CONSTANT_MEAN, CONSTANT_AT_POINT, DIAGONAL)

SPLIT_TOL = 1e-12  # sampled |H+Z-A| allowed at every grid node


@dataclass(frozen=True)
class Problem:
    """A validated y' = A(x) y + F(x) instance, stored in split form.

    `a` keeps the un-split coefficient when the config supplied it whole;
    the oracle prefers it to avoid re-summing H and Z.
    """

    n: int
    h: ex.MatrixExpr
    z: ex.MatrixExpr
    forcing: Optional[ex.VectorExpr]
    interval: tuple[float, float]
    x0: float
    c: np.ndarray
    a: Optional[ex.MatrixExpr] = None

    def __post_init__(self):
        lo, hi = self.interval
        if not lo < hi:
            raise ValueError(f"interval [{lo}, {hi}] must have lower < upper")
        if not lo <= self.x0 <= hi:
            raise ValueError(f"base point x0 = {self.x0} outside [{lo}, {hi}]")
        for m, name in ((self.h, "H"), (self.z, "Z")):
            if m.n != self.n:
                raise ValueError(f"{name} is {m.n}x{m.n}, expected {self.n}x{self.n}")
        if self.forcing is not None and self.forcing.n != self.n:
            raise ValueError("forcing dimension does not match the system")
        if self.c.shape != (self.n,):
            raise ValueError("constant vector dimension does not match the system")

    @property
    def homogeneous(self) -> bool:
        return self.forcing is None

    def coefficient_at(self, x: float) -> np.ndarray:
        """A(x), either from the stored whole matrix or as H(x)+Z(x)."""
        if self.a is not None:
            return ex.eval_matrix(self.a, x)
        return ex.eval_matrix(self.h, x) + ex.eval_matrix(self.z, x)

    def forcing_at(self, x: float) -> np.ndarray:
        if self.forcing is None:
            return np.zeros(self.n)
        return ex.eval_vector(self.forcing, x)


def split_coefficient(
    a: ex.MatrixExpr,
    strategy: str,
    grid: Grid,
    point: Optional[float] = None,
) -> tuple[ex.MatrixExpr, ex.MatrixExpr]:
    """Split A into (H, Z) with H + Z == A at every grid node.

    constant_mean:      H_ij = mean of A_ij over [a, b] (composite Simpson)
    constant_at_point:  H = A(point)
    diagonal:           H = diagonal part of A, Z = off-diagonal part
    """
    if strategy not in (CONSTANT_MEAN, CONSTANT_AT_POINT, DIAGONAL):
        raise ValueError(f"unknown split strategy {strategy!r}")
    n = a.n
    if strategy == DIAGONAL:
        zero = ex.const(0.0)
        h_rows = tuple(
            tuple(a.entries[i][j] if i == j else zero for j in range(n))
            for i in range(n)
        )
        z_rows = tuple(
            tuple(a.entries[i][j] if i != j else zero for j in range(n))
            for i in range(n)
        )
        h_expr = ex.MatrixExpr(n, h_rows)
        z_expr = ex.MatrixExpr(n, z_rows)
    else:
        if strategy == CONSTANT_AT_POINT:
            if point is None:
                raise ValueError("constant_at_point split needs a point")
            if not grid.a <= point <= grid.b:
                raise ValueError(f"split point {point} outside [{grid.a}, {grid.b}]")
            h_num = ex.eval_matrix(a, point)
        else:
            samples = np.stack([ex.eval_matrix(a, x) for x in grid.nodes])
            h_num = simpson(samples, x=grid.nodes, axis=0) / (grid.b - grid.a)
        h_expr = ex.const_matrix(h_num)
        z_rows = tuple(
            tuple(ex.subtract(a.entries[i][j], ex.const(h_num[i, j])) for j in range(n))
            for i in range(n)
        )
        z_expr = ex.MatrixExpr(n, z_rows)

    _check_split(a, h_expr, z_expr, grid)
    return h_expr, z_expr


def _check_split(a, h, z, grid) -> None:
    for x in grid.nodes:
        gap = np.max(np.abs(ex.eval_matrix(h, x) + ex.eval_matrix(z, x) - ex.eval_matrix(a, x)))
        if gap > SPLIT_TOL:
            raise ValueError(f"H + Z differs from A by {gap:.3e} at x = {x}")


@dataclass(frozen=True)
class CompanionSpec:
    """A single normalized nth-order linear scalar equation:
    y^(n) + a1(x) y^(n-1) + ... + an(x) y = F(x)."""

    order: int
    coefficients: tuple[ex.ScalarExpr, ...]  # a1 ... an
    forcing: Optional[ex.ScalarExpr] = None

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if len(self.coefficients) != self.order:
            raise ValueError(f"need exactly {self.order} coefficient expressions")


def companion_reduce(spec: CompanionSpec) -> tuple[ex.MatrixExpr, Optional[ex.VectorExpr]]:
    """First-order system equivalent of the scalar equation.

    Unknowns y_k = y^(k-1): superdiagonal ones, last row
    (-a_n, -a_{n-1}, ..., -a_1), forcing (0, ..., 0, F).
    """
    n = spec.order
    zero = ex.const(0.0)
    one = ex.const(1.0)
    rows = []
    for i in range(n - 1):
        rows.append(tuple(one if j == i + 1 else zero for j in range(n)))
    rows.append(tuple(_negate(spec.coefficients[n - 1 - j]) for j in range(n)))
    a = ex.MatrixExpr(n, tuple(rows))
    if spec.forcing is None:
        return a, None
    f = ex.VectorExpr(n, tuple([zero] * (n - 1) + [spec.forcing]))
    return a, f


def _negate(e: ex.ScalarExpr) -> ex.ScalarExpr:
    if isinstance(e, ex.Num):
        return ex.Num(-e.value)
    if isinstance(e, ex.Neg):
        return e.operand
    return ex.Neg(e)


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    infos: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(p: Problem, grid: Grid) -> ValidationReport:
    """Report-style checks: finiteness of the coefficients on the grid,
    split consistency, and base-point placement.  Z-singularity is only
    informational; nothing in the method divides by Z."""
    report = ValidationReport()
    lo, hi = p.interval
    if not lo <= p.x0 <= hi:
        report.errors.append(f"x0 = {p.x0} outside interval [{lo}, {hi}]")
    if (grid.a, grid.b) != (lo, hi):
        report.errors.append("grid does not cover the problem interval")

    z_singular_nodes = 0
    for k, x in enumerate(grid.nodes):
        try:
            z_val = ex.eval_matrix(p.z, x)
        except ex.EvalDomainError as err:
            report.errors.append(f"Z not finite at node {k} (x = {x}): {err}")
            continue
        try:
            h_val = ex.eval_matrix(p.h, x)
        except ex.EvalDomainError as err:
            report.errors.append(f"H not finite at node {k} (x = {x}): {err}")
            continue
        if p.forcing is not None:
            try:
                ex.eval_vector(p.forcing, x)
            except ex.EvalDomainError as err:
                report.errors.append(f"F not finite at node {k} (x = {x}): {err}")
        if p.a is not None:
            try:
                a_val = ex.eval_matrix(p.a, x)
            except ex.EvalDomainError as err:
                report.errors.append(f"A not finite at node {k} (x = {x}): {err}")
                continue
            gap = float(np.max(np.abs(h_val + z_val - a_val)))
            if gap > SPLIT_TOL:
                report.errors.append(
                    f"H + Z differs from A by {gap:.3e} at node {k} (x = {x})"
                )
        if abs(mat_det(z_val)) <= 1e-300:
            z_singular_nodes += 1
    if z_singular_nodes:
        report.infos.append(
            f"Z is singular at {z_singular_nodes} grid node(s); harmless, noted only"
        )
    return report
