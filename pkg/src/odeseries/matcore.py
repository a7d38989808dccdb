"""Dense real matrix/vector arithmetic used by every other module.

Thin, validated wrappers around numpy's LU-based kernels, plus a
self-contained scaling-and-squaring matrix exponential.
"""

from __future__ import annotations

import math

import numpy as np


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class SingularMatrixError(ValueError):
    """Matrix is singular or numerically too close to singular."""

    def __init__(self, message: str, det: float):
        super().__init__(message)
        self.det = det


class MatExpRangeError(OverflowError):
    """Matrix norm so large that exp() would overflow double precision."""


def as_matrix(entries) -> np.ndarray:
    """Validate and return a 2-d float array (finite entries only)."""
    a = np.array(entries, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must all be finite")
    return a


def as_vector(entries) -> np.ndarray:
    """Validate and return a 1-d float array (finite entries only)."""
    v = np.array(entries, dtype=float)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ShapeError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must all be finite")
    return v


def _require_square(a: np.ndarray, op: str) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{op} requires a square matrix, got shape {a.shape}")


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[-1] != b.shape[0]:
        raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def mat_det(a: np.ndarray) -> float:
    _require_square(a, "det")
    return float(np.linalg.det(a))


def singularity_threshold(a: np.ndarray) -> float:
    """Dimensionally consistent cutoff: 1e-12 * (max |entry|)^n."""
    n = a.shape[0]
    return 1e-12 * float(np.max(np.abs(a))) ** n


def mat_inv(a: np.ndarray) -> np.ndarray:
    _require_square(a, "inverse")
    det = mat_det(a)
    if abs(det) <= singularity_threshold(a):
        raise SingularMatrixError(
            f"matrix is singular or near-singular (det = {det:.3e})", det=det
        )
    return np.linalg.inv(a)


# Coefficients of the degree-13 Pade approximant to exp.
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)

# exp(709) is the last power below the double-precision overflow edge.
_EXP_NORM_LIMIT = 709.0


def mat_exp(a: np.ndarray) -> np.ndarray:
    """exp(a) by scaling-and-squaring around a 13th-order Pade core.

    The argument is scaled by 2^-s with s = ceil(log2(norm1)) so the core
    always sees a matrix of 1-norm <= 1.
    """
    _require_square(a, "exp")
    n = a.shape[0]
    norm1 = float(np.linalg.norm(a, 1))
    if norm1 > _EXP_NORM_LIMIT:
        raise MatExpRangeError(
            f"matrix 1-norm {norm1:.3e} too large for a double-precision exp"
        )
    s = max(0, math.ceil(math.log2(norm1))) if norm1 > 1.0 else 0
    x = a / float(2**s)

    b = _PADE13
    ident = np.eye(n)
    x2 = x @ x
    x4 = x2 @ x2
    x6 = x4 @ x2
    u = x @ (x6 @ (b[13] * x6 + b[11] * x4 + b[9] * x2)
             + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * ident)
    v = (x6 @ (b[12] * x6 + b[10] * x4 + b[8] * x2)
         + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * ident)
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    if not np.all(np.isfinite(r)):
        raise MatExpRangeError("matrix exponential overflowed double precision")
    return r
