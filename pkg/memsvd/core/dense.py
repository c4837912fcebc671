"""
DenseMatrix helpers
Row-major float64 numpy arrays are the carrier for features, bases and factors
"""

from typing import Optional

import numpy as np
import numpy.typing as npt

from memsvd.core.errors import (
    DimensionMismatchError,
    NonFiniteInputError,
    OrthonormalityError,
)

DenseMatrix = npt.NDArray[np.float64]


def as_dense(
    a,
    name: str = "matrix",
    ndim: int = 2,
    readonly: bool = False,
) -> DenseMatrix:
    """
    Validate and convert input to a C-contiguous float64 array.

    Args:
        a: Array-like input
        name: Name used in error messages
        ndim: Required number of dimensions (1-D input is promoted to a row when ndim=2)
        readonly: Return a read-only copy

    Raises:
        DimensionMismatchError: wrong number of dimensions
        NonFiniteInputError: NaN or Inf entries
    """
    arr = np.array(a, dtype=np.float64, order="C", copy=True)
    if ndim == 2 and arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != ndim:
        raise DimensionMismatchError(
            f"{name} must be {ndim}-D, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError(f"{name} contains non-finite entries")
    if readonly:
        arr.setflags(write=False)
    return arr


def frozen(a: np.ndarray) -> np.ndarray:
    """Mark an array read-only in place and return it"""
    a.setflags(write=False)
    return a


def gram_residual(u_rows: DenseMatrix) -> float:
    """Frobenius norm of u·uᵀ − I for a matrix with (nominally) orthonormal rows"""
    k = u_rows.shape[0]
    return float(np.linalg.norm(u_rows @ u_rows.T - np.eye(k)))


def check_orthonormal_rows(
    u_rows: DenseMatrix,
    tol: float = 1e-6,
    name: str = "basis",
    dim: Optional[int] = None,
) -> None:
    """
    Raise OrthonormalityError if rows of u are not orthonormal within tol.
    """
    if dim is not None and u_rows.shape[1] != dim:
        raise DimensionMismatchError(
            f"{name} has dimension {u_rows.shape[1]}, expected {dim}"
        )
    residual = gram_residual(u_rows)
    if residual > tol:
        raise OrthonormalityError(
            f"{name} rows are not orthonormal (‖uuᵀ − I‖_F = {residual:.3e} > {tol:.1e})"
        )


def power_of_two_scale(a: np.ndarray) -> float:
    """Power of two in (max|a|/2, max|a|]; 1.0 for an all-zero array"""
    peak = float(np.max(np.abs(a))) if a.size else 0.0
    if peak == 0.0:
        return 1.0
    return float(np.ldexp(1.0, int(np.frexp(peak)[1]) - 1))
