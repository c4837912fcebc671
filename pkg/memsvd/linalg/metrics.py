"""
Subspace metrics
Projector distance between row spaces, and principal angles
"""

import numpy as np

from memsvd.core.dense import DenseMatrix, as_dense, check_orthonormal_rows
from memsvd.core.errors import DimensionMismatchError
from memsvd.linalg.svd import svd

# Inputs must be row-orthonormal to this tolerance
ORTHONORMAL_INPUT_TOL = 1e-6


def subspace_distance(u1, u2) -> float:
    """
    Frobenius distance ‖P1 − P2‖_F between the orthogonal projectors onto the
    row spaces of u1 (k1 × d) and u2 (k2 × d). Ranks may differ.

    Computed as sqrt(‖(I − P2)u1ᵀ‖² + ‖(I − P1)u2ᵀ‖²), which equals the
    projector distance exactly and keeps full relative accuracy near zero.

    Raises:
        DimensionMismatchError: different ambient dimension d
        OrthonormalityError: rows not orthonormal within 1e-6
    """
    u1 = as_dense(u1, name="u1")
    u2 = as_dense(u2, name="u2")
    if u1.shape[1] != u2.shape[1]:
        raise DimensionMismatchError(
            f"subspaces live in different dimensions: {u1.shape[1]} vs {u2.shape[1]}"
        )
    check_orthonormal_rows(u1, tol=ORTHONORMAL_INPUT_TOL, name="u1")
    check_orthonormal_rows(u2, tol=ORTHONORMAL_INPUT_TOL, name="u2")

    return float(np.sqrt(_escape_energy(u1, u2) + _escape_energy(u2, u1)))


def _escape_energy(a: DenseMatrix, b: DenseMatrix) -> float:
    """‖a − (a·bᵀ)·b‖_F²: energy of a's rows outside the row space of b"""
    residual = a - (a @ b.T) @ b
    return float(np.sum(residual**2))


def principal_angles(u1, u2) -> np.ndarray:
    """Principal angles (radians, ascending) between two row-orthonormal bases"""
    u1 = as_dense(u1, name="u1")
    u2 = as_dense(u2, name="u2")
    if u1.shape[1] != u2.shape[1]:
        raise DimensionMismatchError("subspaces live in different dimensions")
    cosines = svd(u1 @ u2.T).sigma
    return np.arccos(np.clip(cosines, -1.0, 1.0))
