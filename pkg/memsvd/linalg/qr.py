"""
Householder QR decomposition and orthonormal basis completion
"""

from typing import Tuple

import numpy as np

from memsvd.core.dense import DenseMatrix, as_dense, power_of_two_scale
from memsvd.core.errors import DimensionMismatchError
from memsvd.linalg.counters import tally


def householder_qr(a) -> Tuple[DenseMatrix, DenseMatrix]:
    """
    Reduced QR decomposition a = q·r by Householder reflections.

    R is normalized to a non-negative diagonal, so a single column yields
    r = ‖a‖₂ and q = a / ‖a‖₂.

    Args:
        a: m×n matrix with m ≥ n

    Returns:
        (q, r): q is m×n with orthonormal columns, r is n×n upper-triangular
    """
    r = as_dense(a, name="qr input")
    m, n = r.shape
    if m < n:
        raise DimensionMismatchError(f"householder_qr needs m >= n, got {m}x{n}")

    # Scaled so squared norms neither underflow nor overflow
    scale = power_of_two_scale(r)
    r /= scale

    reflectors = []
    for j in range(n):
        x = r[j:, j]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            reflectors.append(None)
            continue

        v = x.copy()
        v[0] += np.copysign(norm_x, x[0])
        v /= np.linalg.norm(v)
        reflectors.append(v)

        r[j:, j:] -= 2.0 * np.outer(v, v @ r[j:, j:])
        tally("qr", 2 * (m - j) * (n - j))

    # Accumulate Q = H_0 H_1 ... H_{n-1} I[:, :n] backwards
    q = np.eye(m, n)
    for j in range(n - 1, -1, -1):
        v = reflectors[j]
        if v is None:
            continue
        q[j:, :] -= 2.0 * np.outer(v, v @ q[j:, :])
        tally("qr", 2 * (m - j) * n)

    r = np.triu(r[:n, :]) * scale
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    r *= signs[:, None]
    q *= signs[None, :]
    return q, r


def orthonormal_completion(columns: DenseMatrix, target: int) -> DenseMatrix:
    """
    Extend orthonormal columns (m×k) to `target` orthonormal columns.

    Candidates are the standard basis vectors, tried in order of their
    distance from the current span and orthogonalized twice.
    """
    m, k = columns.shape
    if target > m:
        raise DimensionMismatchError(
            f"cannot complete to {target} orthonormal columns in R^{m}"
        )
    if target <= k:
        return columns[:, :target].copy()

    basis = np.zeros((m, target))
    basis[:, :k] = columns
    filled = k

    # Prefer coordinate directions that the current span barely touches
    leverage = np.sum(columns**2, axis=1) if k else np.zeros(m)
    for i in np.argsort(leverage, kind="stable"):
        if filled == target:
            break
        v = np.zeros(m)
        v[i] = 1.0
        for _ in range(2):
            current = basis[:, :filled]
            v -= current @ (current.T @ v)
        norm_v = np.linalg.norm(v)
        if norm_v > 1e-8:
            basis[:, filled] = v / norm_v
            filled += 1

    return basis
