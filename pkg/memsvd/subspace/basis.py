"""
Subspace Memory
Truncated-SVD basis of the memory matrix M and projection-and-reconstruction
as a parameter-free replacement for memory cross-attention
"""

from typing import Optional, Tuple, Union

import numpy as np
from loguru import logger

from memsvd.config import config
from memsvd.core.dense import DenseMatrix, as_dense
from memsvd.core.errors import (
    DimensionMismatchError,
    EmptyMemoryError,
    RankDeficiencyError,
    RankError,
)
from memsvd.core.schema import BasisMethod, RandomizedSvd, SubspaceBasis
from memsvd.linalg.counters import tally
from memsvd.linalg.randomized import randomized_range_basis
from memsvd.linalg.svd import svd

# Singular values at or below this fraction of σ₁ are flagged as null directions
NULL_DIRECTION_RTOL = 1e-12
# Coefficient matrix requires σ_{n_c} above this fraction of σ₁
COEFFICIENT_RTOL = 1e-10

MethodSpec = Union[str, BasisMethod, RandomizedSvd]


def _resolve_method(method: MethodSpec) -> Union[BasisMethod, RandomizedSvd]:
    if isinstance(method, RandomizedSvd):
        return method
    method = BasisMethod(method)
    if method == BasisMethod.RANDOMIZED:
        return RandomizedSvd(
            oversampling=config.OVERSAMPLING,
            power_iters=config.POWER_ITERS,
            seed=config.SEED,
        )
    if method != BasisMethod.EXACT:
        raise ValueError(f"compute_basis does not support method '{method.value}'")
    return method


def _flag_null_directions(sigma: np.ndarray) -> np.ndarray:
    sigma = sigma.copy()
    if sigma.size and sigma[0] > 0.0:
        sigma[sigma <= NULL_DIRECTION_RTOL * sigma[0]] = 0.0
    return sigma


def compute_basis(
    memory,
    n_c: Optional[int] = None,
    method: MethodSpec = BasisMethod.EXACT,
    center: Optional[bool] = None,
) -> SubspaceBasis:
    """
    Top-n_c basis of the row space of M (left singular vectors of Mᵀ).

    Args:
        memory: M, N_mem × d
        n_c: number of components (default config.N_COMPONENTS)
        method: "exact", "randomized" or RandomizedSvd options
        center: subtract the row mean before decomposing
            (default: the center_features flag)

    Returns:
        SubspaceBasis with n_c orthonormal rows; directions beyond the rank of M
        carry sigma 0

    Raises:
        EmptyMemoryError: M has no rows
        RankError: n_c outside [1, min(N_mem, d)]
    """
    m = as_dense(memory, name="memory")
    n_c = config.N_COMPONENTS if n_c is None else n_c
    center = config.is_flag_enabled("center_features") if center is None else center
    n_mem, d = m.shape
    if n_mem == 0:
        raise EmptyMemoryError("cannot compute a basis from an empty memory")
    if not 1 <= n_c <= min(n_mem, d):
        raise RankError(f"n_c={n_c} outside [1, min(N_mem={n_mem}, d={d})]")

    mean = None
    if center:
        mean = m.mean(axis=0)
        m = m - mean

    resolved = _resolve_method(method)
    if isinstance(resolved, RandomizedSvd):
        u, sigma = _randomized_factors(m, n_c, resolved)
    else:
        factors = svd(m.T)
        u, sigma = factors.u[:, :n_c], factors.sigma[:n_c]

    return SubspaceBasis(
        u_mem=u.T,
        sigma_mem=_flag_null_directions(sigma),
        mean=mean,
    )


def _randomized_factors(
    m: DenseMatrix,
    n_c: int,
    options: RandomizedSvd,
) -> Tuple[DenseMatrix, np.ndarray]:
    """Range finder on Mᵀ followed by a small SVD of QᵀMᵀ"""
    n_mem, d = m.shape
    oversampling = min(options.oversampling, min(n_mem, d) - n_c)
    if oversampling < options.oversampling:
        logger.debug(
            f"Clamped oversampling {options.oversampling} -> {oversampling} "
            f"for a {n_mem}x{d} memory"
        )
    q = randomized_range_basis(
        m.T,
        n_c,
        oversampling=oversampling,
        power_iters=options.power_iters,
        seed=options.seed,
    )
    small = svd(q.T @ m.T)
    u = q @ small.u[:, :n_c]
    tally("basis", q.shape[1] * d * n_mem + d * q.shape[1] * n_c)

    # Same sign convention as the exact path
    pivots = np.argmax(np.abs(u), axis=0)
    signs = np.where(u[pivots, np.arange(n_c)] < 0.0, -1.0, 1.0)
    return u * signs, small.sigma[:n_c]


def _as_rows(h, dim: int) -> Tuple[DenseMatrix, bool]:
    arr = np.asarray(h, dtype=np.float64)
    squeeze = arr.ndim == 1
    rows = as_dense(arr, name="query features")
    if rows.shape[1] != dim:
        raise DimensionMismatchError(
            f"query features have dimension {rows.shape[1]}, basis has {dim}"
        )
    return rows, squeeze


def project_reconstruct(h, basis: SubspaceBasis) -> np.ndarray:
    """
    h′ = (h·U_memᵀ)·U_mem, row-wise for a batch of queries.

    Mean-centred bases project h − μ and add μ back.
    """
    rows, squeeze = _as_rows(h, basis.dim)
    if basis.mean is not None:
        rows = rows - basis.mean
    out = (rows @ basis.u_mem.T) @ basis.u_mem
    tally("project", 2 * rows.shape[0] * basis.n_c * basis.dim)
    if basis.mean is not None:
        out += basis.mean
    return out[0] if squeeze else out


def residual_update(h, basis: SubspaceBasis) -> np.ndarray:
    """Skip-connection form h + h′ used at the head"""
    rows, squeeze = _as_rows(h, basis.dim)
    out = rows + project_reconstruct(rows, basis)
    return out[0] if squeeze else out


def coefficient_matrix(memory, n_c: int) -> DenseMatrix:
    """
    C = Σ_c⁻¹·V_cᵀ (n_c × N_mem) such that U_mem = C·M.

    With it, h′ = (h·Mᵀ)·Cᵀ·C·M: the query first scores every memory row,
    then returns a linear combination of memory rows.

    Raises:
        RankError: n_c outside [1, min(N_mem, d)]
        RankDeficiencyError: σ_{n_c} <= 1e-10·σ₁
    """
    m = as_dense(memory, name="memory")
    n_mem, d = m.shape
    if n_mem == 0:
        raise EmptyMemoryError("cannot build coefficients for an empty memory")
    if not 1 <= n_c <= min(n_mem, d):
        raise RankError(f"n_c={n_c} outside [1, min(N_mem={n_mem}, d={d})]")

    factors = svd(m.T)
    sigma = factors.sigma[:n_c]
    if factors.sigma[0] == 0.0 or sigma[-1] <= COEFFICIENT_RTOL * factors.sigma[0]:
        raise RankDeficiencyError(
            f"memory rank below n_c={n_c}: σ_{n_c}/σ_1 = "
            f"{sigma[-1] / max(factors.sigma[0], 1e-300):.3e}"
        )
    return factors.v[:, :n_c].T / sigma[:, None]


def project_via_coefficients(h, memory, coefficients: DenseMatrix) -> np.ndarray:
    """Attention-like evaluation a = h·Mᵀ, h′ = a·Cᵀ·C·M"""
    m = as_dense(memory, name="memory")
    rows, squeeze = _as_rows(h, m.shape[1])
    scores = rows @ m.T
    out = ((scores @ coefficients.T) @ coefficients) @ m
    return out[0] if squeeze else out
