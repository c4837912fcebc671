"""
Singular Value Decomposition
One-sided (Hestenes) Jacobi with round-robin pair ordering
"""

import functools
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from memsvd.config import config
from memsvd.core.dense import DenseMatrix, as_dense, power_of_two_scale
from memsvd.core.errors import ConvergenceError, DimensionMismatchError, RankError
from memsvd.core.schema import SvdFactors
from memsvd.linalg.counters import tally
from memsvd.linalg.qr import householder_qr, orthonormal_completion

_EPS = np.finfo(np.float64).eps


@functools.lru_cache(maxsize=128)
def _round_robin(n: int) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    """
    Circle-method schedule: n-1 (or n) rounds of disjoint column pairs,
    covering every pair exactly once per sweep.
    """
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [
            (min(players[i], players[size - 1 - i]), max(players[i], players[size - 1 - i]))
            for i in range(size // 2)
            if players[i] >= 0 and players[size - 1 - i] >= 0
        ]
        if pairs:
            p, q = np.array(pairs, dtype=np.intp).T
            rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _jacobi_orthogonalize(
    work: DenseMatrix,
    tol: float,
    max_sweeps: int,
) -> Tuple[DenseMatrix, DenseMatrix, int]:
    """
    Rotate column pairs of `work` (in place) until all pairs are orthogonal
    to relative tolerance `tol`. Returns (work, v, sweeps) with
    work_in · v = work_out.
    """
    m, n = work.shape
    v = np.eye(n)
    rounds = _round_robin(n)
    # Columns below this squared norm are numerically null and never rotated
    floor = (1e-3 * _EPS * np.linalg.norm(work)) ** 2

    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p, q in rounds:
            ap = work[:, p]
            aq = work[:, q]
            alpha = np.einsum("ij,ij->j", ap, ap)
            beta = np.einsum("ij,ij->j", aq, aq)
            gamma = np.einsum("ij,ij->j", ap, aq)
            tally("svd", 3 * m * len(p))

            active = (np.abs(gamma) > tol * np.sqrt(alpha * beta)) & (
                np.minimum(alpha, beta) > floor
            )
            if not active.any():
                continue
            rotated = True

            zeta = (beta[active] - alpha[active]) / (2.0 * gamma[active])
            t = np.where(zeta >= 0.0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t

            pa, qa = p[active], q[active]
            ap_a, aq_a = ap[:, active], aq[:, active]
            work[:, pa] = c * ap_a - s * aq_a
            work[:, qa] = s * ap_a + c * aq_a
            vp, vq = v[:, pa], v[:, qa]
            v[:, pa] = c * vp - s * vq
            v[:, qa] = s * vp + c * vq
            tally("svd", 4 * (m + n) * len(pa))

        if not rotated:
            return work, v, sweep

    raise ConvergenceError(
        f"Jacobi SVD did not converge within {max_sweeps} sweeps "
        f"({m}x{n} input; ill-conditioned?)"
    )


def _svd_tall(
    a: DenseMatrix,
    tol: float,
    max_sweeps: int,
) -> Tuple[DenseMatrix, np.ndarray, DenseMatrix]:
    """Thin SVD of an m×n matrix with m >= n"""
    m, n = a.shape
    if not np.any(a):
        return np.eye(m, n), np.zeros(n), np.eye(n)

    # QR preconditioning shrinks the rotated columns from length m to n
    q = None
    if m > n:
        q, work = householder_qr(a)
    else:
        work = a.copy()

    work, v, sweeps = _jacobi_orthogonalize(work, tol, max_sweeps)
    logger.debug(f"Jacobi SVD {m}x{n} converged in {sweeps} sweeps")

    sigma = np.linalg.norm(work, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, work, v = sigma[order], work[:, order], v[:, order]

    rank = int(np.count_nonzero(sigma > max(m, n) * _EPS * sigma[0]))
    u = orthonormal_completion(work[:, :rank] / sigma[:rank], n)
    if q is not None:
        u = q @ u
        tally("svd", m * n * n)
    return u, sigma, v


def _fix_signs(u: DenseMatrix, v: DenseMatrix) -> Tuple[DenseMatrix, DenseMatrix]:
    """Make the largest-magnitude entry of each left singular vector positive"""
    pivots = np.argmax(np.abs(u), axis=0)
    signs = np.where(u[pivots, np.arange(u.shape[1])] < 0.0, -1.0, 1.0)
    return u * signs, v * signs


def svd(
    a,
    tol: Optional[float] = None,
    max_sweeps: Optional[int] = None,
) -> SvdFactors:
    """
    Full thin SVD a = u·diag(sigma)·vᵀ with k = min(m, n).

    Deterministic: fixed rotation schedule and sign convention (largest-magnitude
    entry of each u column positive). Singular vectors of numerically zero
    singular values are an orthonormal completion.

    Args:
        a: m×n finite matrix
        tol: relative off-orthogonality tolerance (default config.SVD_TOL)
        max_sweeps: sweep budget (default config.SVD_MAX_SWEEPS)

    Raises:
        NonFiniteInputError: NaN/Inf input
        ConvergenceError: sweep budget exhausted
    """
    a = as_dense(a, name="svd input")
    tol = config.SVD_TOL if tol is None else tol
    max_sweeps = config.SVD_MAX_SWEEPS if max_sweeps is None else max_sweeps
    m, n = a.shape
    if m == 0 or n == 0:
        raise DimensionMismatchError(f"svd needs a non-empty matrix, got {m}x{n}")

    # Scaled so squared column norms neither underflow nor overflow
    scale = power_of_two_scale(a)
    a = a / scale

    if m >= n:
        u, sigma, v = _svd_tall(a, tol, max_sweeps)
    else:
        v, sigma, u = _svd_tall(np.ascontiguousarray(a.T), tol, max_sweeps)
    sigma = sigma * scale

    u, v = _fix_signs(u, v)
    return SvdFactors(u=u, sigma=sigma, v=v)


def truncate(factors: SvdFactors, n_c: int) -> SvdFactors:
    """
    Keep the leading n_c singular triplets (best rank-n_c approximation).

    Raises:
        RankError: n_c outside [1, k]
    """
    if not 1 <= n_c <= factors.rank:
        raise RankError(f"n_c={n_c} outside [1, {factors.rank}]")
    return SvdFactors(
        u=factors.u[:, :n_c],
        sigma=factors.sigma[:n_c],
        v=factors.v[:, :n_c],
    )
