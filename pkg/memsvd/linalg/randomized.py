"""
Randomized range finder
Gaussian sketch with power iterations, re-orthonormalized by Householder QR
"""

import numpy as np
from loguru import logger

from memsvd.core.dense import DenseMatrix, as_dense
from memsvd.core.errors import RankError
from memsvd.linalg.counters import matmul_macs, tally
from memsvd.linalg.qr import householder_qr


def gaussian_test_matrix(n: int, width: int, seed: int) -> DenseMatrix:
    """n × width matrix of i.i.d. N(0, 1) entries from a private generator"""
    return np.random.default_rng(seed).standard_normal((n, width))


def randomized_range_basis(
    a,
    n_c: int,
    oversampling: int = 10,
    power_iters: int = 2,
    seed: int = 0,
) -> DenseMatrix:
    """
    Orthonormal basis Q (m × (n_c + oversampling)) approximating range(a).

    Cost is O((n_c + oversampling)·m·n) per pass; the result is bit-reproducible
    for a fixed seed.

    Raises:
        RankError: n_c + oversampling exceeds min(m, n), or n_c < 1
    """
    a = as_dense(a, name="range finder input")
    m, n = a.shape
    width = n_c + oversampling
    if n_c < 1 or oversampling < 0:
        raise RankError(f"invalid rank request n_c={n_c}, oversampling={oversampling}")
    if width > min(m, n):
        raise RankError(
            f"n_c + oversampling = {width} exceeds min(dims) = {min(m, n)}"
        )

    omega = gaussian_test_matrix(n, width, seed)
    y = a @ omega
    tally("range_finder", matmul_macs(a.shape, omega.shape))
    q, _ = householder_qr(y)

    # Power iterations sharpen the spectrum decay: (A Aᵀ)^p A Ω
    for _ in range(power_iters):
        z, _ = householder_qr(a.T @ q)
        q, _ = householder_qr(a @ z)
        tally("range_finder", 2 * matmul_macs(a.shape, q.shape))

    logger.debug(
        f"Range finder {m}x{n}: width={width}, power_iters={power_iters}, seed={seed}"
    )
    return q
