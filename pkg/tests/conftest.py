import numpy as np
import pytest

from memsvd.core.schema import SubspaceBasis


def random_orthonormal_rows(rng: np.random.Generator, k: int, d: int) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((d, k)))
    return q.T


def planted_spectrum(rng: np.random.Generator, m: int, n: int, sigma: np.ndarray) -> np.ndarray:
    """m×n matrix with prescribed singular values"""
    k = len(sigma)
    u, _ = np.linalg.qr(rng.standard_normal((m, k)))
    v, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return (u * sigma) @ v.T


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def make_basis():
    def _make(rng: np.random.Generator, k: int, d: int) -> SubspaceBasis:
        return SubspaceBasis(
            u_mem=random_orthonormal_rows(rng, k, d),
            sigma_mem=np.linspace(k, 1, k),
        )

    return _make
