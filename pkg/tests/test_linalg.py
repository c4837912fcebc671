import numpy as np
import pytest
from scipy.linalg import subspace_angles, svdvals

from memsvd.core.errors import (
    ConvergenceError,
    DimensionMismatchError,
    NonFiniteInputError,
    OrthonormalityError,
    RankError,
)
from memsvd.linalg import (
    count_ops,
    householder_qr,
    orthonormal_completion,
    principal_angles,
    randomized_range_basis,
    subspace_distance,
    svd,
    truncate,
)

from .conftest import planted_spectrum, random_orthonormal_rows


# ========== QR ==========


@pytest.mark.parametrize("shape", [(5, 5), (40, 7), (300, 20), (3, 1)])
def test_householder_qr_factors(rng, shape):
    a = rng.standard_normal(shape)
    q, r = householder_qr(a)
    assert q.shape == shape
    assert r.shape == (shape[1], shape[1])
    np.testing.assert_allclose(q @ r, a, atol=1e-12)
    np.testing.assert_allclose(q.T @ q, np.eye(shape[1]), atol=1e-12)
    assert np.allclose(np.tril(r, -1), 0.0)
    assert np.all(np.diag(r) >= 0.0)


def test_householder_qr_single_column_is_norm():
    x = np.array([[3.0], [-4.0]])
    q, r = householder_qr(x)
    assert r[0, 0] == pytest.approx(5.0)
    np.testing.assert_allclose(q[:, 0], [0.6, -0.8], atol=1e-15)


def test_householder_qr_rejects_wide():
    with pytest.raises(DimensionMismatchError):
        householder_qr(np.ones((2, 3)))


def test_householder_qr_rejects_non_finite():
    a = np.ones((3, 2))
    a[1, 1] = np.nan
    with pytest.raises(NonFiniteInputError):
        householder_qr(a)

@pytest.mark.parametrize("magnitude", [1e-170, 1e160])
def test_householder_qr_extreme_magnitudes(rng, magnitude):
    a = rng.standard_normal((30, 6))
    q_ref, r_ref = householder_qr(a)
    q, r = householder_qr(a * magnitude)
    assert np.all(np.isfinite(r))
    np.testing.assert_allclose(q, q_ref, atol=1e-12)
    np.testing.assert_allclose(r / magnitude, r_ref, rtol=1e-12, atol=1e-12)



def test_orthonormal_completion_extends_span(rng):
    cols = random_orthonormal_rows(rng, 3, 8).T
    full = orthonormal_completion(cols, 6)
    np.testing.assert_allclose(full[:, :3], cols)
    np.testing.assert_allclose(full.T @ full, np.eye(6), atol=1e-12)


# ========== SVD ==========


@pytest.mark.parametrize("shape", [(1, 1), (6, 6), (50, 12), (12, 50), (183, 20)])
def test_svd_matches_reference_values(rng, shape):
    a = rng.standard_normal(shape)
    f = svd(a)
    k = min(shape)
    assert f.u.shape == (shape[0], k) and f.v.shape == (shape[1], k)
    np.testing.assert_allclose(f.sigma, svdvals(a), rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(f.reconstruct(), a, atol=1e-12)
    np.testing.assert_allclose(f.u.T @ f.u, np.eye(k), atol=1e-12)
    np.testing.assert_allclose(f.v.T @ f.v, np.eye(k), atol=1e-12)


def test_svd_sign_convention_and_determinism(rng):
    a = rng.standard_normal((20, 6))
    first, second = svd(a), svd(a)
    np.testing.assert_array_equal(first.u, second.u)
    np.testing.assert_array_equal(first.sigma, second.sigma)
    pivots = np.argmax(np.abs(first.u), axis=0)
    assert np.all(first.u[pivots, np.arange(6)] > 0)


def test_svd_zero_matrix():
    f = svd(np.zeros((4, 3)))
    np.testing.assert_array_equal(f.sigma, np.zeros(3))
    np.testing.assert_allclose(f.u.T @ f.u, np.eye(3))


def test_svd_rank_deficient_completes_vectors(rng):
    a = planted_spectrum(rng, 30, 10, np.array([5.0, 2.0, 1.0]))
    f = svd(a)
    assert f.sigma[2] == pytest.approx(1.0)
    assert np.all(f.sigma[3:] < 1e-12)
    np.testing.assert_allclose(f.u.T @ f.u, np.eye(10), atol=1e-10)
    np.testing.assert_allclose(f.reconstruct(), a, atol=1e-12)


def test_svd_exhausted_sweeps_raise(rng):
    with pytest.raises(ConvergenceError):
        svd(rng.standard_normal((20, 10)), max_sweeps=1)


def test_svd_rejects_non_finite():
    with pytest.raises(NonFiniteInputError):
        svd(np.array([[1.0, np.inf]]))

@pytest.mark.parametrize("magnitude", [1e-170, 1e-300, 1e160, 1e300])
def test_svd_extreme_magnitudes(magnitude):
    factors = svd(np.diag([3.0, 2.0, 1.0]) * magnitude)
    np.testing.assert_allclose(factors.sigma / magnitude, [3.0, 2.0, 1.0], rtol=1e-12)


def test_svd_scaled_input_scales_sigma(rng):
    a = rng.standard_normal((40, 9))
    small, big = svd(a * 1e-200), svd(a * 1e200)
    reference = svdvals(a)
    np.testing.assert_allclose(small.sigma * 1e200, reference, rtol=1e-10)
    np.testing.assert_allclose(big.sigma * 1e-200, reference, rtol=1e-10)
    np.testing.assert_allclose(np.abs(small.u.T @ big.u), np.eye(9), atol=1e-8)



def test_truncate_bounds(rng):
    f = svd(rng.standard_normal((8, 5)))
    assert truncate(f, 2).rank == 2
    with pytest.raises(RankError):
        truncate(f, 0)
    with pytest.raises(RankError):
        truncate(f, 6)


@pytest.fixture(scope="module")
def decaying_matrix():
    rng = np.random.default_rng(7)
    sigma = 0.9 ** np.arange(256)
    return planted_spectrum(rng, 300, 256, sigma), sigma


def test_truncation_residual_is_tail_norm(decaying_matrix):
    a, sigma = decaying_matrix
    f = svd(a)
    for n_c in (5, 10, 40):
        t = truncate(f, n_c)
        residual = np.linalg.norm(a - t.reconstruct())
        tail = np.sqrt(np.sum(sigma[n_c:] ** 2))
        assert residual == pytest.approx(tail, rel=1e-8)


def test_randomized_range_finder_near_optimal(decaying_matrix):
    a, sigma = decaying_matrix
    n_c = 10
    optimal = np.sqrt(np.sum(sigma[n_c:] ** 2))
    for seed in range(20):
        q = randomized_range_basis(a, n_c, oversampling=10, power_iters=2, seed=seed)
        # Best rank-n_c approximation inside range(q)
        small = svd(q.T @ a)
        approx = q @ truncate(small, n_c).reconstruct()
        assert np.linalg.norm(a - approx) <= 1.5 * optimal


def test_randomized_range_finder_reproducible(rng):
    a = rng.standard_normal((60, 40))
    np.testing.assert_array_equal(
        randomized_range_basis(a, 5, seed=3), randomized_range_basis(a, 5, seed=3)
    )
    with pytest.raises(RankError):
        randomized_range_basis(a, 35, oversampling=10)


def test_count_ops_records_kernel_work(rng):
    a = rng.standard_normal((30, 6))
    with count_ops() as ops:
        svd(a)
    assert ops.total > 0
    assert {"qr", "svd"} <= set(ops.by_stage)

    with count_ops() as outer:
        with count_ops() as inner:
            householder_qr(a)
    assert outer.total == inner.total > 0


# ========== Subspace metrics ==========


def test_subspace_distance_basics(rng):
    u = random_orthonormal_rows(rng, 4, 12)
    rotation, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    assert subspace_distance(u, rotation @ u) < 1e-12

    e = np.eye(6)
    assert subspace_distance(e[:2], e[2:4]) == pytest.approx(2.0)
    assert subspace_distance(e[:3], e[:1]) == pytest.approx(np.sqrt(2.0))


@pytest.mark.parametrize("k1,k2", [(3, 3), (2, 5), (6, 1)])
def test_subspace_distance_symmetric_and_matches_angles(rng, k1, k2):
    u1 = random_orthonormal_rows(rng, k1, 20)
    u2 = random_orthonormal_rows(rng, k2, 20)
    assert subspace_distance(u1, u2) == subspace_distance(u2, u1)

    p1, p2 = u1.T @ u1, u2.T @ u2
    assert subspace_distance(u1, u2) == pytest.approx(np.linalg.norm(p1 - p2), rel=1e-10)
    if k1 == k2:
        theta = subspace_angles(u1.T, u2.T)
        expected = np.sqrt(2.0 * np.sum(np.sin(theta) ** 2))
        assert subspace_distance(u1, u2) == pytest.approx(expected, rel=1e-9)

def test_subspace_distance_triangle_inequality(rng):
    d = 16
    for _ in range(300):
        a, b, c = (random_orthonormal_rows(rng, int(rng.integers(1, 9)), d) for _ in range(3))
        ab, bc, ac = subspace_distance(a, b), subspace_distance(b, c), subspace_distance(a, c)
        assert ac <= ab + bc + 1e-12
        assert ab >= 0.0 and subspace_distance(a, a) < 1e-12



def test_subspace_distance_validates_inputs(rng):
    u = random_orthonormal_rows(rng, 2, 5)
    with pytest.raises(DimensionMismatchError):
        subspace_distance(u, random_orthonormal_rows(rng, 2, 6))
    with pytest.raises(OrthonormalityError):
        subspace_distance(2.0 * u, u)


def test_principal_angles_match_scipy(rng):
    u1 = random_orthonormal_rows(rng, 3, 10)
    u2 = random_orthonormal_rows(rng, 3, 10)
    np.testing.assert_allclose(
        np.sort(principal_angles(u1, u2)),
        np.sort(subspace_angles(u1.T, u2.T)),
        atol=1e-10,
    )
