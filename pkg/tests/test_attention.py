import numpy as np
import pytest

from memsvd.attention import (
    attention_weights,
    cross_attention,
    flops_attention,
    flops_basis,
    flops_memsvd,
    init_weights,
    parameter_count,
    project_memory,
)
from memsvd.core.errors import DimensionMismatchError, EmptyMemoryError


def reference_attention(h, memory, weights):
    """Extended-precision oracle"""
    ld = np.longdouble
    h, memory = np.asarray(h, ld), np.asarray(memory, ld)
    w_q, w_k, w_v, w_o = (np.asarray(getattr(weights, n), ld) for n in ("w_q", "w_k", "w_v", "w_o"))
    q = h @ w_q
    scores = (memory @ w_k) @ q / np.sqrt(ld(weights.dim))
    scores -= scores.max()
    probs = np.exp(scores) / np.exp(scores).sum()
    return h + (probs @ (memory @ w_v)) @ w_o


@pytest.fixture(scope="module")
def weights():
    return init_weights(d=64, d_u=16, seed=7)


def test_weights_are_seeded():
    a, b = init_weights(32, 8, seed=3), init_weights(32, 8, seed=3)
    np.testing.assert_array_equal(a.w_q, b.w_q)
    np.testing.assert_array_equal(a.w_o, b.w_o)
    assert not np.array_equal(a.w_k, init_weights(32, 8, seed=4).w_k)
    assert np.max(np.abs(a.w_q)) <= 1.0 / np.sqrt(32)
    assert np.max(np.abs(a.w_o)) <= 1.0 / np.sqrt(8)


@pytest.mark.parametrize("n_mem", [1, 12])
def test_matches_extended_precision(rng, weights, n_mem):
    h = rng.standard_normal(64)
    memory = rng.standard_normal((n_mem, 64))
    out = cross_attention(h, memory, weights, scale_by_du=False)
    expected = reference_attention(h, memory, weights)
    np.testing.assert_allclose(out, expected.astype(np.float64), rtol=1e-10, atol=1e-12)


def test_single_row_memory_uses_its_value(rng, weights):
    h = rng.standard_normal(64)
    memory = rng.standard_normal((1, 64))
    expected = h + (memory[0] @ weights.w_v) @ weights.w_o
    np.testing.assert_allclose(
        cross_attention(h, memory, weights, scale_by_du=False), expected, atol=1e-12
    )


def test_identical_rows_give_uniform_weights(rng, weights):
    memory = np.tile(rng.standard_normal(64), (5, 1))
    probs = attention_weights(rng.standard_normal(64), project_memory(memory, weights), weights)
    np.testing.assert_allclose(probs, np.full((1, 5), 0.2), atol=1e-15)


def test_weights_are_a_distribution(rng, weights):
    memory = 10.0 * rng.standard_normal((40, 64))
    probs = attention_weights(rng.standard_normal((3, 64)), project_memory(memory, weights), weights)
    assert probs.shape == (3, 40)
    assert np.all(probs >= 0.0)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)


def test_memory_permutation_invariance(rng, weights):
    h = rng.standard_normal(64)
    memory = rng.standard_normal((20, 64))
    permuted = memory[rng.permutation(20)]
    np.testing.assert_allclose(
        cross_attention(h, memory, weights), cross_attention(h, permuted, weights), atol=1e-12
    )


def test_cache_gives_same_output(rng, weights):
    h = rng.standard_normal((4, 64))
    memory = rng.standard_normal((15, 64))
    cache = project_memory(memory, weights)
    np.testing.assert_allclose(
        cross_attention(h, None, weights, cache=cache),
        cross_attention(h, memory, weights),
        atol=1e-14,
    )


def test_score_scaling_changes_output(rng, weights):
    h = rng.standard_normal(64)
    memory = rng.standard_normal((10, 64))
    by_d = cross_attention(h, memory, weights, scale_by_du=False)
    by_du = cross_attention(h, memory, weights, scale_by_du=True)
    assert not np.allclose(by_d, by_du)


def test_errors(rng, weights):
    with pytest.raises(EmptyMemoryError):
        cross_attention(rng.standard_normal(64), np.zeros((0, 64)), weights)
    with pytest.raises(DimensionMismatchError):
        cross_attention(rng.standard_normal(63), rng.standard_normal((4, 64)), weights)
    with pytest.raises(DimensionMismatchError):
        cross_attention(rng.standard_normal(64), rng.standard_normal((4, 63)), weights)


# ========== Operation counts ==========


def test_attention_flops_small_values():
    assert flops_attention(1, 1, 1) == 6
    assert flops_attention(1, 1, 1, cache_kv=True) == 4


@pytest.mark.parametrize("cache_kv,slope", [(False, 2 * 2304 * 512 + 2 * 512), (True, 2 * 512)])
def test_attention_flops_linear_in_memory(cache_kv, slope):
    counts = [flops_attention(n, 2304, 512, cache_kv) for n in range(1, 200, 13)]
    steps = np.diff(counts)
    assert np.all(steps == 13 * slope)


def test_memsvd_flops_independent_of_window():
    assert flops_memsvd(10, 2304) == 46080


def test_default_window_ratios():
    n_mem = 183
    cached = flops_attention(n_mem, 2304, 512, cache_kv=True)
    uncached = flops_attention(n_mem, 2304, 512)
    memsvd = flops_memsvd(10, 2304)
    assert cached / memsvd == pytest.approx(55.27, rel=1e-3)
    assert cached / memsvd >= 10
    assert uncached > cached


def test_basis_flops():
    exact = flops_basis(183, 2304, 10, "exact")
    randomized = flops_basis(183, 2304, 10, "randomized")
    assert exact / randomized == pytest.approx(18.3)
    online = [flops_basis(n, 2304, 10, "online-update") for n in (20, 200, 2000)]
    assert online[0] == online[1] == online[2] == 13**3 + 2 * 3 * 10 * 2304


def test_basis_flops_monotone_in_window():
    for method in ("exact", "randomized"):
        counts = [flops_basis(n, 256, 10, method) for n in (30, 60, 120)]
        assert counts == sorted(counts) and len(set(counts)) == 3


def test_parameter_count():
    assert parameter_count("attention", 2304, 512) == 4 * 2304 * 512
    assert parameter_count("memsvd", 2304, 512) == 0
    assert parameter_count("omemsvd", 2304, 512) == 0
    with pytest.raises(KeyError):
        parameter_count("transformer", 2304, 512)


def test_non_positive_sizes_rejected():
    with pytest.raises(ValueError):
        flops_attention(0, 64, 16)
    with pytest.raises(ValueError):
        flops_memsvd(10, 0)
