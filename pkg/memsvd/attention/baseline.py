"""
Cross-Attention Baseline
Single-head memory cross-attention with fixed, seeded projections
"""

from typing import NamedTuple, Optional

import numpy as np
from scipy.special import softmax

from memsvd.config import config
from memsvd.core.dense import DenseMatrix, as_dense
from memsvd.core.errors import DimensionMismatchError, EmptyMemoryError
from memsvd.core.schema import AttentionWeights
from memsvd.linalg.counters import matmul_macs, tally


class KeyValueCache(NamedTuple):
    """Memory projections K_mem = M·w_k and V_mem = M·w_v"""

    keys: DenseMatrix  # N_mem × d_u
    values: DenseMatrix  # N_mem × d_u


def init_weights(
    d: Optional[int] = None,
    d_u: Optional[int] = None,
    seed: Optional[int] = None,
) -> AttentionWeights:
    """
    Draw w_q, w_k, w_v (d × d_u) and w_o (d_u × d) from U(±1/√fan_in).

    Same (d, d_u, seed) always yields identical weights.
    """
    d = config.DIM if d is None else d
    d_u = config.D_U if d_u is None else d_u
    seed = config.SEED if seed is None else seed
    rng = np.random.default_rng(seed)

    def uniform(fan_in: int, shape):
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape)

    return AttentionWeights(
        w_q=uniform(d, (d, d_u)),
        w_k=uniform(d, (d, d_u)),
        w_v=uniform(d, (d, d_u)),
        w_o=uniform(d_u, (d_u, d)),
        d_u=d_u,
        seed=seed,
    )


def project_memory(memory, weights: AttentionWeights) -> KeyValueCache:
    """Key/value projections of the memory, reusable across queries"""
    m = as_dense(memory, name="memory")
    if m.shape[0] == 0:
        raise EmptyMemoryError("attention needs at least one memory row")
    if m.shape[1] != weights.dim:
        raise DimensionMismatchError(
            f"memory has dimension {m.shape[1]}, weights expect {weights.dim}"
        )
    tally("kv_projection", 2 * matmul_macs(m.shape, weights.w_k.shape))
    return KeyValueCache(keys=m @ weights.w_k, values=m @ weights.w_v)


def _scale(weights: AttentionWeights, scale_by_du: Optional[bool]) -> float:
    if scale_by_du is None:
        scale_by_du = config.is_flag_enabled("scale_du")
    return float(np.sqrt(weights.d_u if scale_by_du else weights.dim))


def _queries(h, weights: AttentionWeights):
    arr = np.asarray(h, dtype=np.float64)
    squeeze = arr.ndim == 1
    rows = as_dense(arr, name="query features")
    if rows.shape[1] != weights.dim:
        raise DimensionMismatchError(
            f"query has dimension {rows.shape[1]}, weights expect {weights.dim}"
        )
    return rows, squeeze


def attention_weights(
    h,
    cache: KeyValueCache,
    weights: AttentionWeights,
    scale_by_du: Optional[bool] = None,
) -> DenseMatrix:
    """softmax(q·K_memᵀ/√d) over memory rows, one row per query"""
    rows, _ = _queries(h, weights)
    q = rows @ weights.w_q
    scores = (q @ cache.keys.T) / _scale(weights, scale_by_du)
    tally("attention", matmul_macs(rows.shape, weights.w_q.shape))
    tally("attention", matmul_macs(q.shape, cache.keys.T.shape))
    # scipy's softmax subtracts the row max before exponentiating
    return softmax(scores, axis=-1)


def cross_attention(
    h,
    memory,
    weights: AttentionWeights,
    scale_by_du: Optional[bool] = None,
    cache: Optional[KeyValueCache] = None,
) -> np.ndarray:
    """
    h + softmax(q·K_memᵀ/√d)·V_mem·w_o with q = h·w_q.

    Args:
        h: 1×d query (or a batch of query rows)
        memory: M, N_mem × d; ignored when `cache` is given
        weights: fixed projections
        scale_by_du: divide scores by √d_u instead of √d (default: scale_du flag)
        cache: precomputed key/value projections of M

    Raises:
        EmptyMemoryError: N_mem = 0
        DimensionMismatchError: inconsistent shapes
    """
    rows, squeeze = _queries(h, weights)
    if cache is None:
        cache = project_memory(memory, weights)
    probs = attention_weights(rows, cache, weights, scale_by_du)
    attended = probs @ cache.values
    out = rows + attended @ weights.w_o
    tally("attention", matmul_macs(probs.shape, cache.values.shape))
    tally("attention", matmul_macs(attended.shape, weights.w_o.shape))
    return out[0] if squeeze else out
