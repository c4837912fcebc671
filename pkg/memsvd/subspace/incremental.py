"""
Online Subspace Memory
Brand-style incremental SVD with a forgetting factor: each arriving clip is
folded into {U_mem, Σ_mem} and discarded
"""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from memsvd.config import config
from memsvd.core.dense import DenseMatrix, as_dense, gram_residual
from memsvd.core.errors import (
    ConfigurationError,
    DimensionMismatchError,
    EmptyMemoryError,
    RankError,
)
from memsvd.core.schema import BasisMethod, ClipFeatures, OnlineState, SubspaceBasis
from memsvd.linalg.counters import tally
from memsvd.linalg.metrics import subspace_distance
from memsvd.linalg.qr import householder_qr, orthonormal_completion
from memsvd.linalg.svd import svd
from memsvd.subspace.basis import compute_basis

# Residual energy at or below this fraction of ‖H‖_F is treated as in-span
VANISHING_RESIDUAL_RTOL = 1e-12

ClipLike = Union[ClipFeatures, np.ndarray]


def _row_signs(u_rows: DenseMatrix) -> DenseMatrix:
    """Largest-magnitude entry of every basis row positive"""
    pivots = np.argmax(np.abs(u_rows), axis=1)
    signs = np.where(u_rows[np.arange(u_rows.shape[0]), pivots] < 0.0, -1.0, 1.0)
    return u_rows * signs[:, None]


def init_online(
    first_clips,
    n_c: Optional[int] = None,
    forgetting_factor: Optional[float] = None,
    clips_seen: int = 1,
) -> OnlineState:
    """
    Bootstrap an online state from the offline basis of the first clips.

    Fewer than n_c independent rows are padded with orthonormal null directions
    (sigma 0), which later updates fill in.

    Raises:
        EmptyMemoryError: no rows
        RankError: n_c > d
    """
    m = as_dense(first_clips, name="bootstrap clips")
    n_c = config.N_COMPONENTS if n_c is None else n_c
    forgetting_factor = (
        config.FORGETTING_FACTOR if forgetting_factor is None else forgetting_factor
    )
    rows, d = m.shape
    if rows == 0:
        raise EmptyMemoryError("cannot bootstrap an online basis without features")
    if not 1 <= n_c <= d:
        raise RankError(f"n_c={n_c} outside [1, d={d}]")

    k = min(n_c, rows)
    basis = compute_basis(m, k, method=BasisMethod.EXACT, center=False)
    u_rows, sigma = basis.u_mem, basis.sigma_mem
    if k < n_c:
        u_rows = _row_signs(orthonormal_completion(u_rows.T, n_c).T)
        sigma = np.concatenate([sigma, np.zeros(n_c - k)])
        logger.debug(f"Padded bootstrap basis with {n_c - k} null directions")

    return OnlineState(
        basis=SubspaceBasis(u_mem=u_rows, sigma_mem=sigma),
        forgetting_factor=forgetting_factor,
        clips_seen=clips_seen,
    )


def _fold_block(
    u_rows: DenseMatrix,
    sigma: np.ndarray,
    h: DenseMatrix,
    lam: float,
) -> Tuple[DenseMatrix, np.ndarray]:
    """
    One rank-N fold of h (N × d, N <= d) into the basis:
        Ĥ = H(I − UᵀU),  Ĥᵀ = Q·R,
        K = [[λΣ, U·Hᵀ], [0, R]] = U′Σ′V′ᵀ,
        Uᵀ ← [Uᵀ Q]·U′ truncated to n_c.
    """
    n_c, d = u_rows.shape
    n = h.shape[0]
    coeffs = u_rows @ h.T  # n_c × N
    residual = h - coeffs.T @ u_rows
    tally("update", 2 * n * n_c * d)

    h_norm = np.linalg.norm(h)
    if h_norm == 0.0 or np.linalg.norm(residual) <= VANISHING_RESIDUAL_RTOL * h_norm:
        block = np.hstack([np.diag(lam * sigma), coeffs])
        extended = u_rows
    else:
        q, r = householder_qr(residual.T)
        block = np.zeros((n_c + n, n_c + n))
        block[:n_c, :n_c] = np.diag(lam * sigma)
        block[:n_c, n_c:] = coeffs
        block[n_c:, n_c:] = r
        extended = np.vstack([u_rows, q.T])

    factors = svd(block)
    new_rows = factors.u[:, :n_c].T @ extended
    tally("update", n_c * extended.shape[0] * d)
    return new_rows, factors.sigma[:n_c]


def _finish(
    state: OnlineState,
    u_rows: DenseMatrix,
    sigma: np.ndarray,
    clips: int = 1,
) -> OnlineState:
    """Re-orthonormalize when due and wrap the next immutable state"""
    since = state.updates_since_reorth + 1
    residual = gram_residual(u_rows)
    if residual > config.REORTH_TOL or since >= config.REORTH_INTERVAL:
        q, _ = householder_qr(u_rows.T)
        u_rows = q.T
        logger.debug(
            f"Re-orthonormalized online basis (residual={residual:.2e}, "
            f"updates since last={since})"
        )
        since = 0

    sigma = np.maximum(sigma, 0.0)
    return OnlineState(
        basis=SubspaceBasis(u_mem=_row_signs(u_rows), sigma_mem=sigma),
        forgetting_factor=state.forgetting_factor,
        clips_seen=state.clips_seen + clips,
        updates_since_reorth=since,
    )


def _clip_rows(new_clip: ClipLike, dim: int) -> DenseMatrix:
    data = new_clip.features if isinstance(new_clip, ClipFeatures) else new_clip
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[0] == 0:
        rows = np.zeros((0, arr.shape[1]))
    else:
        rows = as_dense(arr, name="clip features")
    if rows.shape[1] != dim:
        raise DimensionMismatchError(
            f"clip has dimension {rows.shape[1]}, online basis has {dim}"
        )
    return rows


def update(state: OnlineState, new_clip: ClipLike) -> OnlineState:
    """
    Fold one clip (N × d) into the online basis.

    λ scales Σ_mem once per clip. Clips with more than d rows are folded in
    chunks of d rows; an empty clip only applies the forgetting factor.

    Raises:
        DimensionMismatchError: clip dimension differs from the basis
        NonFiniteInputError: NaN/Inf features
    """
    h = _clip_rows(new_clip, state.dim)
    u_rows = state.basis.u_mem
    sigma = state.basis.sigma_mem
    lam = state.forgetting_factor

    if h.shape[0] == 0:
        return _finish(state, u_rows.copy(), lam * sigma)

    d = state.dim
    for start in range(0, h.shape[0], d):
        u_rows, sigma = _fold_block(u_rows, sigma, h[start : start + d], lam)
        lam = 1.0
    return _finish(state, u_rows, sigma)


def update_single(state: OnlineState, feature) -> OnlineState:
    """
    Rank-one fold of a single actor feature.

    The QR stage reduces to r = ‖ĥ‖₂, q = ĥ/r; for an in-span (or zero)
    feature the residual column is dropped.
    """
    h = _clip_rows(feature, state.dim)
    if h.shape[0] != 1:
        raise DimensionMismatchError(
            f"update_single takes one feature row, got {h.shape[0]}"
        )
    h = h[0]
    u_rows = state.basis.u_mem
    sigma = state.basis.sigma_mem
    n_c, d = u_rows.shape
    lam = state.forgetting_factor

    coeffs = u_rows @ h
    residual = h - coeffs @ u_rows
    r = float(np.linalg.norm(residual))
    tally("update", 2 * n_c * d)

    h_norm = float(np.linalg.norm(h))
    if h_norm == 0.0 or r <= VANISHING_RESIDUAL_RTOL * h_norm:
        block = np.hstack([np.diag(lam * sigma), coeffs[:, None]])
        extended = u_rows
    else:
        block = np.zeros((n_c + 1, n_c + 1))
        block[:n_c, :n_c] = np.diag(lam * sigma)
        block[:n_c, n_c] = coeffs
        block[n_c, n_c] = r
        extended = np.vstack([u_rows, residual / r])

    factors = svd(block)
    new_rows = factors.u[:, :n_c].T @ extended
    tally("update", n_c * extended.shape[0] * d)
    return _finish(state, new_rows, factors.sigma[:n_c])


def _stack_clips(clips: Sequence[ClipLike]) -> DenseMatrix:
    blocks = [
        np.asarray(c.features if isinstance(c, ClipFeatures) else c, dtype=np.float64)
        for c in clips
    ]
    blocks = [b.reshape(1, -1) if b.ndim == 1 else b for b in blocks]
    if not blocks:
        raise EmptyMemoryError("reference clips are empty")
    stacked = np.vstack(blocks)
    if stacked.shape[0] == 0:
        raise EmptyMemoryError("reference clips contain no features")
    return stacked


def drift_report(state: OnlineState, reference_clips: Sequence[ClipLike]) -> float:
    """
    Subspace distance between the tracked basis and the offline basis of
    `reference_clips` with the same n_c.
    """
    reference = compute_basis(
        _stack_clips(reference_clips),
        state.n_c,
        method=BasisMethod.EXACT,
        center=False,
    )
    return subspace_distance(state.basis.u_mem, reference.u_mem)


class OnlineTracker:
    """
    Mutable owner of an OnlineState for streaming use.

    Buffers the first clips until they hold at least n_c rows, bootstraps from
    them, then folds every further clip with `update`.
    """

    def __init__(
        self,
        n_c: Optional[int] = None,
        forgetting_factor: Optional[float] = None,
        dim: Optional[int] = None,
        center: bool = False,
    ):
        if center:
            raise ConfigurationError("online tracking does not support mean-centring")
        self.n_c = config.N_COMPONENTS if n_c is None else n_c
        self.forgetting_factor = (
            config.FORGETTING_FACTOR if forgetting_factor is None else forgetting_factor
        )
        if not 0.0 < self.forgetting_factor <= 1.0:
            raise ConfigurationError(
                f"forgetting factor must lie in (0, 1], got {self.forgetting_factor}"
            )
        self.dim = dim
        self._pending: List[DenseMatrix] = []
        self._pending_clips = 0
        self._state: Optional[OnlineState] = None

    @property
    def ready(self) -> bool:
        return self._state is not None

    @property
    def state(self) -> OnlineState:
        if self._state is None:
            raise EmptyMemoryError("online tracker has not been bootstrapped yet")
        return self._state

    @state.setter
    def state(self, value: OnlineState):
        self._state = value
        self.dim = value.dim
        self._pending, self._pending_clips = [], 0

    @property
    def basis(self) -> SubspaceBasis:
        return self.state.basis

    @property
    def retained_scalars(self) -> int:
        if self._state is not None:
            return self._state.retained_scalars
        return int(sum(block.size for block in self._pending))

    def observe(self, clip: ClipLike) -> None:
        """Fold one clip into the tracked basis"""
        if self._state is not None:
            self._state = update(self._state, clip)
            return

        data = clip.features if isinstance(clip, ClipFeatures) else clip
        arr = np.asarray(data, dtype=np.float64)
        if self.dim is None:
            self.dim = int(arr.shape[-1])
        rows = _clip_rows(arr, self.dim)
        self._pending.append(rows)
        self._pending_clips += 1

        buffered = sum(block.shape[0] for block in self._pending)
        if buffered >= min(self.n_c, self.dim):
            self._state = init_online(
                np.vstack(self._pending),
                self.n_c,
                self.forgetting_factor,
                clips_seen=self._pending_clips,
            )
            logger.debug(
                f"Bootstrapped online basis from {self._pending_clips} clips "
                f"({buffered} rows)"
            )
            self._pending, self._pending_clips = [], 0
