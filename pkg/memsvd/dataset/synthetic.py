"""
Synthetic Feature Stream
Planted low-rank subspace plus Gaussian noise, rotating at a fixed rate per clip
"""

from typing import Iterator, List, Tuple

import numpy as np

from memsvd.core.dense import DenseMatrix
from memsvd.core.schema import ClipFeatures, SynthConfig
from memsvd.linalg.qr import householder_qr


def planted_frame(cfg: SynthConfig) -> Tuple[DenseMatrix, DenseMatrix]:
    """
    Orthonormal r×d rows B0 and, when drifting, C0 ⊥ B0 spanning the rotation
    planes. Drawn from a generator independent of the per-clip stream.
    """
    rng = np.random.default_rng([cfg.seed, 1])
    width = 2 * cfg.planted_rank if cfg.drift_rate > 0 else cfg.planted_rank
    q, _ = householder_qr(rng.standard_normal((cfg.d, width)))
    b0 = q[:, : cfg.planted_rank].T
    c0 = q[:, cfg.planted_rank :].T if cfg.drift_rate > 0 else np.zeros_like(b0)
    return b0, c0


def planted_basis(cfg: SynthConfig, t: int) -> DenseMatrix:
    """B_t = cos(θt)·B0 + sin(θt)·C0 with θ = drift_rate"""
    b0, c0 = planted_frame(cfg)
    angle = cfg.drift_rate * t
    return np.cos(angle) * b0 + np.sin(angle) * c0


def _actor_count(cfg: SynthConfig, rng: np.random.Generator) -> int:
    if isinstance(cfg.actors_per_clip, tuple):
        low, high = cfg.actors_per_clip
        return int(rng.integers(low, high + 1))
    return int(cfg.actors_per_clip)


def iter_stream(cfg: SynthConfig) -> Iterator[ClipFeatures]:
    """Lazily yield clips t = 0 … clip_count−1: Z_t·B_t + σ·G_t"""
    b0, c0 = planted_frame(cfg)
    rng = np.random.default_rng([cfg.seed, 2])
    for t in range(cfg.clip_count):
        n_t = _actor_count(cfg, rng)
        angle = cfg.drift_rate * t
        basis = np.cos(angle) * b0 + np.sin(angle) * c0
        z = rng.standard_normal((n_t, cfg.planted_rank))
        noise = rng.standard_normal((n_t, cfg.d))
        yield ClipFeatures(timestamp=t, features=z @ basis + cfg.noise_sigma * noise)


def generate_stream(cfg: SynthConfig) -> List[ClipFeatures]:
    """Deterministic per seed"""
    return list(iter_stream(cfg))
