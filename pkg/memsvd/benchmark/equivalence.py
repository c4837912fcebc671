"""
Equivalence checks
Algebraic identities the subspace heads must satisfy, reported with their
errors and tolerances
"""

from typing import List, Tuple

import numpy as np
from loguru import logger

from memsvd.core.schema import BenchSpec, EquivalenceRow, SubspaceBasis
from memsvd.linalg.metrics import subspace_distance
from memsvd.linalg.qr import householder_qr
from memsvd.subspace.basis import (
    coefficient_matrix,
    compute_basis,
    project_reconstruct,
    project_via_coefficients,
)
from memsvd.subspace.incremental import init_online, update, update_single

COEFFICIENT_RTOL = 1e-7
LOSSLESS_RTOL = 1e-9
STREAM_TOL = 1e-7
SINGLE_PATH_TOL = 1e-10
SINGLE_PATH_UPDATES = 50
STREAM_CLIPS = 10


def _perturbed(basis: SubspaceBasis, perturb: float, rng: np.random.Generator) -> SubspaceBasis:
    """Negative control: rotate U_mem away from the true subspace"""
    if perturb <= 0.0:
        return basis
    noisy = basis.u_mem + perturb * rng.standard_normal(basis.u_mem.shape)
    q, _ = householder_qr(noisy.T)
    return SubspaceBasis(u_mem=q.T, sigma_mem=basis.sigma_mem)


def _coefficient_error(
    memory: np.ndarray,
    queries: np.ndarray,
    n_c: int,
    perturb: float,
    rng: np.random.Generator,
) -> float:
    """max |project_reconstruct(h) − (h·Mᵀ)·Cᵀ·C·M| relative to max ‖h‖"""
    basis = _perturbed(compute_basis(memory, n_c, center=False), perturb, rng)
    coefficients = coefficient_matrix(memory, n_c)
    direct = project_reconstruct(queries, basis)
    attention_like = project_via_coefficients(queries, memory, coefficients)
    scale = float(np.max(np.linalg.norm(queries, axis=1)))
    return float(np.max(np.abs(direct - attention_like))) / scale


def _streaming_errors(
    rows: np.ndarray,
    actors: int,
    n_c: int,
) -> Tuple[float, float]:
    """λ=1 clip-by-clip and row-by-row streams against the offline basis"""
    offline = compute_basis(rows, n_c, center=False)

    state = init_online(rows[:actors], n_c, 1.0)
    for start in range(actors, rows.shape[0], actors):
        state = update(state, rows[start : start + actors])
    clip_error = subspace_distance(state.basis.u_mem, offline.u_mem)

    state = init_online(rows[:1], n_c, 1.0)
    for row in rows[1:]:
        state = update_single(state, row)
    row_error = subspace_distance(state.basis.u_mem, offline.u_mem)
    return clip_error, row_error


def _single_path_error(d: int, n_c: int, rng: np.random.Generator) -> float:
    """Largest disagreement between update_single and update on 1-row clips"""
    worst = 0.0
    # Decaying scales keep a clear gap at the truncation boundary
    scales = 0.8 ** np.arange(d)
    state = init_online(rng.standard_normal((n_c, d)) * scales, n_c, 0.95)
    for _ in range(SINGLE_PATH_UPDATES):
        feature = rng.standard_normal(d) * scales
        fast = update_single(state, feature)
        general = update(state, feature[None, :])
        distance = subspace_distance(fast.basis.u_mem, general.basis.u_mem)
        sigma_gap = float(
            np.max(np.abs(fast.basis.sigma_mem - general.basis.sigma_mem))
            / general.basis.sigma_mem[0]
        )
        worst = max(worst, distance, sigma_gap)
        state = general
    return worst


def run_equivalence(spec: BenchSpec) -> Tuple[List[EquivalenceRow], bool]:
    """
    Returns:
        (rows, all_passed)
    """
    rng = np.random.default_rng(spec.seed)
    d = spec.d
    n_mem = min(4 * spec.actors_per_clip, d)
    n_c = min(spec.n_c, n_mem)
    memory = rng.standard_normal((n_mem, d))
    queries = rng.standard_normal((spec.actors_per_clip, d))

    stream_rows = min(STREAM_CLIPS * spec.actors_per_clip, d)
    stream = rng.standard_normal((stream_rows, d))
    clip_error, row_error = _streaming_errors(stream, spec.actors_per_clip, stream_rows)

    checks = [
        (
            "projection_equals_coefficient_form",
            _coefficient_error(memory, queries, n_c, spec.perturb, rng),
            COEFFICIENT_RTOL,
        ),
        (
            "full_rank_projection_lossless",
            _coefficient_error(memory, queries, n_mem, spec.perturb, rng),
            LOSSLESS_RTOL,
        ),
        ("incremental_matches_offline", clip_error, STREAM_TOL),
        ("single_vector_stream_matches_offline", row_error, STREAM_TOL),
        (
            "single_vector_path_matches_general",
            _single_path_error(d, min(spec.n_c, d), rng),
            SINGLE_PATH_TOL,
        ),
    ]

    rows = []
    for name, error, tolerance in checks:
        passed = bool(error <= tolerance)
        if not passed:
            logger.warning(f"Equivalence check failed: {name} error={error:.3e} > {tolerance:.1e}")
        rows.append(
            EquivalenceRow(test=name, max_abs_err=error, tolerance=tolerance, passed=passed)
        )
    return rows, all(row.passed for row in rows)
