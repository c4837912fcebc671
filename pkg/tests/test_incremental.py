import numpy as np
import pytest
from scipy.linalg import svdvals

from memsvd.config import config
from memsvd.core.errors import ConfigurationError, DimensionMismatchError, EmptyMemoryError
from memsvd.core.schema import BenchSpec, ClipFeatures, SynthConfig
from memsvd.benchmark.drift import run_drift
from memsvd.dataset.synthetic import generate_stream
from memsvd.linalg.counters import count_ops
from memsvd.linalg.metrics import subspace_distance
from memsvd.subspace.basis import compute_basis
from memsvd.subspace.incremental import (
    OnlineTracker,
    drift_report,
    init_online,
    update,
    update_single,
)

from .conftest import random_orthonormal_rows


def test_init_online_spans_orthogonal_rows():
    rows = np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    state = init_online(rows, 2, 1.0)
    assert subspace_distance(state.basis.u_mem, np.eye(3)[:2]) < 1e-12
    np.testing.assert_allclose(state.basis.sigma_mem, [2.0, 1.0])
    assert state.forgetting_factor == 1.0


def test_init_online_pads_null_directions(rng):
    state = init_online(rng.standard_normal((3, 16)), 8, 0.9)
    assert state.n_c == 8
    np.testing.assert_array_equal(state.basis.sigma_mem[3:], 0.0)
    np.testing.assert_allclose(state.basis.u_mem @ state.basis.u_mem.T, np.eye(8), atol=1e-12)


def test_init_online_matches_offline_bootstrap(rng):
    clips = rng.standard_normal((90, 40))
    state = init_online(clips, 10, 0.95)
    offline = compute_basis(clips, 10, center=False)
    assert subspace_distance(state.basis.u_mem, offline.u_mem) < 1e-12


def test_init_online_errors(rng):
    with pytest.raises(EmptyMemoryError):
        init_online(np.zeros((0, 4)), 2, 1.0)
    with pytest.raises(ValueError):
        init_online(rng.standard_normal((4, 4)), 2, 1.5)


def test_streaming_clips_matches_offline_svd(rng):
    d, n_c, actors = 64, 30, 3
    clips = [rng.standard_normal((actors, d)) for _ in range(10)]
    state = init_online(clips[0], n_c, 1.0)
    for clip in clips[1:]:
        state = update(state, clip)

    offline = compute_basis(np.vstack(clips), n_c, center=False)
    assert subspace_distance(state.basis.u_mem, offline.u_mem) <= 1e-7
    np.testing.assert_allclose(state.basis.sigma_mem, offline.sigma_mem, rtol=1e-9)
    assert state.clips_seen == 10


def test_streaming_rows_matches_offline_svd(rng):
    d, n_c = 64, 30
    rows = rng.standard_normal((30, d))
    state = init_online(rows[:1], n_c, 1.0)
    for row in rows[1:]:
        state = update_single(state, row)

    offline = compute_basis(rows, n_c, center=False)
    assert subspace_distance(state.basis.u_mem, offline.u_mem) <= 1e-7


def test_single_vector_path_matches_general_path(rng):
    d, n_c = 32, 6
    # Decaying scales keep a clear gap at the truncation boundary
    scales = 0.8 ** np.arange(d)
    state = init_online(rng.standard_normal((n_c, d)) * scales, n_c, 0.95)
    for _ in range(500):
        feature = rng.standard_normal(d) * scales
        fast = update_single(state, feature)
        general = update(state, feature[None, :])
        assert subspace_distance(fast.basis.u_mem, general.basis.u_mem) <= 1e-10
        np.testing.assert_allclose(
            fast.basis.sigma_mem, general.basis.sigma_mem, rtol=1e-10, atol=1e-12
        )
        state = general


def test_in_span_update_keeps_subspace(rng):
    memory = rng.standard_normal((5, 20))
    state = init_online(memory, 5, 1.0)
    clip = rng.standard_normal((3, 5)) @ state.basis.u_mem
    after = update(state, clip)

    assert subspace_distance(after.basis.u_mem, state.basis.u_mem) <= 1e-8
    np.testing.assert_allclose(
        after.basis.sigma_mem, svdvals(np.vstack([memory, clip]))[:5], rtol=1e-9
    )
    single = update_single(state, clip[0])
    assert subspace_distance(single.basis.u_mem, state.basis.u_mem) <= 1e-8


def test_zero_feature_without_forgetting_is_identity(rng):
    state = init_online(rng.standard_normal((5, 12)), 5, 1.0)
    after = update_single(state, np.zeros(12))
    np.testing.assert_allclose(after.basis.u_mem, state.basis.u_mem, atol=1e-12)
    np.testing.assert_allclose(after.basis.sigma_mem, state.basis.sigma_mem, rtol=1e-12)


def test_forgetting_scales_sigma_once_per_clip(rng):
    state = init_online(rng.standard_normal((4, 10)), 4, 0.5)
    after = update(state, np.zeros((0, 10)))
    np.testing.assert_allclose(after.basis.sigma_mem, 0.5 * state.basis.sigma_mem)
    np.testing.assert_array_equal(after.basis.u_mem, state.basis.u_mem)
    assert after.clips_seen == state.clips_seen + 1


def test_tall_clip_is_folded_in_chunks(rng):
    d = 4
    first = rng.standard_normal((2, d))
    clip = rng.standard_normal((10, d))
    state = update(init_online(first, d, 1.0), clip)
    np.testing.assert_allclose(
        state.basis.sigma_mem, svdvals(np.vstack([first, clip])), rtol=1e-9
    )


def test_update_rejects_wrong_dimension(rng):
    state = init_online(rng.standard_normal((3, 6)), 2, 1.0)
    with pytest.raises(DimensionMismatchError):
        update(state, np.ones((2, 5)))
    with pytest.raises(DimensionMismatchError):
        update_single(state, np.ones((2, 6)))


def test_periodic_reorthonormalization(rng, monkeypatch):
    monkeypatch.setattr(config, "REORTH_INTERVAL", 3)
    state = init_online(rng.standard_normal((4, 10)), 4, 0.9)
    counts = []
    for _ in range(6):
        state = update(state, rng.standard_normal((2, 10)))
        counts.append(state.updates_since_reorth)
    assert counts == [1, 2, 0, 1, 2, 0]


def test_state_size_and_cost_flat_over_stream():
    d, n_c = 64, 10
    cfg = SynthConfig(d=d, planted_rank=10, noise_sigma=0.1, seed=3, clip_count=604)
    clips = generate_stream(cfg)
    state = init_online(np.vstack([c.features for c in clips[:4]]), n_c, 0.95)

    costs = []
    for clip in clips[4:]:
        with count_ops() as ops:
            state = update(state, clip)
        costs.append(ops.total)
        assert state.retained_scalars == n_c * (d + 1)

    blocks = np.asarray(costs, dtype=float).reshape(6, 100).mean(axis=1)
    assert np.all(np.abs(blocks - blocks.mean()) <= 0.1 * blocks.mean())


def test_drift_report_distances(rng):
    planted = random_orthonormal_rows(rng, 4, 12)
    data = rng.standard_normal((20, 4)) @ planted
    state = init_online(data[:6], 4, 1.0)
    for start in range(6, 20, 2):
        state = update(state, data[start : start + 2])
    assert drift_report(state, [data]) <= 1e-7

    e = np.eye(12)
    far = init_online(e[:4], 4, 1.0)
    reference = [ClipFeatures(timestamp=0, features=e[4:8])]
    assert drift_report(far, reference) == pytest.approx(np.sqrt(8.0))

    with pytest.raises(EmptyMemoryError):
        drift_report(state, [])


def test_tracker_bootstraps_then_updates(rng):
    tracker = OnlineTracker(n_c=5, forgetting_factor=0.9, dim=8)
    assert not tracker.ready
    with pytest.raises(EmptyMemoryError):
        tracker.basis
    tracker.observe(rng.standard_normal((3, 8)))
    assert not tracker.ready and tracker.retained_scalars == 24
    tracker.observe(rng.standard_normal((3, 8)))
    assert tracker.ready and tracker.state.clips_seen == 2
    tracker.observe(rng.standard_normal((3, 8)))
    assert tracker.state.clips_seen == 3
    assert tracker.retained_scalars == 5 * 9


def test_tracker_rejects_centering():
    with pytest.raises(ConfigurationError):
        OnlineTracker(n_c=2, center=True)


def test_lower_forgetting_tracks_recent_subspace_closer():
    spec = BenchSpec(
        mode="drift",
        d=32,
        n_c=4,
        planted_rank=4,
        noise_sigma=0.005,
        drift_rate=0.05,
        clip_count=300,
        checkpoint_every=50,
        lambda_list=[0.8, 0.9, 0.95, 0.99],
    )
    rows = run_drift(spec)
    assert len(rows) == 4 * 6
    final = [r.subspace_distance for r in rows if r.clip_index == 300]
    assert final == sorted(final)
    assert all(b > a for a, b in zip(final, final[1:]))


def test_drift_is_zero_without_forgetting_or_motion():
    spec = BenchSpec(
        mode="drift",
        d=24,
        n_c=3,
        planted_rank=3,
        noise_sigma=0.0,
        drift_rate=0.0,
        clip_count=100,
        checkpoint_every=50,
        lambda_list=[1.0],
    )
    rows = run_drift(spec)
    assert [r.clip_index for r in rows] == [50, 100]
    assert all(r.subspace_distance <= 1e-7 for r in rows)
