import numpy as np
import pytest

from memsvd.core.errors import (
    ConfigurationError,
    DimensionMismatchError,
    EmptyMemoryError,
    OrderingError,
)
from memsvd.core.schema import BankMode, ClipFeatures
from memsvd.memory.bank import MemoryBank


def clip(t, rows, d=4, value=None):
    features = np.full((rows, d), float(t) if value is None else value)
    return ClipFeatures(timestamp=t, features=features)


def test_push_and_materialize_single_clip():
    bank = MemoryBank(dim=256, half_window=30)
    bank.push_clip(ClipFeatures(timestamp=0, features=np.ones((3, 256))))
    assert bank.stored_clip_count == 1
    assert bank.materialize(center=0).shape == (3, 256)


def test_materialize_single_block_is_identity(rng):
    block = rng.standard_normal((2, 4))
    bank = MemoryBank(dim=4, half_window=1)
    bank.push_clip(ClipFeatures(timestamp=5, features=block))
    np.testing.assert_array_equal(bank.materialize(center=5), block)


def test_full_window_row_count():
    bank = MemoryBank(dim=8, half_window=30)
    for t in range(61):
        bank.push_clip(clip(t, 3, d=8))
    assert bank.materialize(center=30).shape == (183, 8)
    assert bank.n_mem(center=30) == 183


def test_eviction_keeps_count_constant():
    bank = MemoryBank(dim=4, half_window=2)
    for t in range(5):
        bank.push_clip(clip(t, 1))
    assert bank.stored_clip_count == 5
    bank.push_clip(clip(5, 1))
    assert bank.stored_clip_count == 5
    assert bank.timestamps == [1, 2, 3, 4, 5]


def test_empty_clip_contributes_nothing():
    bank = MemoryBank(dim=4, half_window=5)
    bank.push_clip(clip(0, 1))
    bank.push_features(1, np.zeros((0, 4)))
    bank.push_clip(clip(2, 2))
    memory = bank.materialize(center=1)
    assert memory.shape == (3, 4)
    np.testing.assert_array_equal(memory[:, 0], [0.0, 2.0, 2.0])


def test_window_rows_in_timestamp_and_actor_order(rng):
    blocks = {t: rng.standard_normal((int(rng.integers(0, 4)), 4)) for t in range(10)}
    bank = MemoryBank(dim=4, half_window=2)
    for t, block in blocks.items():
        bank.push_features(t, block)
    expected = np.vstack([blocks[t] for t in range(5, 10)])
    np.testing.assert_array_equal(bank.materialize(center=7), expected)


def test_exclude_center_drops_query_clip():
    bank = MemoryBank(dim=4, half_window=1, exclude_center=True)
    for t in range(3):
        bank.push_clip(clip(t, 2))
    np.testing.assert_array_equal(bank.materialize(center=1)[:, 0], [0, 0, 2, 2])


def test_materialize_is_read_only_snapshot():
    bank = MemoryBank(dim=4, half_window=1)
    bank.push_clip(clip(0, 2))
    memory = bank.materialize(center=0)
    with pytest.raises(ValueError):
        memory[0, 0] = 1.0


def test_push_errors():
    bank = MemoryBank(dim=4, half_window=1)
    bank.push_clip(clip(3, 1))
    with pytest.raises(OrderingError):
        bank.push_clip(clip(3, 1))
    with pytest.raises(OrderingError):
        bank.push_clip(clip(2, 1))
    with pytest.raises(DimensionMismatchError):
        bank.push_clip(clip(4, 1, d=5))


def test_empty_window_is_an_error():
    bank = MemoryBank(dim=4, half_window=1)
    with pytest.raises(EmptyMemoryError):
        bank.materialize(center=0)
    bank.push_clip(clip(0, 1))
    with pytest.raises(EmptyMemoryError):
        bank.materialize(center=10)


def test_empty_window_error_names_default_center():
    bank = MemoryBank(dim=4, half_window=0, exclude_center=True)
    bank.push_clip(clip(5, 2))
    with pytest.raises(EmptyMemoryError, match=r"of 5$") as excinfo:
        bank.materialize()
    assert "None" not in str(excinfo.value)


def test_online_mode_stores_no_clips(rng):
    bank = MemoryBank(dim=6, half_window=30, mode=BankMode.ONLINE)
    for t in range(8):
        bank.push_features(t, rng.standard_normal((3, 6)))
        assert bank.stored_clip_count == 0
        assert bank.stored_scalars == 0
    assert bank.basis.n_c <= 6
    with pytest.raises(ConfigurationError):
        bank.materialize(center=4)


def test_offline_stored_scalars_scale_with_window():
    bank = MemoryBank(dim=10, half_window=2)
    for t in range(5):
        bank.push_clip(clip(t, 3, d=10))
    assert bank.stored_scalars == 5 * 3 * 10
