"""
Memory Bank
Sliding window of per-clip actor features that materializes the memory matrix M
"""

from collections import deque
from typing import Deque, List, Optional, Union

import numpy as np
from loguru import logger

from memsvd.config import config
from memsvd.core.dense import DenseMatrix
from memsvd.core.errors import (
    ConfigurationError,
    DimensionMismatchError,
    EmptyMemoryError,
    OrderingError,
)
from memsvd.core.schema import BankMode, ClipFeatures, SubspaceBasis
from memsvd.subspace.incremental import OnlineTracker


class MemoryBank:
    """
    Clip store keyed by integer timestamps (one clip per second).

    Offline mode keeps the clips of a centred window [t−w, t+w] around any
    query time up to the newest clip. Online mode keeps no clips: every pushed
    clip is folded into an OnlineTracker and dropped.

    Not safe for concurrent mutation; `materialize` returns an independent
    read-only snapshot.
    """

    def __init__(
        self,
        dim: Optional[int] = None,
        half_window: Optional[int] = None,
        mode: Union[BankMode, str] = BankMode.OFFLINE,
        exclude_center: Optional[bool] = None,
        tracker: Optional[OnlineTracker] = None,
    ):
        self.dim = config.DIM if dim is None else dim
        self.half_window = config.HALF_WINDOW if half_window is None else half_window
        self.mode = BankMode(mode)
        self.exclude_center = (
            config.is_flag_enabled("exclude_center")
            if exclude_center is None
            else exclude_center
        )
        if self.half_window < 0:
            raise ConfigurationError(f"half_window must be >= 0, got {self.half_window}")

        self._clips: Deque[ClipFeatures] = deque()
        self._latest: Optional[int] = None
        self.tracker: Optional[OnlineTracker] = None
        if self.mode == BankMode.ONLINE:
            self.tracker = (
                tracker
                if tracker is not None
                else OnlineTracker(n_c=min(config.N_COMPONENTS, self.dim), dim=self.dim)
            )
        elif tracker is not None:
            raise ConfigurationError("offline banks do not take an online tracker")

        logger.debug(
            f"MemoryBank mode={self.mode.value} d={self.dim} w={self.half_window}"
        )

    # ========== Mutation ==========

    def push_clip(self, clip: ClipFeatures) -> "MemoryBank":
        """
        Append the newest clip and evict clips older than newest − 2w.

        Raises:
            OrderingError: timestamp not greater than every stored timestamp
            DimensionMismatchError: clip dimension differs from the bank's
        """
        if self._latest is not None and clip.timestamp <= self._latest:
            raise OrderingError(
                f"clip timestamp {clip.timestamp} does not follow {self._latest}"
            )
        if clip.dim != self.dim:
            raise DimensionMismatchError(
                f"clip has dimension {clip.dim}, bank has {self.dim}"
            )
        self._latest = clip.timestamp

        if self.mode == BankMode.ONLINE:
            self.tracker.observe(clip)
            return self

        self._clips.append(clip)
        horizon = clip.timestamp - 2 * self.half_window
        while self._clips and self._clips[0].timestamp < horizon:
            self._clips.popleft()
        return self

    def push_features(self, timestamp: int, features) -> "MemoryBank":
        """Convenience wrapper building the ClipFeatures value"""
        arr = np.asarray(features, dtype=np.float64)
        if arr.size == 0:
            arr = arr.reshape(0, self.dim)
        return self.push_clip(ClipFeatures(timestamp=timestamp, features=arr))

    # ========== Queries ==========

    def window_clips(self, center: Optional[int] = None) -> List[ClipFeatures]:
        """Clips with |t − center| <= w, in timestamp order"""
        if self.mode == BankMode.ONLINE:
            raise ConfigurationError("online banks store no clips to materialize")
        center = self.default_center if center is None else center
        return [
            clip
            for clip in self._clips
            if abs(clip.timestamp - center) <= self.half_window
            and not (self.exclude_center and clip.timestamp == center)
        ]

    def materialize(self, center: Optional[int] = None) -> DenseMatrix:
        """
        M = [H_{center−w}; …; H_{center+w}] as an N_mem × d read-only matrix.

        Args:
            center: query timestamp (default: newest − w)

        Raises:
            EmptyMemoryError: no clips inside the window
        """
        clips = self.window_clips(center)
        if not clips:
            center = self.default_center if center is None else center
            raise EmptyMemoryError(f"no clips within ±{self.half_window} of {center}")
        memory = np.vstack([clip.features for clip in clips])
        memory.setflags(write=False)
        return memory

    def n_mem(self, center: Optional[int] = None) -> int:
        return int(sum(clip.n_actors for clip in self.window_clips(center)))

    @property
    def default_center(self) -> int:
        if self._latest is None:
            raise EmptyMemoryError("bank is empty")
        return self._latest - self.half_window

    @property
    def timestamps(self) -> List[int]:
        return [clip.timestamp for clip in self._clips]

    @property
    def latest_timestamp(self) -> Optional[int]:
        return self._latest

    @property
    def basis(self) -> SubspaceBasis:
        """Online basis (online mode only)"""
        if self.tracker is None:
            raise ConfigurationError("offline banks have no tracked basis")
        return self.tracker.basis

    @property
    def stored_clip_count(self) -> int:
        return len(self._clips)

    @property
    def stored_scalars(self) -> int:
        """Feature scalars held in clip storage (0 in online mode)"""
        return int(sum(clip.features.size for clip in self._clips))

    def __len__(self) -> int:
        return self.stored_clip_count

    def __repr__(self):
        return (
            f"<MemoryBank mode={self.mode.value} d={self.dim} "
            f"w={self.half_window} clips={self.stored_clip_count}>"
        )
