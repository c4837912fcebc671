"""
Cross-attention head over the full memory matrix
"""

from typing import Optional

import numpy as np

from memsvd.attention.baseline import (
    KeyValueCache,
    cross_attention,
    init_weights,
    project_memory,
)
from memsvd.config import config
from memsvd.core.dense import as_dense
from memsvd.core.errors import EmptyMemoryError
from memsvd.core.registry import HeadRegistry
from memsvd.core.schema import AttentionWeights

from .base import BaseMemoryHead


@HeadRegistry.register("attention")
class AttentionHead(BaseMemoryHead):
    """Softmax cross-attention over every memory row; cost grows with N_mem"""

    def __init__(
        self,
        d: Optional[int] = None,
        d_u: Optional[int] = None,
        seed: Optional[int] = None,
        weights: Optional[AttentionWeights] = None,
        cache_kv: Optional[bool] = None,
        scale_du: Optional[bool] = None,
        **_: object,
    ):
        super().__init__()
        self.weights = weights if weights is not None else init_weights(d, d_u, seed)
        self.cache_kv = (
            config.is_flag_enabled("cache_kv") if cache_kv is None else cache_kv
        )
        self.scale_du = scale_du
        self.memory: Optional[np.ndarray] = None
        self.cache: Optional[KeyValueCache] = None

    def fit(self, memory) -> "AttentionHead":
        self.memory = as_dense(memory, name="memory", readonly=True)
        self.cache = project_memory(self.memory, self.weights) if self.cache_kv else None
        return self

    def query(self, h) -> np.ndarray:
        if self.memory is None:
            raise EmptyMemoryError("attention head has no memory; call fit first")
        return cross_attention(
            h,
            self.memory,
            self.weights,
            scale_by_du=self.scale_du,
            cache=self.cache,
        )

    @property
    def retained_scalars(self) -> int:
        if self.memory is None:
            return 0
        cached = 0 if self.cache is None else self.cache.keys.size + self.cache.values.size
        return int(self.memory.size + cached)
