"""
Subspace heads: offline basis per window, and online tracked basis
"""

from typing import Optional, Union

import numpy as np

from memsvd.core.errors import EmptyMemoryError
from memsvd.core.registry import HeadRegistry
from memsvd.core.schema import BasisMethod, RandomizedSvd, SubspaceBasis
from memsvd.subspace.basis import compute_basis, residual_update
from memsvd.subspace.incremental import OnlineTracker, init_online

from .base import BaseMemoryHead


@HeadRegistry.register("memsvd")
class MemSVDHead(BaseMemoryHead):
    """Projection onto the top-n_c basis of the window's memory matrix"""

    def __init__(
        self,
        n_c: Optional[int] = None,
        method: Union[str, BasisMethod, RandomizedSvd] = BasisMethod.EXACT,
        center: Optional[bool] = None,
        **_: object,
    ):
        super().__init__()
        self.n_c = n_c
        self.method = method
        self.center = center
        self.basis: Optional[SubspaceBasis] = None

    def fit(self, memory) -> "MemSVDHead":
        self.basis = compute_basis(memory, self.n_c, method=self.method, center=self.center)
        return self

    def query(self, h) -> np.ndarray:
        if self.basis is None:
            raise EmptyMemoryError("memsvd head has no basis; call fit first")
        return residual_update(h, self.basis)

    @property
    def retained_scalars(self) -> int:
        return 0 if self.basis is None else self.basis.storage_scalars


@HeadRegistry.register("omemsvd")
class OnlineMemSVDHead(BaseMemoryHead):
    """Projection onto a basis updated once per arriving clip"""

    online = True

    def __init__(
        self,
        n_c: Optional[int] = None,
        forgetting_factor: Optional[float] = None,
        d: Optional[int] = None,
        **_: object,
    ):
        super().__init__()
        self.tracker = OnlineTracker(n_c=n_c, forgetting_factor=forgetting_factor, dim=d)

    def fit(self, memory) -> "OnlineMemSVDHead":
        """Bootstrap from a block of past features"""
        self.tracker.state = init_online(
            memory, self.tracker.n_c, self.tracker.forgetting_factor
        )
        return self

    def observe(self, clip) -> "OnlineMemSVDHead":
        self.tracker.observe(clip)
        return self

    def query(self, h) -> np.ndarray:
        return residual_update(h, self.tracker.basis)

    @property
    def retained_scalars(self) -> int:
        return self.tracker.retained_scalars
