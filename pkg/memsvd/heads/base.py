"""
Base class for memory-interaction heads
"""

from abc import ABC, abstractmethod

import numpy as np

from memsvd.core.errors import ConfigurationError


class BaseMemoryHead(ABC):
    """
    A mechanism that lets query features read from a memory of past and
    future actor features. Offline heads are `fit` on a materialized memory
    matrix; online heads `observe` clips as they arrive.
    """

    registry_name: str = ""
    online: bool = False

    def __init__(self):
        self.name = self.__class__.__name__

    @abstractmethod
    def fit(self, memory) -> "BaseMemoryHead":
        """Prepare the head from an N_mem × d memory matrix"""

    def observe(self, clip) -> "BaseMemoryHead":
        """Fold one arriving clip into the head's memory (online heads only)"""
        raise ConfigurationError(f"{self.name} does not consume clip streams")

    @abstractmethod
    def query(self, h) -> np.ndarray:
        """Updated features h + (memory read-out), row-wise"""

    @property
    @abstractmethod
    def retained_scalars(self) -> int:
        """Scalars the head keeps between queries"""

    def __repr__(self):
        return f"<{self.name}>"
