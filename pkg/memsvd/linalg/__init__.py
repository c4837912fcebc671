# Dense linear-algebra kernels
from .counters import OpCounter, count_ops
from .qr import householder_qr, orthonormal_completion
from .svd import svd, truncate
from .randomized import randomized_range_basis
from .metrics import principal_angles, subspace_distance

__all__ = [
    "OpCounter",
    "count_ops",
    "householder_qr",
    "orthonormal_completion",
    "svd",
    "truncate",
    "randomized_range_basis",
    "principal_angles",
    "subspace_distance",
]
