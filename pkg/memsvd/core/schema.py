"""
memsvd Data Schema
Pydantic models for matrices, bases, online state, file headers and benchmark specs
"""

from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from memsvd.core.dense import as_dense, check_orthonormal_rows, frozen

# Orthonormality tolerance applied when validating stored or loaded bases
ORTHONORMAL_VALIDATION_TOL = 1e-6


class ArrayModel(BaseModel):
    """Frozen model whose numpy fields are validated float64 read-only arrays"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ========== Enums ==========


class BankMode(str, Enum):
    """Memory bank retention modes"""

    OFFLINE = "offline"  # centred window [t-w, t+w], clips stored
    ONLINE = "online"  # causal, clips folded into a basis and dropped


class BenchMode(str, Enum):
    THROUGHPUT = "throughput"
    FLOPS = "flops"
    DRIFT = "drift"
    EQUIVALENCE = "equivalence"


class BasisMethod(str, Enum):
    EXACT = "exact"
    RANDOMIZED = "randomized"
    ONLINE_UPDATE = "online-update"


# ========== Decompositions ==========


class SvdFactors(ArrayModel):
    """Thin SVD a = u·diag(sigma)·vᵀ with k retained components"""

    u: np.ndarray  # m × k, orthonormal columns
    sigma: np.ndarray  # k, non-negative, non-increasing
    v: np.ndarray  # n × k, orthonormal columns

    @field_validator("u", "v", mode="before")
    @classmethod
    def _matrix(cls, value):
        return frozen(as_dense(value, name="singular vectors"))

    @field_validator("sigma", mode="before")
    @classmethod
    def _vector(cls, value):
        return frozen(as_dense(value, name="sigma", ndim=1))

    @model_validator(mode="after")
    def _shapes(self):
        k = self.sigma.shape[0]
        if self.u.shape[1] != k or self.v.shape[1] != k:
            raise ValueError(
                f"inconsistent factor shapes u={self.u.shape} sigma={k} v={self.v.shape}"
            )
        if np.any(self.sigma < 0):
            raise ValueError("singular values must be non-negative")
        if k > 1 and np.any(np.diff(self.sigma) > 1e-12 * max(self.sigma[0], 1.0)):
            raise ValueError("singular values must be non-increasing")
        return self

    @property
    def rank(self) -> int:
        return int(self.sigma.shape[0])

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


class RandomizedSvd(BaseModel):
    """Options for the randomized range-finder basis"""

    oversampling: int = Field(default=10, ge=0)
    power_iters: int = Field(default=2, ge=0)
    seed: int = 0


# ========== Memory ==========


class ClipFeatures(ArrayModel):
    """Actor features H_t (N_t × d) of one clip; one clip per second"""

    timestamp: int
    features: np.ndarray

    @field_validator("features", mode="before")
    @classmethod
    def _features(cls, value):
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim == 1 and arr.size == 0:
            raise ValueError("empty clips need an explicit (0, d) shape")
        return frozen(as_dense(arr, name="clip features"))

    @property
    def n_actors(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])


class SubspaceBasis(ArrayModel):
    """
    Compressed memory {U_mem, Σ_mem}.

    Rows of u_mem are orthonormal; sigma_mem entries of 0 flag null directions
    that pad a rank-deficient memory to n_c rows. `mean` is set only for
    mean-centred bases.
    """

    u_mem: np.ndarray  # n_c × d
    sigma_mem: np.ndarray  # n_c
    mean: Optional[np.ndarray] = None  # d

    @field_validator("u_mem", mode="before")
    @classmethod
    def _basis(cls, value):
        return frozen(as_dense(value, name="u_mem"))

    @field_validator("sigma_mem", mode="before")
    @classmethod
    def _sigma(cls, value):
        return frozen(as_dense(value, name="sigma_mem", ndim=1))

    @field_validator("mean", mode="before")
    @classmethod
    def _mean(cls, value):
        if value is None:
            return None
        return frozen(as_dense(value, name="mean", ndim=1))

    @model_validator(mode="after")
    def _invariants(self):
        n_c, d = self.u_mem.shape
        if n_c < 1:
            raise ValueError("basis needs at least one component")
        if self.sigma_mem.shape != (n_c,):
            raise ValueError(f"sigma_mem has shape {self.sigma_mem.shape}, expected ({n_c},)")
        if np.any(self.sigma_mem < 0):
            raise ValueError("sigma_mem must be non-negative")
        if n_c > 1 and np.any(
            np.diff(self.sigma_mem) > 1e-12 * max(self.sigma_mem[0], 1.0)
        ):
            raise ValueError("sigma_mem must be non-increasing")
        if self.mean is not None and self.mean.shape != (d,):
            raise ValueError(f"mean has shape {self.mean.shape}, expected ({d},)")
        check_orthonormal_rows(self.u_mem, tol=ORTHONORMAL_VALIDATION_TOL, name="u_mem")
        return self

    @property
    def n_c(self) -> int:
        return int(self.u_mem.shape[0])

    @property
    def dim(self) -> int:
        return int(self.u_mem.shape[1])

    @property
    def centered(self) -> bool:
        return self.mean is not None

    @property
    def storage_scalars(self) -> int:
        """Scalars held: n_c·(d+1), plus d for a stored mean"""
        extra = self.dim if self.centered else 0
        return int(self.u_mem.size + self.sigma_mem.size + extra)

    @property
    def effective_rank(self) -> int:
        """Number of non-null directions"""
        return int(np.count_nonzero(self.sigma_mem > 0.0))


class OnlineState(ArrayModel):
    """Online basis with forgetting factor λ; stores no past clips"""

    basis: SubspaceBasis
    forgetting_factor: float = Field(gt=0.0, le=1.0)
    clips_seen: int = Field(default=0, ge=0)
    updates_since_reorth: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _uncentered(self):
        if self.basis.centered:
            raise ValueError("online tracking uses uncentered bases")
        return self

    @property
    def n_c(self) -> int:
        return self.basis.n_c

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def retained_scalars(self) -> int:
        return self.basis.storage_scalars


# ========== Attention Baseline ==========


class AttentionWeights(ArrayModel):
    """Fixed, seeded projections of the cross-attention baseline"""

    w_q: np.ndarray  # d × d_u
    w_k: np.ndarray  # d × d_u
    w_v: np.ndarray  # d × d_u
    w_o: np.ndarray  # d_u × d
    d_u: int = Field(ge=1)
    seed: int = 0

    @field_validator("w_q", "w_k", "w_v", "w_o", mode="before")
    @classmethod
    def _weights(cls, value):
        return frozen(as_dense(value, name="attention weight"))

    @model_validator(mode="after")
    def _shapes(self):
        d = self.w_q.shape[0]
        for name in ("w_q", "w_k", "w_v"):
            if getattr(self, name).shape != (d, self.d_u):
                raise ValueError(f"{name} must be {d}×{self.d_u}")
        if self.w_o.shape != (self.d_u, d):
            raise ValueError(f"w_o must be {self.d_u}×{d}")
        return self

    @property
    def dim(self) -> int:
        return int(self.w_q.shape[0])


# ========== File Formats ==========


class BankFileHeader(BaseModel):
    """Header of a feature-bank file (20 bytes on disk)"""

    magic: bytes = b"MEMSVDB1"
    dim: int = Field(ge=1)
    clip_count: int = Field(ge=0)
    flags: int = Field(default=0, ge=0)

    @field_validator("magic")
    @classmethod
    def _magic(cls, value: bytes):
        if value != b"MEMSVDB1":
            raise ValueError(f"bad bank magic {value!r}")
        return value

    @property
    def centered(self) -> bool:
        return bool(self.flags & 1)


# ========== Synthetic Data ==========


class SynthConfig(BaseModel):
    """Planted-subspace stream with rotation drift"""

    d: int = Field(ge=1)
    planted_rank: int = Field(ge=1)
    # Fixed count, or inclusive uniform range (a, b)
    actors_per_clip: Union[int, Tuple[int, int]] = 3
    noise_sigma: float = Field(default=0.0, ge=0.0)
    # Radians of planted-basis rotation per clip
    drift_rate: float = Field(default=0.0, ge=0.0)
    seed: int = 0
    clip_count: int = Field(default=61, ge=0)

    @model_validator(mode="after")
    def _ranges(self):
        if self.planted_rank > self.d:
            raise ValueError("planted_rank must not exceed d")
        if self.drift_rate > 0 and 2 * self.planted_rank > self.d:
            raise ValueError("drift needs 2·planted_rank <= d for its rotation planes")
        actors = self.actors_per_clip
        if isinstance(actors, tuple):
            low, high = actors
            if low < 0 or high < low:
                raise ValueError(f"invalid actor range {actors}")
        elif actors < 0:
            raise ValueError("actors_per_clip must be non-negative")
        return self


# ========== Benchmarks ==========


class BenchSpec(BaseModel):
    """Configuration of one benchmark run"""

    mode: BenchMode
    window_lengths: List[int] = Field(
        default_factory=lambda: [20, 40, 60, 80, 100, 120, 140, 160]
    )
    n_c: int = Field(default=10, ge=1)
    d: int = Field(default=2304, ge=1)
    d_u: int = Field(default=512, ge=1)
    actors_per_clip: int = Field(default=3, ge=1)
    lambda_list: List[float] = Field(default_factory=lambda: [0.8, 0.9, 0.95, 0.99])
    repeats: int = Field(default=5, ge=3)
    warmup_iters: int = Field(default=2, ge=0)
    inner_loops: int = Field(default=10, ge=1)
    seed: int = 0
    output_path: Optional[str] = None

    # Memory and attention variants
    exclude_center: bool = False
    center_features: bool = False
    cache_kv: bool = False
    scale_du: bool = False

    # Drift stream
    planted_rank: int = Field(default=10, ge=1)
    noise_sigma: float = Field(default=0.01, ge=0.0)
    drift_rate: float = Field(default=0.01, ge=0.0)
    clip_count: int = Field(default=600, ge=1)
    checkpoint_every: int = Field(default=50, ge=1)
    recent_window: int = Field(default=5, ge=1)

    # Equivalence negative control: perturbation added to U_mem
    perturb: float = Field(default=0.0, ge=0.0)

    @field_validator("window_lengths")
    @classmethod
    def _windows(cls, value: List[int]):
        if not value:
            raise ValueError("window_lengths must not be empty")
        if any(w <= 0 for w in value):
            raise ValueError("window lengths must be positive")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("window lengths must be strictly ascending")
        return value

    @field_validator("lambda_list")
    @classmethod
    def _lambdas(cls, value: List[float]):
        if not value:
            raise ValueError("lambda_list must not be empty")
        if any(not (0.0 < lam <= 1.0) for lam in value):
            raise ValueError("every forgetting factor must lie in (0, 1]")
        return value


# ========== Benchmark Output Rows ==========


class ThroughputRow(BaseModel):
    method: str
    window_s: int
    n_mem: int
    median_us: float
    p10_us: float
    p90_us: float


class DriftRow(BaseModel):
    # `lambda` is a keyword; the CSV column keeps the short name
    model_config = ConfigDict(populate_by_name=True)

    forgetting_factor: float = Field(serialization_alias="lambda")
    clip_index: int
    subspace_distance: float


class EquivalenceRow(BaseModel):
    test: str
    max_abs_err: float
    tolerance: float
    passed: bool = Field(serialization_alias="pass")


class FlopsRow(BaseModel):
    method: str
    window_s: int
    n_mem: int
    query_macs: int
    setup_macs: int
    params: int
    ratio: float


CsvRow = Union[ThroughputRow, DriftRow, EquivalenceRow, FlopsRow]
