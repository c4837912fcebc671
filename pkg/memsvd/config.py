"""
memsvd Configuration Management
Numerical tolerances, model sizes and benchmark flags
"""

import os
from typing import Dict

from dotenv import load_dotenv

# Load environment variables from project root
load_dotenv(os.path.join(os.path.dirname(os.path.dirname(__file__)), ".env"))


def _flag(name: str, default: str = "False") -> bool:
    return os.getenv(name, default).lower() == "true"


class Config:
    """Central configuration for the memsvd library and benchmarks"""

    # ========== Model Sizes ==========
    # SlowFast-style feature width, attention width and n_c from the components study
    N_COMPONENTS: int = int(os.getenv("MEMSVD_NC", "10"))
    DIM: int = int(os.getenv("MEMSVD_DIM", "2304"))
    D_U: int = int(os.getenv("MEMSVD_DU", "512"))

    # ========== Memory Bank ==========
    # 61-second centred window, 3 actors per clip
    ACTORS_PER_CLIP: int = int(os.getenv("MEMSVD_ACTORS", "3"))
    HALF_WINDOW: int = int(os.getenv("MEMSVD_HALF_WINDOW", "30"))

    # ========== Online Updates ==========
    FORGETTING_FACTOR: float = float(os.getenv("MEMSVD_LAMBDA", "0.95"))
    REORTH_TOL: float = float(os.getenv("MEMSVD_REORTH_TOL", "1e-7"))
    REORTH_INTERVAL: int = int(os.getenv("MEMSVD_REORTH_INTERVAL", "1000"))

    # ========== Decompositions ==========
    SVD_TOL: float = float(os.getenv("MEMSVD_SVD_TOL", "1e-12"))
    SVD_MAX_SWEEPS: int = int(os.getenv("MEMSVD_SVD_MAX_SWEEPS", "60"))
    OVERSAMPLING: int = int(os.getenv("MEMSVD_OVERSAMPLING", "10"))
    POWER_ITERS: int = int(os.getenv("MEMSVD_POWER_ITERS", "2"))

    SEED: int = int(os.getenv("MEMSVD_SEED", "0"))

    # ========== Feature Flags ==========
    FLAGS: Dict[str, bool] = {
        # Mean-subtract memory rows before the offline SVD
        "center_features": _flag("MEMSVD_CENTER_FEATURES"),
        # Drop the query clip's own actors from M
        "exclude_center": _flag("MEMSVD_EXCLUDE_CENTER"),
        # Benchmark attention with precomputed keys/values
        "cache_kv": _flag("MEMSVD_CACHE_KV"),
        # Scale attention scores by sqrt(d_u) instead of sqrt(d)
        "scale_du": _flag("MEMSVD_SCALE_DU"),
    }

    # ========== Logging ==========
    LOG_LEVEL: str = os.getenv("MEMSVD_LOG_LEVEL", "INFO")

    # ========== Paths ==========
    BASE_DIR: str = os.path.dirname(os.path.abspath(__file__))
    OUTPUT_DIR: str = os.getenv(
        "MEMSVD_OUTPUT_DIR", os.path.join(os.path.dirname(BASE_DIR), "output")
    )

    @classmethod
    def ensure_dirs(cls):
        os.makedirs(cls.OUTPUT_DIR, exist_ok=True)

    # ========== Helper Methods ==========
    @classmethod
    def is_flag_enabled(cls, flag_name: str) -> bool:
        """Check if a feature flag is enabled"""
        return cls.FLAGS.get(flag_name, False)

    @classmethod
    def print_config(cls):
        """Print current configuration for debugging"""
        print("=" * 50)
        print("memsvd Configuration")
        print("=" * 50)
        print(f"Components (n_c): {cls.N_COMPONENTS}")
        print(f"Feature dim (d): {cls.DIM}")
        print(f"Attention width (d_u): {cls.D_U}")
        print(f"Actors per clip: {cls.ACTORS_PER_CLIP}")
        print(f"Half window (w): {cls.HALF_WINDOW}")
        print(f"Forgetting factor: {cls.FORGETTING_FACTOR}")
        print("\nDecompositions:")
        print(f"  SVD tolerance: {cls.SVD_TOL}")
        print(f"  SVD max sweeps: {cls.SVD_MAX_SWEEPS}")
        print(f"  Oversampling: {cls.OVERSAMPLING}")
        print(f"  Power iterations: {cls.POWER_ITERS}")
        print(f"  Re-orthonormalization: tol={cls.REORTH_TOL}, every {cls.REORTH_INTERVAL}")
        print("\nFeature Flags:")
        for name, enabled in cls.FLAGS.items():
            status = "✓" if enabled else "✗"
            print(f"  [{status}] {name}")
        print(f"\nOutput dir: {cls.OUTPUT_DIR}")
        print("=" * 50)


# Create singleton instance
config = Config()
