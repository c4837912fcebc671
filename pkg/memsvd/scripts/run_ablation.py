"""
Ablation Experiment Script
Temporal support, number of components and forgetting factor on synthetic streams
"""

import argparse
import json
from typing import Any, Dict, List, Optional

import numpy as np
from loguru import logger
from tqdm import tqdm

from memsvd.core.schema import SynthConfig
from memsvd.dataset.synthetic import generate_stream
from memsvd.evaluation.metrics import Metrics
from memsvd.linalg.metrics import subspace_distance
from memsvd.linalg.svd import svd
from memsvd.memory.bank import MemoryBank
from memsvd.subspace.basis import compute_basis, project_reconstruct
from memsvd.subspace.incremental import OnlineTracker

# Predefined ablation configurations
ABLATION_CONFIGS = {
    "temporal_support": {
        "kind": "window",
        "windows": [10, 20, 40, 60, 90, 120],
        "n_c": 10,
    },
    "components": {
        "kind": "components",
        "window": 60,
        "n_c_list": [1, 2, 5, 10, 20, 40],
    },
    "forgetting": {
        "kind": "forgetting",
        "lambdas": [0.8, 0.9, 0.95, 0.99, 1.0],
        "clips": 120,
        "n_c": 10,
    },
}

# Shared synthetic stream
STREAM_DEFAULTS = {
    "d": 256,
    "planted_rank": 20,
    "actors_per_clip": 3,
    "noise_sigma": 0.05,
    "drift_rate": 0.01,
}


def _window_quality(clips, window: int, n_c: int, d: int) -> Dict[str, Any]:
    """Energy captured by n_c components and held-out reconstruction error"""
    half = window // 2
    bank = MemoryBank(dim=d, half_window=half, exclude_center=True)
    for clip in clips[: 2 * half + 1]:
        bank.push_clip(clip)
    memory = bank.materialize(center=half)
    queries = clips[half].features

    k = min(n_c, *memory.shape)
    basis = compute_basis(memory, k, center=False)
    return {
        "window_s": window,
        "n_mem": int(memory.shape[0]),
        "n_c": k,
        "captured_energy": Metrics.captured_energy(svd(memory).sigma, k),
        "reconstruction_error": Metrics.relative_error(
            queries, project_reconstruct(queries, basis)
        ),
    }


def _run_window(cfg: Dict[str, Any], clips, d: int) -> List[Dict[str, Any]]:
    return [_window_quality(clips, w, cfg["n_c"], d) for w in cfg["windows"]]


def _run_components(cfg: Dict[str, Any], clips, d: int) -> List[Dict[str, Any]]:
    return [_window_quality(clips, cfg["window"], n_c, d) for n_c in cfg["n_c_list"]]


def _run_forgetting(cfg: Dict[str, Any], seed: int, d: int) -> List[Dict[str, Any]]:
    """Online basis versus the offline basis of the same causal window"""
    synth = SynthConfig(**{**STREAM_DEFAULTS, "d": d, "drift_rate": 0.0}, seed=seed,
                        clip_count=cfg["clips"])
    clips = generate_stream(synth)
    offline = compute_basis(np.vstack([c.features for c in clips]), cfg["n_c"], center=False)

    results = []
    for lam in cfg["lambdas"]:
        tracker = OnlineTracker(n_c=cfg["n_c"], forgetting_factor=lam, dim=d)
        for clip in tqdm(clips, desc=f"lambda={lam}", leave=False):
            tracker.observe(clip)
        results.append(
            {
                "lambda": lam,
                "subspace_distance": subspace_distance(tracker.basis.u_mem, offline.u_mem),
            }
        )
    return results


def run_ablation(
    configs: Optional[List[str]] = None,
    output_path: Optional[str] = None,
    seed: int = 0,
    d: int = STREAM_DEFAULTS["d"],
) -> Dict[str, Any]:
    """
    Run ablation experiments on a synthetic drifting stream.

    Args:
        configs: List of config names to run (default: all)
        output_path: Path to save results JSON
        seed: Stream seed
        d: Feature dimension

    Returns:
        Dict mapping config name to its result rows
    """
    if configs is None:
        configs = list(ABLATION_CONFIGS.keys())

    widest = max(
        max(cfg.get("windows", [cfg.get("window", 0)])) for cfg in ABLATION_CONFIGS.values()
    )
    stream = generate_stream(
        SynthConfig(**{**STREAM_DEFAULTS, "d": d}, seed=seed, clip_count=widest + 1)
    )

    results: Dict[str, Any] = {}
    for config_name in configs:
        if config_name not in ABLATION_CONFIGS:
            logger.warning(f"Unknown config: {config_name}")
            continue

        logger.info(f"Running ablation: {config_name}")
        cfg = ABLATION_CONFIGS[config_name]
        try:
            if cfg["kind"] == "window":
                results[config_name] = _run_window(cfg, stream, d)
            elif cfg["kind"] == "components":
                results[config_name] = _run_components(cfg, stream, d)
            else:
                results[config_name] = _run_forgetting(cfg, seed, d)
        except Exception as e:
            logger.error(f"  {config_name} failed: {e}")
            results[config_name] = {"error": str(e)}

    # Print summary
    print("\n" + "=" * 60)
    print("Ablation Study Results")
    print("=" * 60)
    for config_name, rows in results.items():
        if isinstance(rows, dict) and "error" in rows:
            print(f"{config_name}: ERROR - {rows['error']}")
            continue
        print(f"{config_name}:")
        for row in rows:
            print("  " + ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                                   for k, v in row.items()))
    print("=" * 60)

    if output_path:
        with open(output_path, "w") as f:
            json.dump(results, f, indent=2)
        logger.info(f"Results saved to {output_path}")

    return results


def main():
    parser = argparse.ArgumentParser(description="Run ablation experiments")
    parser.add_argument(
        "--configs",
        nargs="+",
        default=None,
        help="Config names to run (default: all)",
    )
    parser.add_argument("--output", default=None, help="Output path for results JSON")
    parser.add_argument("--seed", type=int, default=0, help="Stream seed")
    parser.add_argument("--dim", type=int, default=STREAM_DEFAULTS["d"], help="Feature dim")
    parser.add_argument(
        "--list-configs",
        action="store_true",
        help="List available configurations",
    )

    args = parser.parse_args()

    if args.list_configs:
        print("Available ablation configurations:")
        for name, cfg in ABLATION_CONFIGS.items():
            print(f"  {name}: {cfg}")
        return

    run_ablation(
        configs=args.configs,
        output_path=args.output,
        seed=args.seed,
        d=args.dim,
    )


if __name__ == "__main__":
    main()
