"""
Batch Generation Script
Write one synthetic feature-bank file per seed
"""

import argparse
import json
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Dict, List

from loguru import logger
from tqdm import tqdm

from memsvd.config import config
from memsvd.core.schema import SynthConfig
from memsvd.dataset.bank_io import write_bank
from memsvd.dataset.synthetic import generate_stream


def bank_path(output_dir: str, seed: int) -> str:
    return os.path.join(output_dir, f"bank_seed{seed:04d}.bin")


def batch_generate(
    output_dir: str,
    seeds: List[int],
    base: SynthConfig,
    max_workers: int = 1,
    skip_existing: bool = True,
) -> Dict[str, List]:
    """
    Generate banks for several seeds.

    Args:
        output_dir: Output directory
        seeds: Stream seeds, one bank file each
        base: Stream parameters shared by every bank
        max_workers: Number of parallel workers
        skip_existing: Skip banks already on disk

    Returns:
        Summary of generated, skipped and failed seeds
    """
    os.makedirs(output_dir, exist_ok=True)
    results = {"generated": [], "skipped": [], "failed": []}

    def generate_one(seed: int) -> Dict:
        path = bank_path(output_dir, seed)
        if skip_existing and os.path.exists(path):
            return {"status": "skipped", "seed": seed}
        try:
            clips = generate_stream(base.model_copy(update={"seed": seed}))
            write_bank(path, clips, dim=base.d)
            return {"status": "generated", "seed": seed}
        except Exception as e:
            logger.error(f"Failed to generate seed {seed}: {e}")
            return {"status": "failed", "seed": seed, "error": str(e)}

    def record(result: Dict) -> None:
        results[result["status"]].append(result["seed"])

    if max_workers == 1:
        for seed in tqdm(seeds, desc="banks"):
            record(generate_one(seed))
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            futures = {executor.submit(generate_one, s): s for s in seeds}
            for future in tqdm(as_completed(futures), total=len(futures), desc="banks"):
                record(future.result())

    for key in results:
        results[key].sort()

    logger.info(
        f"Batch complete: {len(results['generated'])} generated, "
        f"{len(results['skipped'])} skipped, {len(results['failed'])} failed"
    )
    return results


def main():
    parser = argparse.ArgumentParser(description="Batch generate synthetic feature banks")
    parser.add_argument("--output", default=config.OUTPUT_DIR, help="Output dir")
    parser.add_argument("--seeds", type=int, nargs="+", default=[0], help="Stream seeds")
    parser.add_argument("--dim", type=int, default=config.DIM, help="Feature dimension")
    parser.add_argument("--rank", type=int, default=config.N_COMPONENTS, help="Planted rank")
    parser.add_argument("--actors", type=int, default=config.ACTORS_PER_CLIP)
    parser.add_argument("--clips", type=int, default=2 * config.HALF_WINDOW + 1)
    parser.add_argument("--noise", type=float, default=0.01)
    parser.add_argument("--drift-rate", type=float, default=0.0)
    parser.add_argument("--workers", type=int, default=1, help="Parallel workers")
    parser.add_argument("--force", action="store_true", help="Regenerate existing")

    args = parser.parse_args()
    if args.output == config.OUTPUT_DIR:
        config.ensure_dirs()

    base = SynthConfig(
        d=args.dim,
        planted_rank=args.rank,
        actors_per_clip=args.actors,
        noise_sigma=args.noise,
        drift_rate=args.drift_rate,
        clip_count=args.clips,
    )
    results = batch_generate(
        output_dir=args.output,
        seeds=args.seeds,
        base=base,
        max_workers=args.workers,
        skip_existing=not args.force,
    )

    print(json.dumps(results, indent=2))


if __name__ == "__main__":
    main()
