"""
Drift versus forgetting factor
Streams a rotating planted subspace and checkpoints the distance between the
tracked basis and the offline basis of the most recent clips
"""

from collections import deque
from typing import List

from loguru import logger
from tqdm import tqdm

from memsvd.core.schema import BenchSpec, DriftRow, SynthConfig
from memsvd.dataset.synthetic import generate_stream
from memsvd.subspace.incremental import OnlineTracker, drift_report


def run_drift(spec: BenchSpec) -> List[DriftRow]:
    cfg = SynthConfig(
        d=spec.d,
        planted_rank=spec.planted_rank,
        actors_per_clip=spec.actors_per_clip,
        noise_sigma=spec.noise_sigma,
        drift_rate=spec.drift_rate,
        seed=spec.seed,
        clip_count=spec.clip_count,
    )
    clips = generate_stream(cfg)
    logger.info(
        f"Drift stream: {len(clips)} clips, d={spec.d}, r={spec.planted_rank}, "
        f"drift={spec.drift_rate} rad/clip, lambdas={spec.lambda_list}"
    )

    rows: List[DriftRow] = []
    for lam in spec.lambda_list:
        tracker = OnlineTracker(n_c=spec.n_c, forgetting_factor=lam, dim=spec.d)
        recent = deque(maxlen=spec.recent_window)

        for index, clip in enumerate(tqdm(clips, desc=f"lambda={lam}", leave=False), 1):
            tracker.observe(clip)
            recent.append(clip)
            if index % spec.checkpoint_every or not tracker.ready:
                continue
            rows.append(
                DriftRow(
                    forgetting_factor=lam,
                    clip_index=index,
                    subspace_distance=drift_report(tracker.state, list(recent)),
                )
            )
        if rows:
            logger.debug(f"lambda={lam}: final distance {rows[-1].subspace_distance:.3e}")
    return rows
