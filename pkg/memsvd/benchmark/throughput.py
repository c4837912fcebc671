"""
Head-only throughput
Per-query-feature latency of attention, offline MeMSVD and online MeMSVD across
window lengths
"""

import math
import time
from typing import Callable, Dict, List, NamedTuple, Tuple

import numpy as np
from loguru import logger

from memsvd.config import config
from memsvd.core.registry import HeadRegistry
from memsvd.core.schema import BenchSpec, ClipFeatures, SynthConfig, ThroughputRow
from memsvd.dataset.synthetic import generate_stream
from memsvd.evaluation.metrics import Metrics
from memsvd.memory.bank import MemoryBank

# Import heads package to trigger registration decorators
from memsvd import heads as _heads  # noqa: F401

METHODS = ("attention", "memsvd", "omemsvd")

# Timed samples shorter than this are dominated by timer and scheduler noise
MIN_SAMPLE_NS = 2_000_000


class TimedStep(NamedTuple):
    """One unit of work, its per-sample loop count and how many queries it answers"""

    fn: Callable[[], None]
    inner_loops: int
    per_call: int


class WindowSetup(NamedTuple):
    n_mem: int
    steps: Dict[str, TimedStep]


def _time_samples(
    step: TimedStep,
    repeats: int,
    warmup_iters: int,
) -> List[float]:
    """Microseconds per query, one sample per repeat"""
    for _ in range(warmup_iters):
        step.fn()
    samples = []
    for _ in range(repeats):
        start = time.perf_counter_ns()
        for _ in range(step.inner_loops):
            step.fn()
        elapsed = time.perf_counter_ns() - start
        samples.append(elapsed / 1e3 / step.inner_loops / step.per_call)
    return samples


def _calibrated(fn: Callable[[], None], minimum: int, per_call: int = 1) -> TimedStep:
    """Raise the loop count until one sample spans at least MIN_SAMPLE_NS"""
    fn()
    start = time.perf_counter_ns()
    fn()
    single = max(time.perf_counter_ns() - start, 1)
    loops = max(minimum, math.ceil(MIN_SAMPLE_NS / single))
    return TimedStep(fn=fn, inner_loops=loops, per_call=per_call)


def _bench_stream(spec: BenchSpec) -> List[ClipFeatures]:
    widest = max(spec.window_lengths)
    cfg = SynthConfig(
        d=spec.d,
        planted_rank=min(spec.planted_rank, spec.d),
        actors_per_clip=spec.actors_per_clip,
        noise_sigma=spec.noise_sigma,
        seed=spec.seed,
        clip_count=2 * (widest // 2) + 2,
    )
    return generate_stream(cfg)


def _window_memory(spec: BenchSpec, clips: List[ClipFeatures], window: int):
    """Centred memory of 2⌊W/2⌋+1 clips and the centre clip's actor features"""
    half = window // 2
    bank = MemoryBank(
        dim=spec.d,
        half_window=half,
        exclude_center=spec.exclude_center,
    )
    for clip in clips[: 2 * half + 1]:
        bank.push_clip(clip)
    return bank.materialize(center=half), clips[half].features


def _prepare_window(spec: BenchSpec, clips: List[ClipFeatures], window: int) -> WindowSetup:
    """Fit every head for one window; the timed passes only query"""
    memory, queries = _window_memory(spec, clips, window)
    n_mem = memory.shape[0]
    h = queries[0]
    n_c = min(spec.n_c, spec.d)

    attention = HeadRegistry.create(
        "attention",
        d=spec.d,
        d_u=spec.d_u,
        seed=spec.seed,
        cache_kv=spec.cache_kv,
        scale_du=spec.scale_du,
    ).fit(memory)
    memsvd = HeadRegistry.create(
        "memsvd", n_c=min(n_c, n_mem), center=spec.center_features
    ).fit(memory)

    # Online state is causal and fixed-size: bootstrap from the window's first rows
    online = HeadRegistry.create(
        "omemsvd", n_c=n_c, forgetting_factor=config.FORGETTING_FACTOR, d=spec.d
    ).fit(memory[: max(1, min(n_c, n_mem))])
    bootstrap = online.tracker.state
    newest = clips[2 * (window // 2) + 1].features

    # One sample: fold the newest clip, then answer every actor in it
    def online_step():
        online.tracker.state = bootstrap
        online.observe(newest)
        for row in queries:
            online.query(row)

    steps = {
        "attention": _calibrated(lambda: attention.query(h), spec.inner_loops),
        "memsvd": _calibrated(lambda: memsvd.query(h), spec.inner_loops),
        "omemsvd": _calibrated(online_step, spec.inner_loops, per_call=len(queries)),
    }
    logger.debug(
        f"Prepared window {window} s (N_mem={n_mem}): "
        + ", ".join(f"{m} x{s.inner_loops}" for m, s in steps.items())
    )
    return WindowSetup(n_mem=n_mem, steps=steps)


def _sweep_pass(
    spec: BenchSpec,
    setups: Dict[int, WindowSetup],
) -> Dict[Tuple[str, int], List[float]]:
    samples: Dict[Tuple[str, int], List[float]] = {}
    for window, setup in setups.items():
        for method in METHODS:
            samples[(method, window)] = _time_samples(
                setup.steps[method],
                repeats=spec.repeats,
                warmup_iters=spec.warmup_iters,
            )
    return samples


def run_throughput(spec: BenchSpec) -> Tuple[List[ThroughputRow], bool]:
    """
    Time the sweep twice with the same seed and the same fitted heads.

    Returns:
        (rows, stable): rows pool both passes; stable is False when any
        method/window median moved by more than 25% between passes
    """
    clips = _bench_stream(spec)
    logger.info(
        f"Throughput sweep: windows={spec.window_lengths}, d={spec.d}, "
        f"d_u={spec.d_u}, n_c={spec.n_c}, cache_kv={spec.cache_kv}"
    )
    setups = {window: _prepare_window(spec, clips, window) for window in spec.window_lengths}
    first = _sweep_pass(spec, setups)
    second = _sweep_pass(spec, setups)

    unstable = Metrics.unstable_medians(
        {key: float(np.median(s)) for key, s in first.items()},
        {key: float(np.median(s)) for key, s in second.items()},
    )
    for method, window in unstable:
        logger.warning(f"Unstable timing: {method} at {window} s")

    rows = []
    for method in METHODS:
        for window in spec.window_lengths:
            median, p10, p90 = Metrics.percentiles(
                first[(method, window)] + second[(method, window)]
            )
            rows.append(
                ThroughputRow(
                    method=method,
                    window_s=window,
                    n_mem=setups[window].n_mem,
                    median_us=median,
                    p10_us=p10,
                    p90_us=p90,
                )
            )
    return rows, not unstable
