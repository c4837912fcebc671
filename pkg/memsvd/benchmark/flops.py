"""
FLOP table
Per-query and setup multiply-accumulate counts across window lengths
"""

from typing import List

from memsvd.attention.flops import (
    flops_attention,
    flops_basis,
    flops_memsvd,
    parameter_count,
)
from memsvd.core.schema import BasisMethod, BenchSpec, FlopsRow


def window_n_mem(window_s: int, actors_per_clip: int, exclude_center: bool) -> int:
    """Rows of a centred window of length W: (2⌊W/2⌋ + 1) clips"""
    clips = 2 * (window_s // 2) + 1 - (1 if exclude_center else 0)
    return max(clips, 1) * actors_per_clip


def run_flops(spec: BenchSpec) -> List[FlopsRow]:
    rows: List[FlopsRow] = []
    d, d_u, n_c = spec.d, spec.d_u, spec.n_c

    for window in spec.window_lengths:
        n_mem = window_n_mem(window, spec.actors_per_clip, spec.exclude_center)
        attention = flops_attention(n_mem, d, d_u, cache_kv=spec.cache_kv)
        projection = flops_memsvd(n_c, d)
        kv_setup = 2 * n_mem * d * d_u if spec.cache_kv else 0

        entries = [
            ("attention", attention, kv_setup, parameter_count("attention", d, d_u)),
            (
                "memsvd",
                projection,
                flops_basis(n_mem, d, n_c, BasisMethod.EXACT),
                parameter_count("memsvd", d, d_u),
            ),
            (
                "memsvd-randomized",
                projection,
                flops_basis(n_mem, d, n_c, BasisMethod.RANDOMIZED),
                parameter_count("memsvd", d, d_u),
            ),
            (
                "omemsvd",
                projection,
                flops_basis(
                    n_mem, d, n_c, BasisMethod.ONLINE_UPDATE, clip_rows=spec.actors_per_clip
                ),
                parameter_count("omemsvd", d, d_u),
            ),
        ]
        for method, query_macs, setup_macs, params in entries:
            rows.append(
                FlopsRow(
                    method=method,
                    window_s=window,
                    n_mem=n_mem,
                    query_macs=query_macs,
                    setup_macs=setup_macs,
                    params=params,
                    ratio=attention / query_macs,
                )
            )
    return rows
