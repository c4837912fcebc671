"""
Evaluation Metrics
Timing statistics, sweep-shape checks and reconstruction quality
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.stats import spearmanr

from memsvd.core.schema import DriftRow, EquivalenceRow, FlopsRow, ThroughputRow

# Medians of two passes may differ by at most this fraction
STABILITY_TOL = 0.25


class Metrics:
    """
    Metrics for benchmark sweeps and subspace ablations.
    """

    @staticmethod
    def percentiles(samples_us: Sequence[float]) -> Tuple[float, float, float]:
        """(median, p10, p90) of timing samples"""
        arr = np.asarray(samples_us, dtype=np.float64)
        if arr.size == 0:
            raise ValueError("no timing samples")
        p10, median, p90 = np.percentile(arr, [10, 50, 90])
        return float(median), float(p10), float(p90)

    @staticmethod
    def spread(values: Sequence[float]) -> float:
        """(max − min) / min across a sweep"""
        arr = np.asarray(values, dtype=np.float64)
        low = float(arr.min())
        if low <= 0.0:
            return float("inf")
        return (float(arr.max()) - low) / low

    @staticmethod
    def spearman(x: Sequence[float], y: Sequence[float]) -> float:
        """Rank correlation; 1.0 for a strictly increasing sweep"""
        if len(x) < 2:
            return 1.0
        rho = spearmanr(x, y)[0]
        return float(rho)

    @staticmethod
    def is_strictly_increasing(values: Sequence[float]) -> bool:
        return all(b > a for a, b in zip(values, values[1:]))

    @staticmethod
    def unstable_medians(
        first: Dict[Tuple[str, int], float],
        second: Dict[Tuple[str, int], float],
        tol: float = STABILITY_TOL,
    ) -> List[Tuple[str, int]]:
        """Keys whose medians differ by more than `tol` relative between passes"""
        flagged = []
        for key, a in first.items():
            b = second.get(key)
            if b is None:
                continue
            base = min(a, b)
            if base <= 0.0 or abs(a - b) / base > tol:
                flagged.append(key)
        return flagged

    @staticmethod
    def captured_energy(sigma: Sequence[float], n_c: int) -> float:
        """Fraction of ‖M‖_F² held by the top n_c singular values"""
        s2 = np.asarray(sigma, dtype=np.float64) ** 2
        total = float(s2.sum())
        if total == 0.0:
            return 1.0
        return float(s2[:n_c].sum()) / total

    @staticmethod
    def relative_error(reference: np.ndarray, approx: np.ndarray) -> float:
        """Mean over rows of ‖reference − approx‖ / ‖reference‖"""
        reference = np.atleast_2d(reference)
        approx = np.atleast_2d(approx)
        norms = np.linalg.norm(reference, axis=1)
        errors = np.linalg.norm(reference - approx, axis=1)
        mask = norms > 0.0
        if not mask.any():
            return 0.0
        return float(np.mean(errors[mask] / norms[mask]))

    @staticmethod
    def throughput_by_method(rows: List[ThroughputRow]) -> Dict[str, List[ThroughputRow]]:
        by_method: Dict[str, List[ThroughputRow]] = {}
        for row in rows:
            by_method.setdefault(row.method, []).append(row)
        for method_rows in by_method.values():
            method_rows.sort(key=lambda r: r.window_s)
        return by_method

    @staticmethod
    def summary_report(rows: List, title: str = "Benchmark Report") -> str:
        """Generate a text summary of benchmark rows"""
        lines = ["=" * 50, title, "=" * 50]

        throughput = [r for r in rows if isinstance(r, ThroughputRow)]
        if throughput:
            for method, method_rows in Metrics.throughput_by_method(throughput).items():
                medians = [r.median_us for r in method_rows]
                windows = [r.window_s for r in method_rows]
                lines.append(
                    f"  {method}: median {min(medians):.1f}-{max(medians):.1f} us, "
                    f"spread={Metrics.spread(medians):.2%}, "
                    f"spearman={Metrics.spearman(windows, medians):.2f}"
                )

        drift = [r for r in rows if isinstance(r, DriftRow)]
        if drift:
            last = max(r.clip_index for r in drift)
            lines.append(f"Drift at clip {last}:")
            for row in drift:
                if row.clip_index == last:
                    lines.append(
                        f"  lambda={row.forgetting_factor}: {row.subspace_distance:.3e}"
                    )

        checks = [r for r in rows if isinstance(r, EquivalenceRow)]
        if checks:
            passed = sum(1 for r in checks if r.passed)
            lines.append(f"Equivalence checks: {passed}/{len(checks)} passed")
            for row in checks:
                status = "✓" if row.passed else "✗"
                lines.append(
                    f"  [{status}] {row.test}: {row.max_abs_err:.3e} (tol {row.tolerance:.1e})"
                )

        flops = [r for r in rows if isinstance(r, FlopsRow)]
        if flops:
            widest = max(r.window_s for r in flops)
            lines.append(f"Per-query MACs at {widest} s:")
            for row in flops:
                if row.window_s == widest:
                    lines.append(
                        f"  {row.method}: {row.query_macs} (x{row.ratio:.1f} vs attention)"
                    )

        lines.append("=" * 50)
        return "\n".join(lines)
