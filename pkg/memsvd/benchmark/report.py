"""
CSV report writer
Header row plus `#`-prefixed metadata: run spec, seed and build id
"""

import csv
import io
import os
import subprocess
import sys
from typing import Iterable, List, Optional

from loguru import logger

from memsvd import __version__
from memsvd.core.schema import BenchSpec, CsvRow

COLUMNS = {
    "throughput": ["method", "window_s", "n_mem", "median_us", "p10_us", "p90_us"],
    "drift": ["lambda", "clip_index", "subspace_distance"],
    "equivalence": ["test", "max_abs_err", "tolerance", "pass"],
    "flops": ["method", "window_s", "n_mem", "query_macs", "setup_macs", "params", "ratio"],
}


def build_id() -> str:
    """`git describe --always --dirty`, or the package version outside a checkout"""
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        if result.returncode == 0 and result.stdout.strip():
            return result.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"memsvd-{__version__}"


def render_csv(
    rows: Iterable[CsvRow],
    spec: BenchSpec,
    notes: Optional[List[str]] = None,
) -> str:
    buffer = io.StringIO()
    buffer.write(f"# memsvd bench {spec.mode.value}\n")
    buffer.write(f"# spec: {spec.model_dump_json()}\n")
    buffer.write(f"# seed: {spec.seed}\n")
    buffer.write(f"# build: {build_id()}\n")
    for note in notes or []:
        buffer.write(f"# {note}\n")

    writer = csv.DictWriter(buffer, fieldnames=COLUMNS[spec.mode.value], lineterminator="\n")
    writer.writeheader()
    for row in rows:
        record = row.model_dump(by_alias=True)
        if "pass" in record:
            record["pass"] = "true" if record["pass"] else "false"
        writer.writerow(record)
    return buffer.getvalue()


def write_csv(
    rows: Iterable[CsvRow],
    spec: BenchSpec,
    notes: Optional[List[str]] = None,
) -> str:
    """Write the report to spec.output_path (stdout when unset); returns the text"""
    text = render_csv(rows, spec, notes)
    if spec.output_path:
        parent = os.path.dirname(spec.output_path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(spec.output_path, "w", newline="") as f:
            f.write(text)
        logger.info(f"Results saved to {spec.output_path}")
    else:
        sys.stdout.write(text)
    return text
