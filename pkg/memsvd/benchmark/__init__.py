from .drift import run_drift
from .equivalence import run_equivalence
from .flops import run_flops
from .report import render_csv, write_csv
from .throughput import run_throughput
