"""
Arithmetic operation counters

Kernels report multiply-accumulate counts to the innermost active counter.
Counting is off unless a caller opens one with `count_ops()`.
"""

from contextlib import contextmanager
from contextvars import ContextVar
from typing import Dict, Iterator, List, Optional


class OpCounter:
    """Accumulates multiply-accumulate counts, broken down by stage"""

    def __init__(self):
        self.total: int = 0
        self.by_stage: Dict[str, int] = {}

    def add(self, stage: str, macs: int) -> None:
        self.total += int(macs)
        self.by_stage[stage] = self.by_stage.get(stage, 0) + int(macs)

    def __repr__(self):
        return f"<OpCounter total={self.total} stages={self.by_stage}>"


_active: ContextVar[Optional[List[OpCounter]]] = ContextVar(
    "memsvd_op_counters", default=None
)


def tally(stage: str, macs: int) -> None:
    """Record work against every open counter (no-op when none is open)"""
    stack = _active.get()
    if not stack:
        return
    for counter in stack:
        counter.add(stage, macs)


def matmul_macs(a_shape, b_shape) -> int:
    return int(a_shape[0]) * int(a_shape[1]) * int(b_shape[-1])


@contextmanager
def count_ops() -> Iterator[OpCounter]:
    """
    Count kernel arithmetic inside a `with` block.

    Usage:
        with count_ops() as ops:
            update(state, clip)
        ops.total
    """
    counter = OpCounter()
    stack = list(_active.get() or [])
    stack.append(counter)
    token = _active.set(stack)
    try:
        yield counter
    finally:
        _active.reset(token)
