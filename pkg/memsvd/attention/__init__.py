from .baseline import (
    KeyValueCache,
    attention_weights,
    cross_attention,
    init_weights,
    project_memory,
)
from .flops import flops_attention, flops_basis, flops_memsvd, parameter_count
