"""
Operation counts
Closed-form multiply-accumulate counts for attention, subspace projection and
basis construction
"""

from typing import Union

from memsvd.core.schema import BasisMethod


def _require_positive(**kwargs) -> None:
    for name, value in kwargs.items():
        if value < 1:
            raise ValueError(f"{name} must be positive, got {value}")


def flops_attention(n_mem: int, d: int, d_u: int, cache_kv: bool = False) -> int:
    """
    Per-query MACs of cross_attention:
        d·d_u (query) + 2·N_mem·d·d_u (keys and values, skipped when cached)
        + N_mem·d_u (scores) + N_mem·d_u (weighted sum) + d_u·d (output)
    """
    _require_positive(n_mem=n_mem, d=d, d_u=d_u)
    kv = 0 if cache_kv else 2 * n_mem * d * d_u
    return d * d_u + kv + 2 * n_mem * d_u + d_u * d


def flops_memsvd(n_c: int, d: int) -> int:
    """Per-query MACs of project_reconstruct: 2·n_c·d"""
    _require_positive(n_c=n_c, d=d)
    return 2 * n_c * d


def flops_basis(
    n_mem: int,
    d: int,
    n_c: int,
    method: Union[str, BasisMethod],
    clip_rows: int = 3,
) -> int:
    """
    Leading-order basis construction counts with unit constants:
        exact          N_mem²·d
        randomized     n_c·N_mem·d
        online-update  (n_c+N)³ + 2·N·n_c·d   (N = clip_rows, no N_mem term)
    """
    _require_positive(n_mem=n_mem, d=d, n_c=n_c, clip_rows=clip_rows)
    method = BasisMethod(method)
    if method == BasisMethod.EXACT:
        return n_mem * n_mem * d
    if method == BasisMethod.RANDOMIZED:
        return n_c * n_mem * d
    return (n_c + clip_rows) ** 3 + 2 * clip_rows * n_c * d


def parameter_count(method: str, d: int, d_u: int) -> int:
    """Learned parameters: 4·d·d_u for attention, none for the subspace heads"""
    _require_positive(d=d, d_u=d_u)
    if method == "attention":
        return 4 * d * d_u
    if method in ("memsvd", "omemsvd"):
        return 0
    raise KeyError(f"unknown method '{method}'")
