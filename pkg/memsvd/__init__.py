# memsvd: SVD-based low-rank memory banks for streaming feature sequences
# Offline subspace memory, online basis updates and an attention baseline

__version__ = "0.1.0"
