"""
Basis and online-state snapshots
Little-endian float64 images of {U_mem, Σ_mem} (plus the mean for centred bases)
and of the full online tracking state
"""

import os

import numpy as np
from loguru import logger

from memsvd.core.dense import check_orthonormal_rows
from memsvd.core.errors import BankFormatError
from memsvd.core.schema import (
    ORTHONORMAL_VALIDATION_TOL,
    OnlineState,
    SubspaceBasis,
)

BASIS_MAGIC = b"MEMSVDS1"
STATE_MAGIC = b"MEMSVDO1"

BASIS_HEADER_DTYPE = np.dtype(
    [("magic", "S8"), ("dim", "<u4"), ("n_c", "<u4"), ("flags", "<u4")]
)
STATE_HEADER_DTYPE = np.dtype(
    [
        ("magic", "S8"),
        ("forgetting_factor", "<f8"),
        ("clips_seen", "<u8"),
        ("updates_since_reorth", "<u8"),
    ]
)
VALUE_DTYPE = np.dtype("<f8")

FLAG_MEAN = 1


def encode_basis(basis: SubspaceBasis) -> bytes:
    header = np.zeros(1, dtype=BASIS_HEADER_DTYPE)
    header[0] = (BASIS_MAGIC, basis.dim, basis.n_c, FLAG_MEAN if basis.centered else 0)
    chunks = [
        header.tobytes(),
        basis.sigma_mem.astype(VALUE_DTYPE).tobytes(),
        basis.u_mem.astype(VALUE_DTYPE).tobytes(),
    ]
    if basis.centered:
        chunks.append(basis.mean.astype(VALUE_DTYPE).tobytes())
    return b"".join(chunks)


def decode_basis(data: bytes, offset: int = 0) -> SubspaceBasis:
    """
    Parse a basis block starting at `offset`; the block must end the buffer.

    Raises:
        BankFormatError: bad magic, truncation or trailing bytes
        OrthonormalityError: stored rows fail re-validation
    """
    if len(data) - offset < BASIS_HEADER_DTYPE.itemsize:
        raise BankFormatError("basis file truncated: no header")
    raw = np.frombuffer(data, dtype=BASIS_HEADER_DTYPE, count=1, offset=offset)[0]
    if bytes(raw["magic"]) != BASIS_MAGIC:
        raise BankFormatError(f"bad basis magic {bytes(raw['magic'])!r}")
    dim, n_c, flags = int(raw["dim"]), int(raw["n_c"]), int(raw["flags"])
    if dim < 1 or n_c < 1:
        raise BankFormatError(f"invalid basis shape n_c={n_c}, d={dim}")

    centered = bool(flags & FLAG_MEAN)
    count = n_c + n_c * dim + (dim if centered else 0)
    offset += BASIS_HEADER_DTYPE.itemsize
    expected = offset + count * VALUE_DTYPE.itemsize
    if len(data) < expected:
        raise BankFormatError("basis file truncated in payload")
    if len(data) > expected:
        raise BankFormatError(f"{len(data) - expected} trailing bytes after basis")

    values = np.frombuffer(data, dtype=VALUE_DTYPE, count=count, offset=offset)
    sigma = values[:n_c].astype(np.float64)
    u_rows = values[n_c : n_c + n_c * dim].astype(np.float64).reshape(n_c, dim)
    mean = values[n_c + n_c * dim :].astype(np.float64) if centered else None

    check_orthonormal_rows(u_rows, tol=ORTHONORMAL_VALIDATION_TOL, name="stored u_mem")
    return SubspaceBasis(u_mem=u_rows, sigma_mem=sigma, mean=mean)


def encode_state(state: OnlineState) -> bytes:
    header = np.zeros(1, dtype=STATE_HEADER_DTYPE)
    header[0] = (
        STATE_MAGIC,
        state.forgetting_factor,
        state.clips_seen,
        state.updates_since_reorth,
    )
    return header.tobytes() + encode_basis(state.basis)


def decode_state(data: bytes) -> OnlineState:
    if len(data) < STATE_HEADER_DTYPE.itemsize:
        raise BankFormatError("state file truncated: no header")
    raw = np.frombuffer(data, dtype=STATE_HEADER_DTYPE, count=1)[0]
    if bytes(raw["magic"]) != STATE_MAGIC:
        raise BankFormatError(f"bad state magic {bytes(raw['magic'])!r}")
    basis = decode_basis(data, offset=STATE_HEADER_DTYPE.itemsize)
    return OnlineState(
        basis=basis,
        forgetting_factor=float(raw["forgetting_factor"]),
        clips_seen=int(raw["clips_seen"]),
        updates_since_reorth=int(raw["updates_since_reorth"]),
    )


def _write(path: str, data: bytes) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)


def write_basis(path: str, basis: SubspaceBasis) -> None:
    _write(path, encode_basis(basis))
    logger.debug(f"Wrote basis {path} (n_c={basis.n_c}, d={basis.dim})")


def read_basis(path: str) -> SubspaceBasis:
    with open(path, "rb") as f:
        return decode_basis(f.read())


def write_state(path: str, state: OnlineState) -> None:
    """Snapshot an online stream; read_state resumes it bit-identically"""
    _write(path, encode_state(state))
    logger.debug(f"Wrote online state {path} after {state.clips_seen} clips")


def read_state(path: str) -> OnlineState:
    with open(path, "rb") as f:
        return decode_state(f.read())
