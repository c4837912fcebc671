"""
Feature-bank files
Little-endian binary: 20-byte header, then per clip an int64 timestamp, a uint32
actor count and N_t·d float32 features (row-major)
"""

import os
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from memsvd.core.errors import BankFormatError, DimensionMismatchError
from memsvd.core.schema import BankFileHeader, ClipFeatures

BANK_MAGIC = b"MEMSVDB1"

HEADER_DTYPE = np.dtype(
    [("magic", "S8"), ("dim", "<u4"), ("clip_count", "<u4"), ("flags", "<u4")]
)
CLIP_PREFIX_DTYPE = np.dtype([("timestamp", "<i8"), ("n_actors", "<u4")])
FEATURE_DTYPE = np.dtype("<f4")


def encode_bank(
    clips: Sequence[ClipFeatures],
    centered: bool = False,
    dim: Optional[int] = None,
) -> bytes:
    """Serialize clips to the bank byte image (features narrowed to float32)"""
    clips = list(clips)
    if dim is None:
        dim = clips[0].dim if clips else 1
    header = np.zeros(1, dtype=HEADER_DTYPE)
    header[0] = (BANK_MAGIC, dim, len(clips), 1 if centered else 0)

    chunks = [header.tobytes()]
    for clip in clips:
        if clip.dim != dim:
            raise DimensionMismatchError(
                f"clip t={clip.timestamp} has dimension {clip.dim}, bank has {dim}"
            )
        prefix = np.zeros(1, dtype=CLIP_PREFIX_DTYPE)
        prefix[0] = (clip.timestamp, clip.n_actors)
        chunks.append(prefix.tobytes())
        chunks.append(np.ascontiguousarray(clip.features, dtype=FEATURE_DTYPE).tobytes())
    return b"".join(chunks)


def decode_header(data: bytes) -> BankFileHeader:
    if len(data) < HEADER_DTYPE.itemsize:
        raise BankFormatError(f"bank file truncated: {len(data)} bytes, no header")
    raw = np.frombuffer(data, dtype=HEADER_DTYPE, count=1)[0]
    magic = bytes(raw["magic"])
    if magic != BANK_MAGIC:
        raise BankFormatError(f"bad bank magic {magic!r}")
    if int(raw["dim"]) < 1:
        raise BankFormatError("bank dimension must be positive")
    return BankFileHeader(
        magic=magic,
        dim=int(raw["dim"]),
        clip_count=int(raw["clip_count"]),
        flags=int(raw["flags"]),
    )


def decode_bank(data: bytes) -> List[ClipFeatures]:
    """Parse a bank byte image; features are widened to float64"""
    header = decode_header(data)
    offset = HEADER_DTYPE.itemsize
    clips: List[ClipFeatures] = []

    for index in range(header.clip_count):
        if offset + CLIP_PREFIX_DTYPE.itemsize > len(data):
            raise BankFormatError(f"bank file truncated in clip {index} prefix")
        prefix = np.frombuffer(data, dtype=CLIP_PREFIX_DTYPE, count=1, offset=offset)[0]
        offset += CLIP_PREFIX_DTYPE.itemsize

        n_actors = int(prefix["n_actors"])
        count = n_actors * header.dim
        if offset + count * FEATURE_DTYPE.itemsize > len(data):
            raise BankFormatError(f"bank file truncated in clip {index} features")
        features = np.frombuffer(data, dtype=FEATURE_DTYPE, count=count, offset=offset)
        offset += count * FEATURE_DTYPE.itemsize

        clips.append(
            ClipFeatures(
                timestamp=int(prefix["timestamp"]),
                features=features.astype(np.float64).reshape(n_actors, header.dim),
            )
        )

    if offset != len(data):
        raise BankFormatError(
            f"{len(data) - offset} trailing bytes after {header.clip_count} clips"
        )
    return clips


def write_bank(
    path: str,
    clips: Sequence[ClipFeatures],
    centered: bool = False,
    dim: Optional[int] = None,
) -> None:
    """
    Write clips to `path`. Features are stored as float32, so float64 values
    round-trip exactly only when they are float32-representable.
    """
    data = encode_bank(clips, centered=centered, dim=dim)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)
    logger.debug(f"Wrote bank {path} ({len(data)} bytes)")


def read_bank(path: str) -> List[ClipFeatures]:
    """
    Raises:
        BankFormatError: bad magic, truncated file or trailing bytes
    """
    with open(path, "rb") as f:
        data = f.read()
    clips = decode_bank(data)
    logger.debug(f"Read bank {path}: {len(clips)} clips")
    return clips
