"""File formats: PNG raster IO, the TensorBlob binary format, atomic writes.

TensorBlob layout (little-endian throughout):

    magic   4 bytes  b"RTB1"
    rank    u8       0..4
    dims    rank x u32
    payload prod(dims) float32, row-major

Readers reject wrong magic, rank > 4 and size mismatches with a FormatError
carrying the byte offset of the problem.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import FormatError, tri_decode, tri_encode, validate_image, validate_mask

TENSOR_MAGIC = b"RTB1"


def _read_png(path: str | Path, mode: str) -> np.ndarray:
    """Decode a PNG into a uint8 array in the requested mode. Undecodable
    bytes are a format error; a missing path stays a usage-level error."""
    try:
        with Image.open(path) as im:
            if im.mode != mode:
                im = im.convert(mode)
            return np.asarray(im, dtype=np.uint8)
    except (FileNotFoundError, IsADirectoryError):
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as e:
        raise FormatError(f"{path}: cannot decode PNG ({e})") from None


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _encode_png(arr: np.ndarray, mode: str) -> bytes:
    import io as _io

    buf = _io.BytesIO()
    Image.fromarray(arr, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


# ---------------------------------------------------------------- images


def load_image(path: str | Path) -> np.ndarray:
    """Load an RGB PNG as H x W x 3 float64 in [0, 1]."""
    return _read_png(path, "RGB").astype(np.float64) / 255.0


def save_image(path: str | Path, img: np.ndarray) -> None:
    img = validate_image(img)
    raw = np.floor(img * 255.0 + 0.5).astype(np.uint8)
    atomic_write_bytes(path, _encode_png(raw, "RGB"))


def load_tri(path: str | Path) -> np.ndarray:
    """Load a tri-label PNG ({0,128,255} grayscale) as a {0, 0.5, 1} float map."""
    arr = _read_png(path, "L")
    try:
        return tri_decode(arr)
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from None


def save_tri(path: str | Path, y: np.ndarray) -> None:
    atomic_write_bytes(path, _encode_png(tri_encode(y), "L"))


def load_mask(path: str | Path) -> np.ndarray:
    """Load a binary mask PNG; accepts {0,255} or {0,1} grayscale."""
    arr = _read_png(path, "L")
    vals = np.unique(arr)
    if not np.isin(vals, (0, 1, 255)).all():
        bad = [int(v) for v in vals if v not in (0, 1, 255)]
        raise FormatError(f"{path}: mask holds non-binary values {bad[:8]}")
    return (arr > 0).astype(np.uint8)


def save_mask(path: str | Path, mask: np.ndarray) -> None:
    m = validate_mask(mask)
    atomic_write_bytes(path, _encode_png(m * np.uint8(255), "L"))


# ---------------------------------------------------------------- tensor blobs


def write_tensor(path: str | Path, arr: np.ndarray) -> None:
    """Serialize an array (rank <= 4) as a TensorBlob file."""
    # note: ascontiguousarray would promote 0-d arrays to 1-d
    a = np.asarray(arr, dtype="<f4", order="C")
    if a.ndim > 4:
        raise FormatError(f"tensor rank {a.ndim} exceeds 4")
    header = TENSOR_MAGIC + struct.pack("<B", a.ndim)
    header += struct.pack(f"<{a.ndim}I", *a.shape)
    atomic_write_bytes(path, header + a.tobytes())


def read_tensor(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 4:
        raise FormatError(f"{path}: truncated header, {len(data)} bytes (error at byte 0)")
    if data[:4] != TENSOR_MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r} (error at byte 0)")
    if len(data) < 5:
        raise FormatError(f"{path}: missing rank (error at byte 4)")
    rank = data[4]
    if rank > 4:
        raise FormatError(f"{path}: rank {rank} exceeds 4 (error at byte 4)")
    dims_end = 5 + 4 * rank
    if len(data) < dims_end:
        raise FormatError(f"{path}: truncated dim table (error at byte {len(data)})")
    dims = struct.unpack_from(f"<{rank}I", data, 5)
    count = math.prod(dims)
    expected = dims_end + 4 * count
    if len(data) != expected:
        raise FormatError(
            f"{path}: payload size mismatch, expected {expected} bytes total, "
            f"got {len(data)} (error at byte {min(len(data), expected)})"
        )
    flat = np.frombuffer(data, dtype="<f4", count=count, offset=dims_end)
    return flat.reshape(dims).copy()


def sha256_file(path: str | Path) -> str:
    import hashlib

    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
