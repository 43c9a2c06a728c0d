"""File-format plumbing for datasets emitted by the scribblemix CLI.

This package talks to the pipeline exclusively through its on-disk formats —
PNG rasters, JSON manifests, and the little-endian float32 tensor files —
so the codecs here are independent re-implementations of those contracts,
not imports.

Tensor file layout (little-endian): magic ``RTB1``, rank ``u8`` (0..4),
``rank x u32`` dims, then row-major float32 payload.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from PIL import Image

TENSOR_MAGIC = b"RTB1"
_TRI_BYTES = {0: 0.0, 128: 0.5, 255: 1.0}

# output-file suffixes the pipeline appends to a scene stem; anything else
# under a dataset directory is an input image
DERIVED_TAGS = ("_mask", "_scribble", "_ys", "_yc", "_y", "_overlay")


def read_tensor(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 5 or raw[:4] != TENSOR_MAGIC:
        raise ValueError(f"{path}: not a tensor file (bad magic)")
    rank = raw[4]
    if rank > 4:
        raise ValueError(f"{path}: rank {rank} out of range 0..4")
    header_end = 5 + 4 * rank
    if len(raw) < header_end:
        raise ValueError(f"{path}: truncated dimension header")
    dims = struct.unpack(f"<{rank}I", raw[5:header_end]) if rank else ()
    count = int(np.prod(dims, dtype=np.int64)) if rank else 1
    payload = raw[header_end:]
    if len(payload) != 4 * count:
        raise ValueError(
            f"{path}: payload holds {len(payload)} bytes, expected {4 * count}"
        )
    arr = np.frombuffer(payload, dtype="<f4").reshape(dims)
    return arr.copy()


def write_tensor(path: str | Path, arr: np.ndarray) -> None:
    a = np.asarray(arr, dtype="<f4", order="C")
    if a.ndim > 4:
        raise ValueError(f"tensor rank {a.ndim} out of range 0..4")
    dims = struct.pack(f"<{a.ndim}I", *a.shape) if a.ndim else b""
    Path(path).write_bytes(TENSOR_MAGIC + bytes([a.ndim]) + dims + a.tobytes())


def load_image(path: str | Path) -> np.ndarray:
    """RGB PNG as H x W x 3 float32 in [0, 1]."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32)
    return arr / 255.0


def load_tri(path: str | Path) -> np.ndarray:
    """Tri-state label PNG ({0,128,255} grayscale) as float32 {0, 0.5, 1}."""
    with Image.open(path) as im:
        raw = np.asarray(im.convert("L"), dtype=np.uint8)
    out = np.zeros(raw.shape, dtype=np.float32)
    for byte, val in _TRI_BYTES.items():
        out[raw == byte] = val
    known = np.isin(raw, list(_TRI_BYTES))
    if not known.all():
        bad = int(raw[~known].flat[0])
        raise ValueError(f"{path}: invalid label byte {bad}; expected 0, 128 or 255")
    return out


def load_mask(path: str | Path) -> np.ndarray:
    """Binary mask PNG ({0,255} or {0,1} grayscale) as uint8 {0, 1}."""
    with Image.open(path) as im:
        raw = np.asarray(im.convert("L"), dtype=np.uint8)
    ok = np.isin(raw, (0, 1, 255))
    if not ok.all():
        bad = int(raw[~ok].flat[0])
        raise ValueError(f"{path}: mask holds non-binary value {bad}")
    return (raw > 0).astype(np.uint8)


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def image_stems(data_dir: str | Path) -> list[str]:
    """Stems of the plain input images in a directory, skipping every
    pipeline-derived PNG."""
    stems = []
    for f in sorted(Path(data_dir).glob("*.png")):
        if not any(f.stem.endswith(tag) for tag in DERIVED_TAGS):
            stems.append(f.stem)
    return stems
