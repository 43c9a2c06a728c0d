"""Shared raster types and the tri-state label codec.

Everything downstream works on plain numpy buffers:

* image:     H x W x 3 float in [0, 1]
* mask:      H x W uint8 in {0, 1}
* tri-label: H x W float64 over exactly {0.0, 0.5, 1.0}
             (background / uncertain / foreground)
* prediction: H x W float in [0, 1]

Tri-labels are stored as exact floats so equality tests stay bit-exact;
on disk they become 8-bit grayscale {0, 128, 255}.
"""

from __future__ import annotations

import numpy as np

TRI_VALUES = (0.0, 0.5, 1.0)


class FormatError(ValueError):
    """On-disk or in-memory data violates a format contract."""


class NumericError(ValueError):
    """A numeric contract failed (non-finite value, undefined quantity)."""


def validate_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"image must be HxWx3, got shape {img.shape}")
    if not np.isfinite(img).all():
        raise NumericError("image contains non-finite values")
    if img.min() < 0.0 or img.max() > 1.0:
        raise ValueError("image values must lie in [0, 1]")
    return img


def validate_mask(mask: np.ndarray) -> np.ndarray:
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    u = np.unique(m)
    if not np.isin(u, (0, 1)).all():
        raise ValueError(f"mask values must be 0/1, found {u[:8]}")
    return m.astype(np.uint8)


def validate_trilabel(y: np.ndarray) -> np.ndarray:
    """Check a tri-state label map holds exactly {0, 0.5, 1} and return it as float64."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2:
        raise ValueError(f"tri-label must be 2-D, got shape {y.shape}")
    bad = ~((y == 0.0) | (y == 0.5) | (y == 1.0))
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise FormatError(
            f"tri-label holds {y[r, c]!r} at pixel ({r}, {c}); allowed values are 0, 0.5, 1"
        )
    return y


def validate_prediction(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError(f"prediction map must be 2-D, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise NumericError("prediction map contains non-finite values")
    if p.min() < 0.0 or p.max() > 1.0:
        raise ValueError("prediction values must lie in [0, 1]")
    return p


def nonbackground_mask(y: np.ndarray) -> np.ndarray:
    """Indicator of non-background pixels: 1 where y > 0 (foreground or uncertain)."""
    y = validate_trilabel(y)
    return (y > 0.0).astype(np.uint8)


def tri_encode(y: np.ndarray) -> np.ndarray:
    """Map a tri-label to its 8-bit grayscale codes 0 / 128 / 255."""
    y = validate_trilabel(y)
    out = np.zeros(y.shape, dtype=np.uint8)
    out[y == 0.5] = 128
    out[y == 1.0] = 255
    return out


def tri_decode(raster: np.ndarray) -> np.ndarray:
    """Inverse of tri_encode; rejects any byte outside {0, 128, 255}."""
    r = np.asarray(raster)
    if r.ndim != 2:
        raise FormatError(f"tri-label raster must be 2-D, got shape {r.shape}")
    bad = ~((r == 0) | (r == 128) | (r == 255))
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise FormatError(
            f"invalid tri-label byte {int(r[i, j])} at pixel ({i}, {j}); expected 0, 128 or 255"
        )
    y = np.zeros(r.shape, dtype=np.float64)
    y[r == 128] = 0.5
    y[r == 255] = 1.0
    return y
