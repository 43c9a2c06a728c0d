"""Overlay rendering for visual inspection of labels and masks."""

from __future__ import annotations

import numpy as np

from .core import validate_image, validate_trilabel

_GREEN = np.array([0.0, 1.0, 0.0])
_YELLOW = np.array([1.0, 1.0, 0.0])


def render_overlay(img: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Blend label classes over the image: foreground green at 50% alpha,
    uncertain yellow at 50% alpha, background untouched.

    Accepts a tri-label or a binary mask (a mask has no uncertain class).
    """
    img = validate_image(img)
    y = np.asarray(y)
    if y.shape != img.shape[:2]:
        raise ValueError(f"shape mismatch: label {y.shape} vs image {img.shape[:2]}")
    if y.dtype.kind in "ui" or set(np.unique(y)).issubset({0.0, 1.0}):
        tri = (np.asarray(y) > 0).astype(np.float64)
    else:
        tri = validate_trilabel(y)
    out = img.copy()
    fg = tri == 1.0
    un = tri == 0.5
    out[fg] = 0.5 * img[fg] + 0.5 * _GREEN
    out[un] = 0.5 * img[un] + 0.5 * _YELLOW
    return out
