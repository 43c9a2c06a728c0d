"""Structure-aware mixing: gated pasting of non-background regions between an
image pair, with the same arithmetic applied to labels and predictions.

The gate compares the pair's HSV color distributions with a one-directional
KL divergence; pairs at or above the threshold are left untouched (the
returned arrays are bitwise copies of the originals).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import nonbackground_mask, validate_image, validate_prediction, validate_trilabel


@dataclass(frozen=True)
class MixConfig:
    t: float = 0.5
    h_bins: int = 16
    s_bins: int = 8
    v_bins: int = 8
    epsilon: float = 1e-6

    def validate(self) -> "MixConfig":
        if not self.t > 0:
            raise ValueError(f"threshold t must be > 0, got {self.t}")
        if min(self.h_bins, self.s_bins, self.v_bins) < 2:
            raise ValueError("histogram bins must all be >= 2")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        return self


@dataclass
class ColorHistogram:
    bins: np.ndarray  # flattened, smoothed, sums to 1
    bin_counts: tuple[int, int, int]


@dataclass
class MixedPair:
    x_m_12: np.ndarray
    x_m_21: np.ndarray
    y_m_12: np.ndarray
    y_m_21: np.ndarray
    gate: int
    kl_value: float


def rgb_to_hsv(img: np.ndarray) -> np.ndarray:
    """Vectorized RGB -> HSV, all channels in [0, 1]."""
    rgb = np.asarray(img, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=-1)
    c = v - rgb.min(axis=-1)
    s = np.where(v > 0, c / np.where(v > 0, v, 1.0), 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        hr = np.mod((g - b) / c, 6.0)
        hg = (b - r) / c + 2.0
        hb = (r - g) / c + 4.0
    h = np.select([v == r, v == g], [hr, hg], default=hb) / 6.0
    h = np.where(c == 0, 0.0, h)
    h = np.mod(h, 1.0)
    return np.stack([h, s, v], axis=-1)


def hsv_histogram(img: np.ndarray, cfg: MixConfig) -> ColorHistogram:
    """Joint 3-D HSV histogram, normalized, epsilon-smoothed, renormalized."""
    img = validate_image(img)
    cfg.validate()
    hsv = rgb_to_hsv(img)
    shape = (cfg.h_bins, cfg.s_bins, cfg.v_bins)
    idx = []
    for ch, nb in enumerate(shape):
        b = np.floor(hsv[..., ch] * nb).astype(np.int64)
        idx.append(np.minimum(b, nb - 1))
    flat = np.ravel_multi_index(idx, shape).ravel()
    counts = np.bincount(flat, minlength=int(np.prod(shape))).astype(np.float64)
    p = counts / counts.sum()
    p = (p + cfg.epsilon) / (1.0 + cfg.epsilon * p.size)
    return ColorHistogram(bins=p, bin_counts=shape)


def kl_divergence(h1: ColorHistogram, h2: ColorHistogram) -> float:
    """One-directional KL(h1 || h2); both histograms must share a bin layout
    and be smoothed (no zero bins)."""
    if h1.bin_counts != h2.bin_counts or h1.bins.shape != h2.bins.shape:
        raise ValueError(
            f"histogram bin layouts differ: {h1.bin_counts} vs {h2.bin_counts}"
        )
    return float(np.sum(h1.bins * np.log(h1.bins / h2.bins)))


def color_gate(x1: np.ndarray, x2: np.ndarray, cfg: MixConfig) -> tuple[int, float]:
    """Gate = 1 iff KL(hist(x1), hist(x2)) < t, strictly."""
    kl = kl_divergence(hsv_histogram(x1, cfg), hsv_histogram(x2, cfg))
    return (1 if kl < cfg.t else 0), kl


def _check_gate(gate: int) -> int:
    if gate not in (0, 1):
        raise ValueError(f"gate must be 0 or 1, got {gate!r}")
    return int(gate)


def mix_images(
    x1: np.ndarray, x2: np.ndarray, y1: np.ndarray, y2: np.ndarray, gate: int
) -> tuple[np.ndarray, np.ndarray]:
    """Paste each image's non-background region onto the other, when gated on."""
    x1 = validate_image(x1)
    x2 = validate_image(x2)
    gate = _check_gate(gate)
    a1 = nonbackground_mask(y1).astype(np.float64)
    a2 = nonbackground_mask(y2).astype(np.float64)
    if x1.shape != x2.shape or a1.shape != x1.shape[:2] or a2.shape != x2.shape[:2]:
        raise ValueError("mix_images inputs must share one H x W")
    if gate == 0:
        return x1.copy(), x2.copy()
    m12 = x1 * (1.0 - a2[..., None]) + x2 * a2[..., None]
    m21 = x2 * (1.0 - a1[..., None]) + x1 * a1[..., None]
    return m12, m21


def _mix_maps(
    m1: np.ndarray, m2: np.ndarray, a1: np.ndarray, a2: np.ndarray, gate: int
) -> tuple[np.ndarray, np.ndarray]:
    if gate == 0:
        return m1.copy(), m2.copy()
    # binary alpha keeps the arithmetic exact: each output pixel is bitwise
    # one of the two inputs
    m12 = m1 * (1.0 - a2) + m2 * a2
    m21 = m2 * (1.0 - a1) + m1 * a1
    return m12, m21


def mix_labels(y1: np.ndarray, y2: np.ndarray, gate: int) -> tuple[np.ndarray, np.ndarray]:
    y1 = validate_trilabel(y1)
    y2 = validate_trilabel(y2)
    if y1.shape != y2.shape:
        raise ValueError(f"shape mismatch: {y1.shape} vs {y2.shape}")
    gate = _check_gate(gate)
    a1 = nonbackground_mask(y1).astype(np.float64)
    a2 = nonbackground_mask(y2).astype(np.float64)
    return _mix_maps(y1, y2, a1, a2, gate)


def mix_predictions(
    p1: np.ndarray, p2: np.ndarray, y1: np.ndarray, y2: np.ndarray, gate: int
) -> tuple[np.ndarray, np.ndarray]:
    """Mix prediction maps with the labels' non-background masks; the result
    is the stop-gradient target of the invariance loss."""
    p1 = validate_prediction(p1)
    p2 = validate_prediction(p2)
    if p1.shape != p2.shape:
        raise ValueError(f"shape mismatch: {p1.shape} vs {p2.shape}")
    gate = _check_gate(gate)
    a1 = nonbackground_mask(y1).astype(np.float64)
    a2 = nonbackground_mask(y2).astype(np.float64)
    if a1.shape != p1.shape:
        raise ValueError("labels and predictions must share one H x W")
    return _mix_maps(p1, p2, a1, a2, gate)


def make_mixed_pair(
    x1: np.ndarray, x2: np.ndarray, y1: np.ndarray, y2: np.ndarray, cfg: MixConfig
) -> MixedPair:
    gate, kl = color_gate(x1, x2, cfg)
    xm12, xm21 = mix_images(x1, x2, y1, y2, gate)
    ym12, ym21 = mix_labels(y1, y2, gate)
    return MixedPair(x_m_12=xm12, x_m_21=xm21, y_m_12=ym12, y_m_21=ym21, gate=gate, kl_value=kl)
