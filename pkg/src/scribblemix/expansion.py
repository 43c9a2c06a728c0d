"""Scribble label expansion: buffer statistics, seed selection, label merging.

The pipeline turns a scribble (thin road centerline) into a tri-state
pseudo-label: a distance-based buffer gives the statistic label y_s, seeded
superpixels plus a graph cut give the content label y_c, and the two merge
into the final map with conflicts downgraded to uncertain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .core import validate_image, validate_mask, validate_trilabel
from .scribbles import detect_keypoints, sample_representative


@dataclass(frozen=True)
class ExpansionConfig:
    """Knobs for statistic and content-based expansion.

    b1/b2 are the inner and outer buffer radii in pixels: within b1 of a
    scribble is foreground, between b1 and b2 uncertain, past b2 background.
    gc_sigma None means "use the mean adjacent-superpixel color distance".
    literal_formulas switches the stride and background-seed spacing to the
    un-rescaled H*W forms (kept for fidelity experiments; they produce
    strides larger than the image on realistic sizes).
    """

    b1: float = 4.0
    b2: float = 8.0
    n_slic: int = 1024
    slic_compactness: float = 10.0
    slic_iterations: int = 10
    gc_sigma: float | None = None
    gc_lambda: float = 1.0
    literal_formulas: bool = False

    def validate(self) -> "ExpansionConfig":
        if not (0 < self.b1 < self.b2):
            raise ValueError(f"need 0 < b1 < b2, got b1={self.b1}, b2={self.b2}")
        if self.n_slic < 2:
            raise ValueError(f"n_slic must be >= 2, got {self.n_slic}")
        if self.slic_iterations < 1:
            raise ValueError("slic_iterations must be >= 1")
        if self.gc_sigma is not None and not self.gc_sigma > 0:
            raise ValueError(f"gc_sigma must be > 0 when given, got {self.gc_sigma}")
        return self


@dataclass
class SeedSet:
    """Foreground seeds (keypoints + stride samples, all on the scribble) and
    background seeds (grid points safely outside the uncertainty buffer)."""

    foreground: list[tuple[int, int]] = field(default_factory=list)
    background: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.foreground) + len(self.background)


def distance_transform(s: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance from every pixel to the nearest scribble pixel."""
    s = validate_mask(s)
    if not s.any():
        raise ValueError("distance transform undefined for an empty scribble")
    # EDT measures distance to the nearest zero, so feed the complement
    return ndimage.distance_transform_edt(s == 0)


def statistic_expand(dis: np.ndarray, cfg: ExpansionConfig) -> np.ndarray:
    """Buffer expansion: foreground within b1, uncertain within b2, else background.

    Distance 0 (the scribble itself) counts as foreground.
    """
    cfg.validate()
    dis = np.asarray(dis, dtype=np.float64)
    y = np.zeros(dis.shape, dtype=np.float64)
    y[dis <= cfg.b2] = 0.5
    y[dis <= cfg.b1] = 1.0
    return y


def compute_stride(h: int, w: int, n_slic: int, literal: bool = False) -> int:
    """Sampling stride for representative scribble points.

    The literal form divides the pixel count H*W by sqrt(2*n_slic); the
    default rescales the numerator to sqrt(H*W) (the superpixel grid interval
    over sqrt(2)), clamped to at least 1.
    """
    if h < 1 or w < 1 or n_slic < 1:
        raise ValueError("h, w, n_slic must all be >= 1")
    denom = math.sqrt(2.0) * math.sqrt(float(n_slic))
    raw = (h * w) / denom if literal else math.sqrt(float(h * w)) / denom
    return max(1, int(math.floor(raw + 0.5)))


def sample_background_seeds(dis: np.ndarray, cfg: ExpansionConfig) -> list[tuple[int, int]]:
    """Regular grid of candidate points, keeping those strictly farther than
    (b1+b2)/2 from the scribble. May legitimately return an empty list."""
    cfg.validate()
    dis = np.asarray(dis, dtype=np.float64)
    h, w = dis.shape
    if cfg.literal_formulas:
        g = (h * w) / float(cfg.n_slic)
    else:
        g = math.sqrt((h * w) / float(cfg.n_slic))
    if g < 1.0:
        g = 1.0
    rows = np.unique(np.floor(np.arange(g / 2.0, h, g)).astype(int))
    cols = np.unique(np.floor(np.arange(g / 2.0, w, g)).astype(int))
    thresh = (cfg.b1 + cfg.b2) / 2.0
    out: list[tuple[int, int]] = []
    for r in rows:
        keep = dis[r, cols] > thresh
        out.extend((int(r), int(c)) for c in cols[keep])
    return out


def collect_seeds(s: np.ndarray, dis: np.ndarray, cfg: ExpansionConfig) -> SeedSet:
    """Foreground seeds = keypoints plus stride-sampled representatives;
    background seeds from the filtered grid."""
    h, w = np.asarray(s).shape
    q = compute_stride(h, w, cfg.n_slic, cfg.literal_formulas)
    keys = detect_keypoints(s)
    rep = sample_representative(s, q)
    fg: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for pt in keys.endpoints + keys.intersections + rep:
        if pt not in seen:
            seen.add(pt)
            fg.append(pt)
    bg = sample_background_seeds(dis, cfg)
    return SeedSet(foreground=fg, background=bg)


def merge_labels(y_s: np.ndarray, y_c: np.ndarray) -> np.ndarray:
    """Combine statistic and content labels: a pixel the statistics call
    background but the graph cut calls road becomes uncertain; everywhere
    else the statistic label stands."""
    y_s = validate_trilabel(y_s)
    y_c = np.asarray(y_c, dtype=np.float64)
    if y_s.shape != y_c.shape:
        raise ValueError(f"shape mismatch: {y_s.shape} vs {y_c.shape}")
    if not np.isin(y_c, (0.0, 1.0)).all():
        raise ValueError("content label must be binary {0, 1}")
    y = y_s.copy()
    y[(y_s == 0.0) & (y_c == 1.0)] = 0.5
    return y


@dataclass
class ExpansionResult:
    y_s: np.ndarray
    y_c: np.ndarray
    y: np.ndarray
    seeds: SeedSet
    stats: dict


def expand_scribble(img: np.ndarray, s: np.ndarray, cfg: ExpansionConfig) -> ExpansionResult:
    """Full expansion for one image: statistic buffer, seeded superpixels,
    graph cut, merge. Falls back to y_c = statistic foreground when either
    seed side is empty (e.g. scribble buffer covers the whole frame)."""
    from .graphcut import SeedError, graph_cut
    from .slic import slic

    img = validate_image(img)
    cfg.validate()
    dis = distance_transform(s)
    y_s = statistic_expand(dis, cfg)
    seeds = collect_seeds(s, dis, cfg)
    stats: dict = {
        "fg_seeds": len(seeds.foreground),
        "bg_seeds": len(seeds.background),
    }
    try:
        if not seeds.foreground or not seeds.background:
            raise SeedError("missing foreground or background seeds")
        sp = slic(img, seeds, cfg)
        stats["superpixels"] = int(sp.centers.shape[0])
        y_c = graph_cut(sp, seeds, cfg)
        stats["graph_cut"] = "ok"
    except SeedError as e:
        y_c = (y_s == 1.0).astype(np.float64)
        stats["graph_cut"] = f"fallback to statistic foreground ({e})"
    y = merge_labels(y_s, y_c)
    return ExpansionResult(y_s=y_s, y_c=y_c, y=y, seeds=seeds, stats=stats)
