"""Seeded SLIC superpixels in (CIELAB, x, y) space.

Scribble-derived foreground seeds and filtered background seeds become
initial cluster centers, topped up with a regular grid to approach the target
count. Assignment ties break to the lowest cluster id so the labeling is
bit-reproducible, and a post-pass re-attaches disconnected fragments to their
largest adjacent cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import validate_image
from .expansion import ExpansionConfig, SeedSet

_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# D65 white as this matrix actually produces it, so rgb (1,1,1) lands on
# exactly L=100, a=b=0
_WHITE = _RGB_TO_XYZ.sum(axis=1)


def rgb_to_lab(img: np.ndarray) -> np.ndarray:
    """sRGB in [0,1] to CIELAB (D65), vectorized."""
    rgb = np.asarray(img, dtype=np.float64)
    lin = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    xyz = lin @ _RGB_TO_XYZ.T
    xyz = xyz / np.asarray(_WHITE)
    delta = 6.0 / 29.0
    f = np.where(xyz > delta**3, np.cbrt(xyz), xyz / (3 * delta**2) + 4.0 / 29.0)
    lab = np.empty_like(xyz)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


@dataclass
class SuperpixelMap:
    labels: np.ndarray  # H x W int32, cluster ids 0..K-1
    centers: np.ndarray  # K x 5 float64: row, col, L, a, b
    adjacency: list[tuple[int, int]]  # 8-connected cluster pairs, i < j, sorted
    mean_color: np.ndarray  # K x 3 CIELAB


def _initial_centers(h: int, w: int, seeds: SeedSet, n_slic: int) -> np.ndarray:
    interval = math.sqrt(h * w / float(n_slic))
    taken: set[tuple[int, int]] = set()
    cells: set[tuple[int, int]] = set()
    pts: list[tuple[float, float]] = []
    for r, c in list(seeds.foreground) + list(seeds.background):
        if not (0 <= r < h and 0 <= c < w):
            raise ValueError(f"seed ({r}, {c}) outside image {h}x{w}")
        if (r, c) in taken:
            continue
        taken.add((r, c))
        cells.add((int(r // interval), int(c // interval)))
        pts.append((float(r), float(c)))
    rows = np.floor(np.arange(interval / 2.0, h, interval)).astype(int)
    cols = np.floor(np.arange(interval / 2.0, w, interval)).astype(int)
    for r in rows:
        for c in cols:
            cell = (int(r // interval), int(c // interval))
            if cell in cells:
                continue
            cells.add(cell)
            pts.append((float(r), float(c)))
    return np.asarray(pts, dtype=np.float64)


def _cluster_stats(labels: np.ndarray, lab: np.ndarray, k: int):
    """Per-cluster pixel count, mean position and mean color."""
    flat = labels.ravel()
    counts = np.bincount(flat, minlength=k).astype(np.float64)
    h, w = labels.shape
    rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    sums = np.empty((k, 5), dtype=np.float64)
    sums[:, 0] = np.bincount(flat, weights=rr.ravel(), minlength=k)
    sums[:, 1] = np.bincount(flat, weights=cc.ravel(), minlength=k)
    for ch in range(3):
        sums[:, 2 + ch] = np.bincount(flat, weights=lab[..., ch].ravel(), minlength=k)
    return counts, sums


def _adjacency_pairs(labels: np.ndarray) -> list[tuple[int, int]]:
    pairs: set[tuple[int, int]] = set()
    shifts = ((0, 1), (1, 0), (1, 1), (1, -1))
    for dr, dc in shifts:
        if dc >= 0:
            a = labels[: labels.shape[0] - dr, : labels.shape[1] - dc]
            b = labels[dr:, dc:]
        else:
            a = labels[: labels.shape[0] - dr, -dc:]
            b = labels[dr:, : labels.shape[1] + dc]
        diff = a != b
        lo = np.minimum(a[diff], b[diff])
        hi = np.maximum(a[diff], b[diff])
        pairs.update(zip(lo.tolist(), hi.tolist()))
    return sorted(pairs)


def _components(labels: np.ndarray):
    """Connected components of the label map itself (8-connectivity within a
    label). Returns per-pixel component ids."""
    h, w = labels.shape
    n = h * w
    idx = np.arange(n).reshape(h, w)
    us, vs = [], []
    for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
        if dc >= 0:
            a_lab = labels[: h - dr, : w - dc]
            b_lab = labels[dr:, dc:]
            a_idx = idx[: h - dr, : w - dc]
            b_idx = idx[dr:, dc:]
        else:
            a_lab = labels[: h - dr, -dc:]
            b_lab = labels[dr:, : w + dc]
            a_idx = idx[: h - dr, -dc:]
            b_idx = idx[dr:, : w + dc]
        same = a_lab == b_lab
        us.append(a_idx[same].ravel())
        vs.append(b_idx[same].ravel())
    u = np.concatenate(us)
    v = np.concatenate(vs)
    g = coo_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(n, n))
    ncomp, comp = connected_components(g, directed=False)
    return ncomp, comp.reshape(h, w)


def _enforce_connectivity(labels: np.ndarray) -> np.ndarray:
    """Keep each cluster's largest component, then fold every orphan fragment
    into the largest cluster it touches (iterating so targets are always
    already-connected regions). Ties: larger size wins, then lower label."""
    h, w = labels.shape
    ncomp, comp = _components(labels)
    flatc = comp.ravel()
    flatl = labels.ravel()
    sizes = np.bincount(flatc, minlength=ncomp)
    uniq, first_idx = np.unique(flatc, return_index=True)
    comp_label = flatl[first_idx]  # label of each component (uniq == arange(ncomp))

    best: dict[int, tuple[tuple[int, int], int]] = {}
    for ci in range(ncomp):
        key = (-int(sizes[ci]), int(first_idx[ci]))
        lab = int(comp_label[ci])
        if lab not in best or key < best[lab][0]:
            best[lab] = (key, ci)
    kept = {ci for _, ci in best.values()}

    # component adjacency from 8-neighbor pixel pairs
    adj: dict[int, set[int]] = {ci: set() for ci in range(ncomp)}
    for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
        if dc >= 0:
            a = comp[: h - dr, : w - dc]
            b = comp[dr:, dc:]
        else:
            a = comp[: h - dr, -dc:]
            b = comp[dr:, : w + dc]
        diff = a != b
        for x, y in zip(a[diff].tolist(), b[diff].tolist()):
            adj[x].add(y)
            adj[y].add(x)

    new_label = {ci: int(comp_label[ci]) for ci in kept}
    label_size: dict[int, int] = {}
    for ci in kept:
        lab = int(comp_label[ci])
        label_size[lab] = label_size.get(lab, 0) + int(sizes[ci])

    pending = sorted((ci for ci in range(ncomp) if ci not in kept), key=lambda ci: first_idx[ci])
    while pending:
        progressed = False
        still = []
        for ci in pending:
            targets = {new_label[cj] for cj in adj[ci] if cj in new_label}
            if not targets:
                still.append(ci)
                continue
            target = max(targets, key=lambda lb: (label_size.get(lb, 0), -lb))
            new_label[ci] = target
            label_size[target] = label_size.get(target, 0) + int(sizes[ci])
            progressed = True
        if not progressed:
            # every label has an anchored component, so an orphan region can
            # only be starved if it fills the whole image; guard regardless
            ci = still[0]
            new_label[ci] = int(comp_label[ci])
            label_size[new_label[ci]] = int(sizes[ci])
        pending = still

    remap = np.empty(ncomp, dtype=np.int64)
    for ci in range(ncomp):
        remap[ci] = new_label[ci]
    merged = remap[comp]
    # compact to 0..K-1 preserving ascending original ids
    surviving = np.unique(merged)
    compact = np.searchsorted(surviving, merged)
    return compact.astype(np.int32)


def slic(img: np.ndarray, seeds: SeedSet, cfg: ExpansionConfig) -> SuperpixelMap:
    """Seeded SLIC clustering with deterministic tie-breaking.

    Distance is d_lab^2 + (compactness / interval)^2 * d_xy^2; each center
    claims pixels within a 2*interval window, lower ids winning exact ties.
    """
    img = validate_image(img)
    cfg.validate()
    h, w = img.shape[:2]
    lab = rgb_to_lab(img)
    centers_pos = _initial_centers(h, w, seeds, cfg.n_slic)
    k = centers_pos.shape[0]
    if k < 2:
        raise ValueError(f"need at least 2 initial centers, got {k}")
    interval = math.sqrt(h * w / float(cfg.n_slic))
    ratio = (cfg.slic_compactness / interval) ** 2

    rows0 = np.clip(np.round(centers_pos[:, 0]).astype(int), 0, h - 1)
    cols0 = np.clip(np.round(centers_pos[:, 1]).astype(int), 0, w - 1)
    centers = np.concatenate([centers_pos, lab[rows0, cols0]], axis=1)  # K x 5

    labels = np.zeros((h, w), dtype=np.int32)
    for _ in range(cfg.slic_iterations):
        dist = np.full((h, w), np.inf)
        labels = np.full((h, w), -1, dtype=np.int32)
        span = 2.0 * interval
        for ki in range(k):
            cr, cc = centers[ki, 0], centers[ki, 1]
            r0 = max(int(math.floor(cr - span)), 0)
            r1 = min(int(math.ceil(cr + span)) + 1, h)
            c0 = max(int(math.floor(cc - span)), 0)
            c1 = min(int(math.ceil(cc + span)) + 1, w)
            if r0 >= r1 or c0 >= c1:
                continue
            sub = lab[r0:r1, c0:c1]
            dcol = ((sub - centers[ki, 2:5]) ** 2).sum(axis=-1)
            rr = np.arange(r0, r1, dtype=np.float64)[:, None]
            ccs = np.arange(c0, c1, dtype=np.float64)[None, :]
            d = dcol + ratio * ((rr - cr) ** 2 + (ccs - cc) ** 2)
            win = dist[r0:r1, c0:c1]
            upd = d < win  # strict: ties stay with the lower id
            win[upd] = d[upd]
            labels[r0:r1, c0:c1][upd] = ki
        if (labels < 0).any():
            _assign_orphans(labels, dist, lab, centers, ratio)
        counts, sums = _cluster_stats(labels, lab, k)
        nz = counts > 0
        centers[nz] = sums[nz] / counts[nz, None]

    labels = _enforce_connectivity(labels)
    k_final = int(labels.max()) + 1
    counts, sums = _cluster_stats(labels, lab, k_final)
    centers = sums / counts[:, None]
    return SuperpixelMap(
        labels=labels,
        centers=centers,
        adjacency=_adjacency_pairs(labels),
        mean_color=centers[:, 2:5].copy(),
    )


def _assign_orphans(labels, dist, lab, centers, ratio) -> None:
    """Pixels outside every search window: take the globally nearest center
    (lowest id on ties, via strict improvement)."""
    miss = np.argwhere(labels < 0)
    for r, c in miss:
        d = ((centers[:, 2:5] - lab[r, c]) ** 2).sum(axis=1) + ratio * (
            (centers[:, 0] - r) ** 2 + (centers[:, 1] - c) ** 2
        )
        ki = int(np.argmin(d))  # argmin returns the first (lowest) index on ties
        labels[r, c] = ki
        dist[r, c] = d[ki]
