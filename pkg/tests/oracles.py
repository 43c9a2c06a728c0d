"""Independent reference implementations used as test oracles.

Everything here is deliberately naive: exhaustive scans, per-pixel loops,
full enumeration, central finite differences. Slow but obviously correct,
and written from the contracts rather than from the library code.
"""

from __future__ import annotations

import colorsys
import itertools
import math

import numpy as np


def brute_distance(s: np.ndarray) -> np.ndarray:
    """Exhaustive nearest-scribble Euclidean distance (no transform tricks).

    Squared distances between integer coordinates are exact in float64, so
    the result is bitwise comparable with any exact distance transform.
    """
    s = np.asarray(s)
    pts = np.argwhere(s != 0)
    if len(pts) == 0:
        raise ValueError("scribble has no pixels")
    h, w = s.shape
    rr, cc = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    d2 = (rr[..., None] - pts[:, 0]) ** 2 + (cc[..., None] - pts[:, 1]) ** 2
    return np.sqrt(d2.min(axis=-1))


def loop_tristate(dis: np.ndarray, b1: float, b2: float) -> np.ndarray:
    out = np.empty_like(np.asarray(dis, dtype=np.float64))
    h, w = out.shape
    for r in range(h):
        for c in range(w):
            d = dis[r, c]
            if d <= b1:
                out[r, c] = 1.0
            elif d <= b2:
                out[r, c] = 0.5
            else:
                out[r, c] = 0.0
    return out


def loop_merge(y_s: np.ndarray, y_c: np.ndarray) -> np.ndarray:
    out = np.empty_like(np.asarray(y_s, dtype=np.float64))
    h, w = out.shape
    for r in range(h):
        for c in range(w):
            s, c_ = y_s[r, c], y_c[r, c]
            out[r, c] = 0.5 if (s == 0.0 and c_ == 1.0) else s
    return out


def enumerate_min_cut(
    n: int, src: np.ndarray, snk: np.ndarray, edges: list[tuple[int, int, float]]
) -> float:
    """Exhaustive minimum s/t cut cost over all 2^n side assignments.

    Vectorized over assignments but still a full enumeration: bit i of the
    assignment index says whether node i sits on the source side (pays its
    sink capacity if so, its source capacity otherwise; undirected edges pay
    once when their endpoints disagree).
    """
    src = np.asarray(src, dtype=np.float64)
    snk = np.asarray(snk, dtype=np.float64)
    assign = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.float64)
    cost = assign @ snk + (1.0 - assign) @ src
    for u, v, w in edges:
        cost += w * (assign[:, u] != assign[:, v])
    return float(cost.min())


def fd_gradient(f, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central finite differences of a scalar function, one entry at a time."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        xp = x.copy()
        xm = x.copy()
        xp[idx] += eps
        xm[idx] -= eps
        g[idx] = (f(xp) - f(xm)) / (2.0 * eps)
        it.iternext()
    return g


def max_rel_err(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Largest elementwise relative error, floored at absolute scale 1."""
    a = np.asarray(analytic, dtype=np.float64)
    b = np.asarray(numeric, dtype=np.float64)
    return float((np.abs(a - b) / np.maximum(1.0, np.abs(a))).max())


def loop_confusion(pred: np.ndarray, gt: np.ndarray) -> tuple[int, int, int, int]:
    tp = fp = fn = tn = 0
    for p, g in zip(np.asarray(pred).ravel().tolist(), np.asarray(gt).ravel().tolist()):
        if p and g:
            tp += 1
        elif p and not g:
            fp += 1
        elif not p and g:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def hsv_reference(img: np.ndarray) -> np.ndarray:
    """Per-pixel HSV via the standard library."""
    img = np.asarray(img, dtype=np.float64)
    out = np.empty_like(img)
    h, w, _ = img.shape
    for r in range(h):
        for c in range(w):
            out[r, c] = colorsys.rgb_to_hsv(*img[r, c])
    return out


def histogram_reference(
    img: np.ndarray, h_bins: int, s_bins: int, v_bins: int, epsilon: float
) -> np.ndarray:
    """Per-pixel loop HSV histogram: uniform bins on [0, 1], top edge folded
    into the last bin, count-normalized then epsilon-smoothed."""
    hsv = hsv_reference(img)
    counts = np.zeros((h_bins, s_bins, v_bins), dtype=np.float64)
    hgt, wid, _ = hsv.shape
    for r in range(hgt):
        for c in range(wid):
            i = min(int(math.floor(hsv[r, c, 0] * h_bins)), h_bins - 1)
            j = min(int(math.floor(hsv[r, c, 1] * s_bins)), s_bins - 1)
            k = min(int(math.floor(hsv[r, c, 2] * v_bins)), v_bins - 1)
            counts[i, j, k] += 1.0
    p = counts.ravel() / counts.sum()
    return (p + epsilon) / (1.0 + epsilon * p.size)


def bce_reference(y: np.ndarray, p: np.ndarray, eps: float = 1e-7) -> float:
    """Scalar-loop partial BCE over certain pixels."""
    vals = []
    for yy, pp in zip(np.asarray(y).ravel().tolist(), np.asarray(p).ravel().tolist()):
        if yy == 0.5:
            continue
        pc = min(max(pp, eps), 1.0 - eps)
        vals.append(-(yy * math.log(pc) + (1.0 - yy) * math.log(1.0 - pc)))
    if not vals:
        return 0.0
    return math.fsum(vals) / len(vals)


def cosine_reference(p: np.ndarray, q: np.ndarray) -> float:
    pv = np.asarray(p, dtype=np.float64).ravel().tolist()
    qv = np.asarray(q, dtype=np.float64).ravel().tolist()
    dot = math.fsum(a * b for a, b in zip(pv, qv))
    na = math.sqrt(math.fsum(a * a for a in pv))
    nb = math.sqrt(math.fsum(b * b for b in qv))
    return 1.0 - dot / (na * nb)


def patch_adv_reference(scores: np.ndarray, flag: int) -> float:
    s = np.asarray(scores, dtype=np.float64)
    n, m, _ = s.shape
    ch = 1 if flag else 0
    total = math.fsum(-math.log(s[i, j, ch]) for i in range(n) for j in range(m))
    return total / (n * m)


def overlay_reference(img: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Per-pixel 50% blend: foreground toward green, uncertain toward yellow."""
    img = np.asarray(img, dtype=np.float64)
    out = img.copy()
    h, w = tri.shape
    green = np.array([0.0, 1.0, 0.0])
    yellow = np.array([1.0, 1.0, 0.0])
    for r in range(h):
        for c in range(w):
            if tri[r, c] == 1.0:
                out[r, c] = 0.5 * img[r, c] + 0.5 * green
            elif tri[r, c] == 0.5:
                out[r, c] = 0.5 * img[r, c] + 0.5 * yellow
    return out


def count_components8(mask: np.ndarray) -> int:
    """8-connected component count via scipy (independent of the library's
    own connectivity code paths)."""
    from scipy import ndimage

    _, n = ndimage.label(np.asarray(mask) != 0, structure=np.ones((3, 3), dtype=int))
    return int(n)


def random_scribble(rng: np.random.Generator, h: int, w: int, n_strokes: int = 3) -> np.ndarray:
    """A few random-walk strokes; guaranteed nonempty, roughly skeleton-like."""
    s = np.zeros((h, w), dtype=np.uint8)
    for _ in range(n_strokes):
        r = int(rng.integers(0, h))
        c = int(rng.integers(0, w))
        for _ in range(int(rng.integers(h, 3 * h))):
            s[r, c] = 1
            r = min(max(r + int(rng.integers(-1, 2)), 0), h - 1)
            c = min(max(c + int(rng.integers(-1, 2)), 0), w - 1)
    return s


def random_blob_mask(rng: np.random.Generator, h: int, w: int, n_blobs: int = 3) -> np.ndarray:
    """Union of random rectangles and disks, for thinning property tests."""
    m = np.zeros((h, w), dtype=np.uint8)
    for _ in range(n_blobs):
        kind = rng.integers(0, 2)
        r = int(rng.integers(0, h))
        c = int(rng.integers(0, w))
        if kind == 0:
            rh = int(rng.integers(2, max(3, h // 3)))
            rw = int(rng.integers(2, max(3, w // 3)))
            m[max(0, r - rh // 2) : min(h, r + rh // 2 + 1), max(0, c - rw // 2) : min(w, c + rw // 2 + 1)] = 1
        else:
            rad = float(rng.uniform(1.5, min(h, w) / 5.0))
            rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
            m[(rr - r) ** 2 + (cc - c) ** 2 <= rad**2] = 1
    return m
