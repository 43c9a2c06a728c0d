"""Scribble generation: mask thinning, keypoint detection, stride sampling.

Scribbles are 1-pixel-wide skeletons of road masks. Keypoints (endpoints and
intersections) plus stride-sampled representative points become the foreground
seeds for label expansion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import validate_mask

# 8-neighborhood in row-major scan order, used wherever a deterministic
# direction order matters (branch walking).
_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def _neighbour_planes(padded: np.ndarray):
    """The eight neighbour planes of the unpadded region, in the classic
    clockwise order starting from north: P2, P3, ..., P9."""
    a = padded
    p2 = a[:-2, 1:-1]
    p3 = a[:-2, 2:]
    p4 = a[1:-1, 2:]
    p5 = a[2:, 2:]
    p6 = a[2:, 1:-1]
    p7 = a[2:, :-2]
    p8 = a[1:-1, :-2]
    p9 = a[:-2, :-2]
    return p2, p3, p4, p5, p6, p7, p8, p9


def _candidates(padded: np.ndarray, phase: int) -> np.ndarray:
    """Deletable pixels per the two-subiteration thinning rule, evaluated in
    parallel on the current image. Returned in unpadded coordinates."""
    a = padded.astype(np.uint8)
    ring = _neighbour_planes(a)
    p2, p3, p4, p5, p6, p7, p8, p9 = ring
    n = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9
    seq = ring + (p2,)
    trans = np.zeros_like(n)
    for k in range(8):
        trans += (seq[k] == 0) & (seq[k + 1] == 1)
    cond = (a[1:-1, 1:-1] == 1) & (n >= 2) & (n <= 6) & (trans == 1)
    if phase == 0:
        cond &= (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
    else:
        cond &= (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
    return cond


def _deletable_at(padded: np.ndarray, r: int, c: int, phase: int) -> bool:
    """Scalar recheck of the same rule against the partially updated image."""
    if not padded[r, c]:
        return False
    p2 = int(padded[r - 1, c])
    p3 = int(padded[r - 1, c + 1])
    p4 = int(padded[r, c + 1])
    p5 = int(padded[r + 1, c + 1])
    p6 = int(padded[r + 1, c])
    p7 = int(padded[r + 1, c - 1])
    p8 = int(padded[r, c - 1])
    p9 = int(padded[r - 1, c - 1])
    seq = (p2, p3, p4, p5, p6, p7, p8, p9, p2)
    n = sum(seq[:8])
    if n < 2 or n > 6:
        return False
    trans = sum(1 for k in range(8) if seq[k] == 0 and seq[k + 1] == 1)
    if trans != 1:
        return False
    if phase == 0:
        return p2 * p4 * p6 == 0 and p4 * p6 * p8 == 0
    return p2 * p4 * p8 == 0 and p2 * p6 * p8 == 0


def skeletonize(mask: np.ndarray) -> np.ndarray:
    """Thin a binary mask to a 1-pixel-wide skeleton.

    Two-subiteration iterative thinning with 8-connectivity, run to fixpoint
    (hence idempotent). Deletions found in parallel are applied one at a time
    in raster order with a recheck: the fully parallel update can erase an
    isolated 2x2 block outright, which would drop a connected component.
    """
    m = validate_mask(mask)
    out = np.zeros_like(m)
    if not m.any():
        return out
    img = np.pad(m.astype(bool), 1)
    while True:
        changed = False
        for phase in (0, 1):
            cand = _candidates(img, phase)
            if not cand.any():
                continue
            for r, c in np.argwhere(cand):
                if _deletable_at(img, r + 1, c + 1, phase):
                    img[r + 1, c + 1] = False
                    changed = True
        if not changed:
            break
    out[img[1:-1, 1:-1]] = 1
    return out


def neighbor_counts(s: np.ndarray) -> np.ndarray:
    """8-neighbor count on the skeleton, per skeleton pixel (0 elsewhere)."""
    a = np.pad(np.asarray(s, dtype=np.uint8), 1)
    planes = _neighbour_planes(a)
    total = np.zeros(s.shape, dtype=np.int32)
    for p in planes:
        total += p
    total[np.asarray(s) == 0] = 0
    return total


@dataclass
class KeyPointSet:
    """Skeleton endpoints (one neighbor) and intersections (three or more)."""

    intersections: list[tuple[int, int]]
    endpoints: list[tuple[int, int]]

    def all_points(self) -> list[tuple[int, int]]:
        return self.endpoints + self.intersections


def detect_keypoints(s: np.ndarray) -> KeyPointSet:
    s = validate_mask(s)
    counts = neighbor_counts(s)
    on = s == 1
    ends = [(int(r), int(c)) for r, c in np.argwhere(on & (counts == 1))]
    inter = [(int(r), int(c)) for r, c in np.argwhere(on & (counts >= 3))]
    return KeyPointSet(intersections=inter, endpoints=ends)


def sample_representative(s: np.ndarray, q: int) -> list[tuple[int, int]]:
    """Stride-sample points along each skeleton branch.

    Branches run between keypoints (endpoints / intersections) through
    degree-2 pixels; each is walked once, starting at its keypoint end, and a
    point is emitted every q pixels of arc position (position 0 included).
    Branches are enumerated in row-major order of their starting pixel;
    closed loops with no keypoint start at their row-major first pixel.
    """
    if q < 1:
        raise ValueError(f"stride q must be >= 1, got {q}")
    s = validate_mask(s)
    if not s.any():
        return []
    h, w = s.shape
    counts = neighbor_counts(s)
    is_node = (s == 1) & (counts != 2)

    def neighbours(r: int, c: int):
        for dr, dc in _OFFSETS:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and s[rr, cc]:
                yield rr, cc

    emitted: list[tuple[int, int]] = []
    seen_edges: set[tuple[tuple[int, int], tuple[int, int]]] = set()
    consumed = np.zeros_like(s, dtype=bool)

    def walk(start: tuple[int, int], first: tuple[int, int]) -> None:
        emitted.append(start)
        seen_edges.add((start, first))
        prev, cur = start, first
        pos = 1
        while True:
            if pos % q == 0:
                emitted.append(cur)
            if is_node[cur]:
                seen_edges.add((cur, prev))
                return
            consumed[cur] = True
            nxt = None
            for cand in neighbours(*cur):
                if cand != prev:
                    nxt = cand
                    break
            if nxt is None:  # dead end inside a walk; defensive
                return
            prev, cur = cur, nxt
            pos += 1

    for r, c in np.argwhere(is_node):
        node = (int(r), int(c))
        nbrs = list(neighbours(*node))
        if not nbrs:  # isolated pixel: a branch of length zero
            emitted.append(node)
            continue
        for nb in nbrs:
            if (node, nb) in seen_edges:
                continue
            walk(node, nb)

    # remaining degree-2 pixels form closed loops; start each at its
    # row-major first pixel and walk in fixed direction order
    remaining = (s == 1) & (counts == 2) & ~consumed & ~is_node
    for r, c in np.argwhere(remaining):
        start = (int(r), int(c))
        if consumed[start]:
            continue
        consumed[start] = True
        emitted.append(start)
        first = next(iter(neighbours(*start)))
        prev, cur = start, first
        pos = 1
        while cur != start:
            if pos % q == 0:
                emitted.append(cur)
            consumed[cur] = True
            nxt = None
            for cand in neighbours(*cur):
                if cand != prev:
                    nxt = cand
                    break
            if nxt is None:
                break
            prev, cur = cur, nxt
            pos += 1

    unique: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for pt in emitted:
        if pt not in seen:
            seen.add(pt)
            unique.append(pt)
    return unique
