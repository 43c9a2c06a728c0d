"""Deterministic synthetic road scenes for end-to-end validation.

Roads are Catmull-Rom splines through random waypoints, rasterized with a
round brush of constant per-road width; the mask is the exact union of those
strokes (no anti-aliasing). Distractor strokes look like roads but never
enter the mask. All randomness comes from a named portable generator (PCG64)
seeded from the spec, so identical specs give bitwise identical scenes.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

RNG_NAME = "pcg64"
_TEXTURES = ("flat", "noise", "blotches")

# dense spline sampling step, pixels; stamping at this spacing keeps the
# stroke boundary within a small fraction of a pixel of the ideal swept disk
_SAMPLE_STEP = 0.25


@dataclass(frozen=True)
class SceneSpec:
    seed: int = 0
    size: tuple[int, int] = (256, 256)
    n_roads: int = 3
    width_range: tuple[float, float] = (3.0, 8.0)
    curvature: float = 0.35
    bg_texture: str = "noise"
    distractors: int = 0

    def validate(self) -> "SceneSpec":
        h, w = self.size
        if h < 8 or w < 8:
            raise ValueError(f"degenerate scene size {self.size}")
        lo, hi = self.width_range
        if not (1.0 <= lo <= hi <= min(h, w) / 4.0):
            raise ValueError(
                f"width_range {self.width_range} must sit within [1, {min(h, w) / 4.0}]"
            )
        if self.n_roads < 1:
            raise ValueError("n_roads must be >= 1")
        if self.bg_texture not in _TEXTURES:
            raise ValueError(f"bg_texture must be one of {_TEXTURES}")
        if self.distractors < 0:
            raise ValueError("distractors must be >= 0")
        if self.curvature < 0:
            raise ValueError("curvature must be >= 0")
        return self


class RoadPath(NamedTuple):
    points: np.ndarray  # dense M x 2 float64 (row, col)
    width: float
    distractor: bool

    @property
    def arc_length(self) -> float:
        d = np.diff(self.points, axis=0)
        return float(np.sqrt((d**2).sum(axis=1)).sum())


def _catmull_rom(way: np.ndarray) -> np.ndarray:
    """Dense centripetal-free (uniform) Catmull-Rom curve through waypoints."""
    ext = np.vstack([2 * way[0] - way[1], way, 2 * way[-1] - way[-2]])
    pieces = []
    for i in range(len(way) - 1):
        p0, p1, p2, p3 = ext[i], ext[i + 1], ext[i + 2], ext[i + 3]
        seg_len = float(np.linalg.norm(p2 - p1))
        n = max(int(math.ceil(seg_len / _SAMPLE_STEP)), 2)
        t = np.linspace(0.0, 1.0, n, endpoint=False)[:, None]
        t2, t3 = t * t, t * t * t
        pt = 0.5 * (
            (2 * p1)
            + (-p0 + p2) * t
            + (2 * p0 - 5 * p1 + 4 * p2 - p3) * t2
            + (-p0 + 3 * p1 - 3 * p2 + p3) * t3
        )
        pieces.append(pt)
    pieces.append(way[-1][None, :])
    return np.vstack(pieces)


def _sample_waypoints(rng: np.random.Generator, spec: SceneSpec, width: float) -> np.ndarray:
    h, w = spec.size
    margin = max(4.0, 1.5 * width)
    n_way = int(rng.integers(4, 7))
    # march across the frame from a random edge point with a random heading,
    # jittering perpendicular to the heading for curvature
    start = np.array(
        [rng.uniform(margin, h - margin), rng.uniform(margin, w - margin)]
    )
    theta = rng.uniform(0.0, 2.0 * math.pi)
    heading = np.array([math.sin(theta), math.cos(theta)])
    perp = np.array([-heading[1], heading[0]])
    step = 0.9 * min(h, w) / (n_way - 1)
    pts = [start]
    for _ in range(n_way - 1):
        jitter = rng.normal(0.0, spec.curvature * step)
        nxt = pts[-1] + heading * step + perp * jitter
        pts.append(nxt)
    way = np.clip(np.array(pts), margin, [h - margin, w - margin])
    return way


def _draw_paths(rng: np.random.Generator, spec: SceneSpec) -> list[RoadPath]:
    lo, hi = spec.width_range
    paths: list[RoadPath] = []
    for _ in range(spec.n_roads):
        width = float(rng.uniform(lo, hi))
        way = _sample_waypoints(rng, spec, width)
        paths.append(RoadPath(points=_catmull_rom(way), width=width, distractor=False))
    for _ in range(spec.distractors):
        width = float(rng.uniform(lo, hi))
        way = _sample_waypoints(rng, spec, width)
        paths.append(RoadPath(points=_catmull_rom(way), width=width, distractor=True))
    return paths


def sample_paths(spec: SceneSpec) -> list[RoadPath]:
    """The scene's road and distractor centerlines, in generation order.

    Road draws come before distractor draws, so two specs differing only in
    `distractors` produce identical road layouts (and identical masks).
    Uses the same seeded stream as gen_scene, so these are exactly the
    centerlines the rendered scene contains.
    """
    spec.validate()
    return _draw_paths(np.random.Generator(np.random.PCG64(spec.seed)), spec)


def _stamp_stroke(canvas: np.ndarray, path: RoadPath) -> None:
    """Union a round-brush sweep of the path into a boolean canvas; pixel
    (r, c) is covered iff its center lies within width/2 of a path sample."""
    h, w = canvas.shape
    radius = path.width / 2.0
    rad_i = int(math.ceil(radius))
    r2 = radius * radius
    for pr, pc in path.points:
        r0 = max(int(math.floor(pr)) - rad_i, 0)
        r1 = min(int(math.floor(pr)) + rad_i + 2, h)
        c0 = max(int(math.floor(pc)) - rad_i, 0)
        c1 = min(int(math.floor(pc)) + rad_i + 2, w)
        if r0 >= r1 or c0 >= c1:
            continue
        rr = np.arange(r0, r1, dtype=np.float64)[:, None]
        cc = np.arange(c0, c1, dtype=np.float64)[None, :]
        canvas[r0:r1, c0:c1] |= (rr - pr) ** 2 + (cc - pc) ** 2 <= r2


def _background(rng: np.random.Generator, spec: SceneSpec) -> np.ndarray:
    h, w = spec.size
    base = rng.uniform(0.55, 0.8, size=3)
    img = np.broadcast_to(base, (h, w, 3)).copy()
    if spec.bg_texture == "noise":
        img += rng.uniform(-0.08, 0.08, size=(h, w, 1))
    elif spec.bg_texture == "blotches":
        rr = np.arange(h)[:, None]
        cc = np.arange(w)[None, :]
        for _ in range(6):
            cy, cx = rng.uniform(0, h), rng.uniform(0, w)
            ay = rng.uniform(h / 12, h / 4)
            ax = rng.uniform(w / 12, w / 4)
            amp = rng.uniform(-0.12, 0.12)
            bump = amp * np.exp(-(((rr - cy) / ay) ** 2 + ((cc - cx) / ax) ** 2))
            img += bump[..., None]
    return np.clip(img, 0.0, 1.0)


def gen_scene(spec: SceneSpec) -> tuple[np.ndarray, np.ndarray]:
    """Render one scene: (RGB image in [0,1], binary road mask)."""
    spec.validate()
    h, w = spec.size
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    paths = _draw_paths(rng, spec)
    img = _background(rng, spec)
    mask = np.zeros((h, w), dtype=bool)
    for path in paths:
        stroke = np.zeros((h, w), dtype=bool)
        _stamp_stroke(stroke, path)
        gray = rng.uniform(0.3, 0.55)
        tint = rng.uniform(-0.03, 0.03, size=3)
        color = np.clip(gray + tint, 0.0, 1.0)
        img[stroke] = color
        if not path.distractor:
            mask |= stroke
    img = np.clip(img, 0.0, 1.0)
    return img, mask.astype(np.uint8)


def gen_dataset(
    template: SceneSpec, count: int, seed: int, out_dir: str | Path
) -> dict:
    """Write (image, mask, scribble) triples plus a manifest; item i uses
    seed + i so each triple is independently reproducible."""
    from .io import save_image, save_mask, atomic_write_bytes
    from .scribbles import skeletonize

    if count < 1:
        raise ValueError("count must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    items = []
    for i in range(count):
        spec = replace(template, seed=seed + i)
        img, mask = gen_scene(spec)
        scrib = skeletonize(mask)
        stem = f"scene_{i:03d}"
        save_image(out / f"{stem}.png", img)
        save_mask(out / f"{stem}_mask.png", mask)
        save_mask(out / f"{stem}_scribble.png", scrib)
        d = asdict(spec)
        d["size"] = list(spec.size)
        d["width_range"] = list(spec.width_range)
        items.append(
            {
                "id": stem,
                "spec": d,
                "image": f"{stem}.png",
                "mask": f"{stem}_mask.png",
                "scribble": f"{stem}_scribble.png",
            }
        )
    manifest = {"rng": RNG_NAME, "base_seed": seed, "count": count, "items": items}
    atomic_write_bytes(out / "manifest.json", json.dumps(manifest, indent=2).encode())
    return manifest
