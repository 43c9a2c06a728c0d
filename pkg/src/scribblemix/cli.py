"""Command-line surface.

Subcommands:

    make-scribbles  skeletonize binary road masks into scribble PNGs
    expand          tri-state pseudo-label expansion for image+scribble pairs
    mix             structure-aware mixed pairs behind the color gate
    loss-eval       full loss report (plus optional gradient dump) for a pair
    metrics         micro-averaged IoU / F1 / precision / recall
    synth           deterministic synthetic road scenes
    overlay         qualitative label overlays
    selftest        built-in oracle checks

Every run writes a run.json next to its outputs capturing the resolved
config, seeds, input hashes and tool version; repeating the invocation
reproduces all outputs bit-exactly.

Exit codes: 0 success, 2 usage error, 3 data/format error, 4 numeric error.

The SCRIBBLEMIX_CONFIG environment variable supplies a default --config path.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import PipelineConfig, load_config
from .core import FormatError, NumericError
from .expansion import expand_scribble
from .io import (
    atomic_write_bytes,
    load_image,
    load_mask,
    load_tri,
    read_tensor,
    save_image,
    save_mask,
    save_tri,
    sha256_file,
    write_tensor,
)
from .losses import (
    LossWeights,
    invariance_loss,
    partial_bce,
    patch_adv_loss,
    seg_loss,
    total_loss,
)
from .metrics import MetricAccumulator, binarize
from .mixing import make_mixed_pair, mix_predictions
from .scribbles import skeletonize
from .synth import SceneSpec, gen_dataset
from .viz import render_overlay

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

# derived-output name tags; a plain scene image carries none of these
_DERIVED_TAGS = ("_mask", "_scribble", "_ys", "_yc", "_y", "_overlay")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# small shared helpers


def _write_json(path: Path, doc: dict) -> None:
    atomic_write_bytes(path, (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode())


def _read_json(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON ({e})") from None


def _resolve_config(path_arg: str | None) -> tuple[PipelineConfig, str | None]:
    path = path_arg or os.environ.get("SCRIBBLEMIX_CONFIG")
    if path:
        return load_config(path), path
    return PipelineConfig().validate(), None


def _pngs(d: Path) -> list[Path]:
    if not d.is_dir():
        raise NotADirectoryError(f"not a directory: {d}")
    return sorted(p for p in d.iterdir() if p.suffix == ".png")


def _tagged_pngs(d: Path, tag: str) -> list[Path]:
    """Files `*<tag>.png` when the directory mixes roles, else every PNG."""
    files = _pngs(d)
    tagged = [p for p in files if p.stem.endswith(tag)]
    return tagged if tagged else files


def _image_pngs(d: Path) -> list[Path]:
    """PNGs that are not derived outputs (masks, scribbles, labels...)."""
    files = _pngs(d)
    plain = [p for p in files if not p.stem.endswith(_DERIVED_TAGS)]
    return plain if plain else files


def _strip_tag(stem: str, tag: str) -> str:
    return stem[: -len(tag)] if stem.endswith(tag) else stem


def _find_file(d: Path, stem: str, candidates: tuple[str, ...]) -> Path:
    for name in candidates:
        p = d / name
        if p.exists():
            return p
    raise FileNotFoundError(f"no file for '{stem}' in {d} (tried {', '.join(candidates)})")


def _find_label(d: Path, stem: str) -> Path:
    return _find_file(d, stem, (f"{stem}_y.png", f"{stem}.png"))


def _find_gt(d: Path, stem: str) -> Path:
    return _find_file(d, stem, (f"{stem}_mask.png", f"{stem}.png"))


def _write_run(
    out_dir: Path,
    command: str,
    args_echo: dict,
    config: dict | None,
    seeds: dict,
    inputs: dict[str, str],
    outputs: list[str],
) -> None:
    _write_json(
        out_dir / "run.json",
        {
            "tool": "scribblemix",
            "version": __version__,
            "command": command,
            "args": args_echo,
            "config": config,
            "seeds": seeds,
            "inputs": inputs,
            "outputs": sorted(outputs),
        },
    )


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_make_scribbles(args) -> int:
    masks = Path(args.masks)
    out = _out_dir(args.out)
    files = _tagged_pngs(masks, "_mask")
    if not files:
        raise FileNotFoundError(f"no PNG files in {masks}")
    inputs: dict[str, str] = {}
    outputs: list[str] = []
    for f in files:
        sk = skeletonize(load_mask(f))
        name = f"{_strip_tag(f.stem, '_mask')}_scribble.png"
        save_tri(out / name, sk.astype(np.float64))
        inputs[str(f)] = sha256_file(f)
        outputs.append(name)
    _write_run(out, "make-scribbles", {"masks": args.masks, "out": args.out}, None, {}, inputs, outputs)
    return EXIT_OK


def cmd_expand(args) -> int:
    cfg, cfg_path = _resolve_config(args.config)
    images = Path(args.images)
    out = _out_dir(args.out)
    sfiles = _tagged_pngs(Path(args.scribbles), "_scribble")
    if not sfiles:
        raise FileNotFoundError(f"no PNG files in {args.scribbles}")
    inputs: dict[str, str] = {}
    outputs: list[str] = []
    for sf in sfiles:
        stem = _strip_tag(sf.stem, "_scribble")
        imgf = images / f"{stem}.png"
        if not imgf.exists():
            raise FileNotFoundError(f"no image {imgf} for scribble {sf.name}")
        res = expand_scribble(load_image(imgf), load_mask(sf), cfg.expansion)
        save_tri(out / f"{stem}_ys.png", res.y_s)
        save_tri(out / f"{stem}_yc.png", res.y_c)
        save_tri(out / f"{stem}_y.png", res.y)
        _write_json(out / f"{stem}_expand.json", {"id": stem, **res.stats})
        inputs[str(imgf)] = sha256_file(imgf)
        inputs[str(sf)] = sha256_file(sf)
        outputs += [f"{stem}_ys.png", f"{stem}_yc.png", f"{stem}_y.png", f"{stem}_expand.json"]
    echo = {"images": args.images, "scribbles": args.scribbles, "out": args.out, "config": cfg_path}
    _write_run(out, "expand", echo, cfg.to_dict(), {}, inputs, outputs)
    return EXIT_OK


def _resolve_pairs(spec: str, stems: list[str], seeds: dict) -> list[tuple[str, str]]:
    if spec.startswith("random:"):
        try:
            seed = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"--pairs random:SEED needs an integer seed, got {spec!r}") from None
        seeds["pair_seed"] = seed
        rng = np.random.Generator(np.random.PCG64(seed))
        order = rng.permutation(len(stems))
        return [
            (stems[order[i]], stems[order[i + 1]]) for i in range(0, len(stems) - 1, 2)
        ]
    doc = _read_json(Path(spec))
    if not isinstance(doc, list):
        raise FormatError(f"{spec}: pairs file must be a JSON list of [a, b] pairs")
    pairs = []
    for item in doc:
        if not (isinstance(item, list) and len(item) == 2):
            raise FormatError(f"{spec}: each pair must be a 2-element list, got {item!r}")
        pairs.append((str(item[0]), str(item[1])))
    return pairs


def cmd_mix(args) -> int:
    cfg, cfg_path = _resolve_config(args.config)
    images = Path(args.images)
    labels = Path(args.labels)
    out = _out_dir(args.out)
    stems = [f.stem for f in _image_pngs(images)]
    if not stems:
        raise FileNotFoundError(f"no PNG images in {images}")
    seeds: dict = {}
    pairs = _resolve_pairs(args.pairs, stems, seeds)
    inputs: dict[str, str] = {}
    outputs: list[str] = []
    for a, b in pairs:
        fx1, fx2 = images / f"{a}.png", images / f"{b}.png"
        fy1, fy2 = _find_label(labels, a), _find_label(labels, b)
        for f in (fx1, fx2, fy1, fy2):
            if not f.exists():
                raise FileNotFoundError(f"missing input {f}")
            inputs[str(f)] = sha256_file(f)
        mp = make_mixed_pair(load_image(fx1), load_image(fx2), load_tri(fy1), load_tri(fy2), cfg.mix)
        pdir = out / f"{a}__{b}"
        pdir.mkdir(parents=True, exist_ok=True)
        save_image(pdir / "x_m_12.png", mp.x_m_12)
        save_image(pdir / "x_m_21.png", mp.x_m_21)
        save_tri(pdir / "y_m_12.png", mp.y_m_12)
        save_tri(pdir / "y_m_21.png", mp.y_m_21)
        _write_json(pdir / "pair.json", {"a": a, "b": b, "gate": mp.gate, "kl_value": mp.kl_value})
        outputs += [f"{a}__{b}/{n}" for n in ("x_m_12.png", "x_m_21.png", "y_m_12.png", "y_m_21.png", "pair.json")]
    echo = {
        "images": args.images,
        "labels": args.labels,
        "pairs": args.pairs,
        "out": args.out,
        "config": cfg_path,
    }
    _write_run(out, "mix", echo, cfg.to_dict(), seeds, inputs, outputs)
    return EXIT_OK


def _parse_weights(spec: str) -> LossWeights:
    vals = {}
    for part in spec.split(","):
        key, _, raw = part.partition("=")
        key = key.strip()
        if key not in ("l1", "l2") or not raw:
            raise UsageError(f"--weights must look like 'l1=0.1,l2=0.1', got {spec!r}")
        try:
            vals[key] = float(raw)
        except ValueError:
            raise UsageError(f"--weights value for {key} is not a number: {raw!r}") from None
    return LossWeights(
        lambda1=vals.get("l1", LossWeights().lambda1),
        lambda2=vals.get("l2", LossWeights().lambda2),
    ).validate()


_PRED_NAMES = ("p1.rtb", "p2.rtb", "p_m_12.rtb", "p_m_21.rtb")


def cmd_loss_eval(args) -> int:
    cfg, cfg_path = _resolve_config(args.config)
    weights = _parse_weights(args.weights) if args.weights else cfg.loss_weights
    if len(args.pred) == 1 and Path(args.pred[0]).is_dir():
        pred_files = [Path(args.pred[0]) / n for n in _PRED_NAMES]
    elif len(args.pred) == 4:
        pred_files = [Path(p) for p in args.pred]
    else:
        raise UsageError("--pred takes one directory or four tensor files (p1 p2 p_m_12 p_m_21)")
    inputs: dict[str, str] = {}
    for f in pred_files:
        if not f.exists():
            raise FileNotFoundError(f"missing prediction tensor {f}")
        inputs[str(f)] = sha256_file(f)
    p1, p2, pm12, pm21 = (read_tensor(f) for f in pred_files)

    mixed = Path(args.mixed)
    pair = _read_json(mixed / "pair.json")
    try:
        a, b, gate = str(pair["a"]), str(pair["b"]), int(pair["gate"])
        kl_value = float(pair.get("kl_value", float("nan")))
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{mixed / 'pair.json'}: bad pair manifest ({e})") from None
    labels = Path(args.labels)
    fy1, fy2 = _find_label(labels, a), _find_label(labels, b)
    fym12, fym21 = mixed / "y_m_12.png", mixed / "y_m_21.png"
    for f in (fy1, fy2, fym12, fym21, mixed / "pair.json"):
        if not f.exists():
            raise FileNotFoundError(f"missing input {f}")
        inputs[str(f)] = sha256_file(f)
    y1, y2 = load_tri(fy1), load_tri(fy2)
    ym12, ym21 = load_tri(fym12), load_tri(fym21)

    bce1, bce2 = partial_bce(y1, p1), partial_bce(y2, p2)
    bce12, bce21 = partial_bce(ym12, pm12), partial_bce(ym21, pm21)
    l_seg = 0.5 * (bce1.value + bce2.value)
    l_seg_m = 0.5 * (bce12.value + bce21.value)
    pbar12, pbar21 = mix_predictions(p1, p2, y1, y2, gate)
    inv = invariance_loss(pm12, pm21, pbar12, pbar21)

    l_cd = 0.0
    score_grads: dict[str, np.ndarray] = {}
    n_scores = 0
    if args.scores:
        sdir = Path(args.scores)
        flagged: list[tuple[Path, int]] = []
        for f in sorted(sdir.glob("*.rtb")):
            if f.name.endswith(".real.rtb"):
                flagged.append((f, 1))
            elif f.name.endswith(".fake.rtb"):
                flagged.append((f, 0))
            else:
                raise FormatError(f"score file {f.name} must end in .real.rtb or .fake.rtb")
        if not flagged:
            raise FileNotFoundError(f"no *.real.rtb / *.fake.rtb score files in {sdir}")
        n_scores = len(flagged)
        for f, flag in flagged:
            inputs[str(f)] = sha256_file(f)
            r = patch_adv_loss(read_tensor(f), flag)
            l_cd += r.value / n_scores
            score_grads[f.name] = weights.lambda2 * r.grad / n_scores

    report = total_loss(l_seg, l_seg_m, inv.value, l_cd, weights)
    out_path = Path(args.out)
    out_dir = out_path.parent if out_path.parent != Path("") else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = {
        "l_seg": report.l_seg,
        "l_seg_m": report.l_seg_m,
        "l_inv": report.l_inv,
        "l_cd": report.l_cd,
        "total": report.total,
        "weights": {"lambda1": weights.lambda1, "lambda2": weights.lambda2},
        "gate": gate,
        "kl_value": kl_value,
        "pair": {"a": a, "b": b},
        "n_score_maps": n_scores,
        "no_certain": {
            "p1": bce1.no_certain,
            "p2": bce2.no_certain,
            "p_m_12": bce12.no_certain,
            "p_m_21": bce21.no_certain,
        },
    }
    _write_json(out_path, doc)
    outputs = [out_path.name]
    if args.grad_out:
        gdir = _out_dir(args.grad_out)
        # gradients of the weighted total w.r.t. each prediction input;
        # pbar terms vanish by the stop-gradient contract
        grads = {
            "grad_p1.rtb": 0.5 * bce1.grad,
            "grad_p2.rtb": 0.5 * bce2.grad,
            "grad_p_m_12.rtb": 0.5 * bce12.grad + weights.lambda1 * inv.grads["p_m_12"],
            "grad_p_m_21.rtb": 0.5 * bce21.grad + weights.lambda1 * inv.grads["p_m_21"],
        }
        for name, g in score_grads.items():
            grads[f"grad_{name}"] = g
        for name, g in grads.items():
            write_tensor(gdir / name, g)
            outputs.append(f"{args.grad_out}/{name}")
    echo = {
        "pred": list(args.pred),
        "labels": args.labels,
        "mixed": args.mixed,
        "scores": args.scores,
        "grad_out": args.grad_out,
        "weights": args.weights,
        "out": args.out,
        "config": cfg_path,
    }
    _write_run(out_dir, "loss-eval", echo, cfg.to_dict(), {}, inputs, outputs)
    return EXIT_OK


def cmd_metrics(args) -> int:
    cfg, cfg_path = _resolve_config(args.config)
    tau = cfg.tau if args.tau is None else args.tau
    pred_dir = Path(args.pred)
    gt_dir = Path(args.gt)
    if not pred_dir.is_dir():
        raise NotADirectoryError(f"not a directory: {pred_dir}")
    rtbs = sorted(pred_dir.glob("*.rtb"))
    pred_files: list[Path] = rtbs if rtbs else _tagged_pngs(pred_dir, "_y")
    if not pred_files:
        raise FileNotFoundError(f"no prediction files (*.rtb or *.png) in {pred_dir}")
    acc = MetricAccumulator()
    inputs: dict[str, str] = {}
    per_image = {}
    for f in pred_files:
        stem = _strip_tag(f.stem, "_y")
        gtf = _find_gt(gt_dir, stem)
        p = read_tensor(f) if f.suffix == ".rtb" else load_tri(f)
        c = acc.update(binarize(p, tau), load_mask(gtf))
        per_image[stem] = {"tp": c.tp, "fp": c.fp, "fn": c.fn, "tn": c.tn}
        inputs[str(f)] = sha256_file(f)
        inputs[str(gtf)] = sha256_file(gtf)
    rep = acc.report()
    out_path = Path(args.out)
    out_dir = out_path.parent if out_path.parent != Path("") else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(
        out_path,
        {
            "iou": rep.iou,
            "f1": rep.f1,
            "precision": rep.precision,
            "recall": rep.recall,
            "tau": tau,
            "counts": {"tp": rep.counts.tp, "fp": rep.counts.fp, "fn": rep.counts.fn, "tn": rep.counts.tn},
            "degenerate": rep.degenerate,
            "n_images": acc.n_images,
            "per_image": per_image,
        },
    )
    echo = {"pred": args.pred, "gt": args.gt, "tau": tau, "out": args.out, "config": cfg_path}
    _write_run(out_dir, "metrics", echo, cfg.to_dict(), {}, inputs, [out_path.name])
    return EXIT_OK


def cmd_synth(args) -> int:
    out = _out_dir(args.out)
    spec = SceneSpec(
        seed=args.seed,
        size=(args.size, args.size),
        n_roads=args.roads,
        width_range=(args.width_min, args.width_max),
        curvature=args.curvature,
        bg_texture=args.bg_texture,
        distractors=args.distractors,
    ).validate()
    manifest = gen_dataset(spec, args.count, args.seed, out)
    outputs = ["manifest.json"]
    for item in manifest["items"]:
        outputs += [item["image"], item["mask"], item["scribble"]]
    echo = {
        "count": args.count,
        "seed": args.seed,
        "size": args.size,
        "roads": args.roads,
        "width_min": args.width_min,
        "width_max": args.width_max,
        "curvature": args.curvature,
        "bg_texture": args.bg_texture,
        "distractors": args.distractors,
        "out": args.out,
    }
    _write_run(out, "synth", echo, None, {"base_seed": args.seed}, {}, outputs)
    return EXIT_OK


def cmd_overlay(args) -> int:
    images = Path(args.images)
    out = _out_dir(args.out)
    lfiles = _tagged_pngs(Path(args.labels), "_y")
    if not lfiles:
        raise FileNotFoundError(f"no PNG labels in {args.labels}")
    inputs: dict[str, str] = {}
    outputs: list[str] = []
    for lf in lfiles:
        stem = _strip_tag(_strip_tag(lf.stem, "_y"), "_mask")
        imgf = images / f"{stem}.png"
        if not imgf.exists():
            raise FileNotFoundError(f"no image {imgf} for label {lf.name}")
        over = render_overlay(load_image(imgf), load_tri(lf))
        name = f"{stem}_overlay.png"
        save_image(out / name, over)
        inputs[str(imgf)] = sha256_file(imgf)
        inputs[str(lf)] = sha256_file(lf)
        outputs.append(name)
    _write_run(out, "overlay", {"images": args.images, "labels": args.labels, "out": args.out}, None, {}, inputs, outputs)
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest: quick oracle checks, one line per check


def _selftest_checks():
    from . import expansion, graphcut, mixing
    from .core import tri_decode, tri_encode

    rng = np.random.Generator(np.random.PCG64(7))

    def tensor_roundtrip():
        import tempfile

        arr = rng.random((3, 5, 2)).astype(np.float32).astype(np.float64)
        with tempfile.TemporaryDirectory() as d:
            write_tensor(Path(d) / "t.rtb", arr)
            back = read_tensor(Path(d) / "t.rtb")
        return np.array_equal(arr.astype(np.float32), back.astype(np.float32))

    def tri_roundtrip():
        y = rng.choice([0.0, 0.5, 1.0], size=(9, 9))
        return np.array_equal(tri_decode(tri_encode(y)), y)

    def distance_brute():
        s = np.zeros((12, 12), dtype=np.uint8)
        s[3, 4] = s[9, 2] = s[5, 10] = 1
        dis = expansion.distance_transform(s)
        pts = np.argwhere(s == 1)
        for r in range(12):
            for c in range(12):
                best = min(np.hypot(r - p[0], c - p[1]) for p in pts)
                if abs(dis[r, c] - best) > 1e-9:
                    return False
        return True

    def merge_table():
        y_s = np.array([[0.0, 0.0, 0.5], [0.5, 1.0, 1.0]])
        y_c = np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 1.0]])
        want = np.array([[0.5, 0.0, 0.5], [0.5, 1.0, 1.0]])
        return np.array_equal(expansion.merge_labels(y_s, y_c), want)

    def mincut_brute():
        import itertools

        n = 5
        src = rng.integers(0, 8, n) / 4.0
        snk = rng.integers(0, 8, n) / 4.0
        edges = [(i, j, float(rng.integers(1, 8) / 4.0)) for i in range(n) for j in range(i + 1, n)]
        flow, side = graphcut.min_cut(n, src, snk, edges)
        best = min(
            sum(snk[i] for i in range(n) if a[i]) + sum(src[i] for i in range(n) if not a[i])
            + sum(w for i, j, w in edges if a[i] != a[j])
            for a in itertools.product([0, 1], repeat=n)
        )
        return abs(flow - best) < 1e-12

    def kl_hand():
        h1 = mixing.ColorHistogram(np.array([0.5, 0.5]), (2, 1, 1))
        h2 = mixing.ColorHistogram(np.array([0.25, 0.75]), (2, 1, 1))
        want = 0.5 * np.log(2.0) + 0.5 * np.log(2.0 / 3.0)
        return abs(mixing.kl_divergence(h1, h2) - want) < 1e-12

    def bce_fd():
        y = rng.choice([0.0, 0.5, 1.0], size=(6, 6))
        p = rng.uniform(0.05, 0.95, (6, 6))
        res = partial_bce(y, p)
        eps = 1e-6
        for idx in [(0, 0), (2, 3), (5, 5)]:
            pp, pm = p.copy(), p.copy()
            pp[idx] += eps
            pm[idx] -= eps
            fd = (partial_bce(y, pp).value - partial_bce(y, pm).value) / (2 * eps)
            scale = max(1.0, abs(res.grad[idx]))
            if abs(fd - res.grad[idx]) / scale > 1e-4:
                return False
        return True

    def patch_fd():
        raw = rng.uniform(0.2, 0.8, (3, 3))
        s = np.stack([raw, 1.0 - raw], axis=2)
        res = patch_adv_loss(s, 1)
        eps = 5e-7
        sp, sm = s.copy(), s.copy()
        sp[1, 1, 1] += eps
        sm[1, 1, 1] -= eps
        fd = (patch_adv_loss(sp, 1).value - patch_adv_loss(sm, 1).value) / (2 * eps)
        return abs(fd - res.grad[1, 1, 1]) / max(1.0, abs(res.grad[1, 1, 1])) < 1e-4

    def gate_off_bitwise():
        x1, x2 = rng.random((8, 8, 3)), rng.random((8, 8, 3))
        y1 = rng.choice([0.0, 0.5, 1.0], size=(8, 8))
        y2 = rng.choice([0.0, 0.5, 1.0], size=(8, 8))
        from .mixing import mix_images, mix_labels

        m12, m21 = mix_images(x1, x2, y1, y2, 0)
        l12, l21 = mix_labels(y1, y2, 0)
        return (
            np.array_equal(m12, x1)
            and np.array_equal(m21, x2)
            and np.array_equal(l12, y1)
            and np.array_equal(l21, y2)
        )

    def metrics_loop():
        p = rng.integers(0, 2, (16, 16)).astype(np.uint8)
        g = rng.integers(0, 2, (16, 16)).astype(np.uint8)
        from .metrics import evaluate

        rep = evaluate(p, g)
        tp = sum(int(p[r, c] == 1 and g[r, c] == 1) for r in range(16) for c in range(16))
        fp = sum(int(p[r, c] == 1 and g[r, c] == 0) for r in range(16) for c in range(16))
        fn = sum(int(p[r, c] == 0 and g[r, c] == 1) for r in range(16) for c in range(16))
        return rep.counts.tp == tp and rep.counts.fp == fp and rep.counts.fn == fn

    return [
        ("tensor-roundtrip", tensor_roundtrip),
        ("tri-codec-roundtrip", tri_roundtrip),
        ("distance-vs-brute-force", distance_brute),
        ("merge-truth-table", merge_table),
        ("mincut-vs-enumeration", mincut_brute),
        ("kl-hand-value", kl_hand),
        ("bce-gradient-fd", bce_fd),
        ("patch-adv-gradient-fd", patch_fd),
        ("gate-off-bitwise", gate_off_bitwise),
        ("metrics-vs-loop", metrics_loop),
    ]


def cmd_selftest(args) -> int:
    failures = 0
    for name, check in _selftest_checks():
        try:
            ok = check()
        except Exception as e:  # a crash is a failure, keep going
            ok = False
            print(f"FAIL {name} (raised {type(e).__name__}: {e})")
        else:
            print(("ok   " if ok else "FAIL ") + name)
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} selftest check(s) failed")
        return EXIT_NUMERIC
    print("all selftest checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="scribblemix",
        description="Weak-supervision data pipeline for scribble-based road extraction.",
        epilog="Exit codes: 0 ok, 2 usage, 3 data/format error, 4 numeric error.",
    )
    ap.add_argument("--version", action="version", version=f"scribblemix {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-scribbles", help="skeletonize road masks into scribbles")
    p.add_argument("--masks", required=True, help="directory of binary mask PNGs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_scribbles)

    p = sub.add_parser("expand", help="expand scribbles into tri-state pseudo-labels")
    p.add_argument("--images", required=True)
    p.add_argument("--scribbles", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="pipeline config JSON (or $SCRIBBLEMIX_CONFIG)")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("mix", help="build structure-aware mixed pairs")
    p.add_argument("--images", required=True)
    p.add_argument("--labels", required=True, help="directory of tri-label PNGs (<id>_y.png or <id>.png)")
    p.add_argument("--pairs", required=True, help="pairs.json (list of [a,b]) or random:SEED")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("loss-eval", help="evaluate the full loss suite for one mixed pair")
    p.add_argument(
        "--pred",
        required=True,
        nargs="+",
        help="directory holding p1.rtb p2.rtb p_m_12.rtb p_m_21.rtb, or those four files",
    )
    p.add_argument("--labels", required=True)
    p.add_argument("--mixed", required=True, help="one pair directory produced by mix")
    p.add_argument("--scores", default=None, help="directory of *.real.rtb / *.fake.rtb patch scores")
    p.add_argument("--weights", default=None, help="l1=0.1,l2=0.1 (defaults from config)")
    p.add_argument("--grad-out", default=None, help="directory for analytic gradient tensors")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_loss_eval)

    p = sub.add_parser("metrics", help="micro-averaged IoU/F1/precision/recall")
    p.add_argument("--pred", required=True, help="directory of *.rtb prediction maps (or tri-label PNGs)")
    p.add_argument("--gt", required=True, help="directory of ground-truth mask PNGs")
    p.add_argument("--tau", type=float, default=None, help="binarization threshold (default from config)")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("synth", help="generate synthetic road scenes")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--roads", type=int, default=SceneSpec().n_roads)
    p.add_argument("--width-min", type=float, default=SceneSpec().width_range[0])
    p.add_argument("--width-max", type=float, default=SceneSpec().width_range[1])
    p.add_argument("--curvature", type=float, default=SceneSpec().curvature)
    p.add_argument("--bg-texture", choices=("flat", "noise", "blotches"), default=SceneSpec().bg_texture)
    p.add_argument("--distractors", type=int, default=SceneSpec().distractors)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("overlay", help="render label overlays for inspection")
    p.add_argument("--images", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("selftest", help="run built-in oracle checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as e:
        print(f"format error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FileNotFoundError, NotADirectoryError, IsADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
