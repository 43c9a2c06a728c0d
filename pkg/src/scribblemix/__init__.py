"""scribblemix: weak-supervision data pipeline for scribble-labeled road
extraction — tri-state label expansion, structure-aware sample mixing, a
regularized loss suite with verifiable gradients, metrics, and a synthetic
scene generator, all behind a deterministic CLI."""

__version__ = "0.1.0"

from .core import (
    FormatError,
    NumericError,
    nonbackground_mask,
    tri_decode,
    tri_encode,
)
from .expansion import (
    ExpansionConfig,
    ExpansionResult,
    SeedSet,
    collect_seeds,
    compute_stride,
    distance_transform,
    expand_scribble,
    merge_labels,
    sample_background_seeds,
    statistic_expand,
)
from .graphcut import SeedError, graph_cut, min_cut
from .losses import (
    LossReport,
    LossWeights,
    apply_topology_filter,
    cosine_loss,
    invariance_loss,
    partial_bce,
    patch_adv_loss,
    seg_loss,
    topology_filter,
    total_loss,
)
from .metrics import MetricAccumulator, binarize, confusion, evaluate
from .mixing import (
    ColorHistogram,
    MixConfig,
    MixedPair,
    color_gate,
    hsv_histogram,
    kl_divergence,
    make_mixed_pair,
    mix_images,
    mix_labels,
    mix_predictions,
)
from .scribbles import KeyPointSet, detect_keypoints, sample_representative, skeletonize
from .slic import SuperpixelMap, slic
from .synth import SceneSpec, gen_dataset, gen_scene, sample_paths
from .viz import render_overlay

__all__ = [
    "FormatError",
    "NumericError",
    "nonbackground_mask",
    "tri_decode",
    "tri_encode",
    "ExpansionConfig",
    "ExpansionResult",
    "SeedSet",
    "collect_seeds",
    "compute_stride",
    "distance_transform",
    "expand_scribble",
    "merge_labels",
    "sample_background_seeds",
    "statistic_expand",
    "SeedError",
    "graph_cut",
    "min_cut",
    "LossReport",
    "LossWeights",
    "apply_topology_filter",
    "cosine_loss",
    "invariance_loss",
    "partial_bce",
    "patch_adv_loss",
    "seg_loss",
    "topology_filter",
    "total_loss",
    "MetricAccumulator",
    "binarize",
    "confusion",
    "evaluate",
    "ColorHistogram",
    "MixConfig",
    "MixedPair",
    "color_gate",
    "hsv_histogram",
    "kl_divergence",
    "make_mixed_pair",
    "mix_images",
    "mix_labels",
    "mix_predictions",
    "KeyPointSet",
    "detect_keypoints",
    "sample_representative",
    "skeletonize",
    "SuperpixelMap",
    "slic",
    "SceneSpec",
    "gen_dataset",
    "gen_scene",
    "sample_paths",
    "render_overlay",
]

