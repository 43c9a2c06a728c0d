"""Evaluation metrics over binarized predictions: IoU, F1, precision, recall.

Dataset aggregation is micro-averaged: confusion counts accumulate first,
ratios come last. Degenerate denominators yield 0.0 and are flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import validate_mask, validate_prediction


def binarize(p: np.ndarray, tau: float = 0.5) -> np.ndarray:
    """Threshold a prediction map at tau; ties (p == tau) count as positive."""
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    p = validate_prediction(p)
    return (p >= tau).astype(np.uint8)


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def add(self, other: "ConfusionCounts") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn
        self.tn += other.tn

    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass
class MetricReport:
    iou: float
    f1: float
    precision: float
    recall: float
    counts: ConfusionCounts
    degenerate: list[str] = field(default_factory=list)


def confusion(pred: np.ndarray, gt: np.ndarray) -> ConfusionCounts:
    pred = validate_mask(pred)
    gt = validate_mask(gt)
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    p = pred.astype(bool)
    g = gt.astype(bool)
    return ConfusionCounts(
        tp=int(np.count_nonzero(p & g)),
        fp=int(np.count_nonzero(p & ~g)),
        fn=int(np.count_nonzero(~p & g)),
        tn=int(np.count_nonzero(~p & ~g)),
    )


def report_from_counts(c: ConfusionCounts) -> MetricReport:
    degenerate: list[str] = []
    if c.tp + c.fp > 0:
        precision = c.tp / (c.tp + c.fp)
    else:
        precision = 0.0
        degenerate.append("precision")
    if c.tp + c.fn > 0:
        recall = c.tp / (c.tp + c.fn)
    else:
        recall = 0.0
        degenerate.append("recall")
    if precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        degenerate.append("f1")
    if c.tp + c.fp + c.fn > 0:
        iou = c.tp / (c.tp + c.fp + c.fn)
    else:
        iou = 0.0
        degenerate.append("iou")
    return MetricReport(
        iou=iou, f1=f1, precision=precision, recall=recall, counts=c, degenerate=degenerate
    )


def evaluate(pred: np.ndarray, gt: np.ndarray) -> MetricReport:
    """Metrics for one mask pair."""
    return report_from_counts(confusion(pred, gt))


class MetricAccumulator:
    """Micro-average accumulator: counts add across images, ratios are
    computed once at reporting time."""

    def __init__(self) -> None:
        self.counts = ConfusionCounts()
        self.n_images = 0

    def update(self, pred: np.ndarray, gt: np.ndarray) -> ConfusionCounts:
        c = confusion(pred, gt)
        self.counts.add(c)
        self.n_images += 1
        return c

    def report(self) -> MetricReport:
        return report_from_counts(self.counts)

    def reset(self) -> None:
        self.counts = ConfusionCounts()
        self.n_images = 0
