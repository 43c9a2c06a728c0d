"""Supervision kernels: partial BCE, invariance cosine with stop-gradient,
topology filtering, patch adversarial cross-entropy, and the weighted total.

All kernels are pure numpy on float64 maps, return forward values together
with analytic gradients w.r.t. their prediction inputs, and treat predictions
as probabilities (post-sigmoid), never logits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import NumericError, validate_prediction, validate_trilabel

BCE_EPS = 1e-7
_PATCH_SUM_TOL = 1e-6


@dataclass(frozen=True)
class LossWeights:
    lambda1: float = 0.1
    lambda2: float = 0.1

    def validate(self) -> "LossWeights":
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("loss weights must be >= 0")
        return self


@dataclass
class LossReport:
    l_seg: float
    l_seg_m: float
    l_inv: float
    l_cd: float
    total: float
    grads: dict[str, np.ndarray] = field(default_factory=dict)


class BceResult(NamedTuple):
    value: float
    grad: np.ndarray
    no_certain: bool


def partial_bce(y: np.ndarray, p: np.ndarray) -> BceResult:
    """Binary cross-entropy averaged over certain pixels only.

    Uncertain pixels (y = 0.5) contribute nothing: they are excluded from the
    mean and their gradient entries are exactly zero. Predictions are clamped
    to [eps, 1-eps] before the logs; the gradient is zero where the clamp is
    active (the clamp has zero slope there).
    """
    y = validate_trilabel(y)
    p = validate_prediction(p)
    if y.shape != p.shape:
        raise ValueError(f"shape mismatch: {y.shape} vs {p.shape}")
    grad = np.zeros(p.shape, dtype=np.float64)
    certain = y != 0.5
    m = int(certain.sum())
    if m == 0:
        return BceResult(0.0, grad, True)
    yc = y[certain]
    pc = np.clip(p[certain], BCE_EPS, 1.0 - BCE_EPS)
    value = float(np.mean(-(yc * np.log(pc) + (1.0 - yc) * np.log(1.0 - pc))))
    inner = (p[certain] > BCE_EPS) & (p[certain] < 1.0 - BCE_EPS)
    g = (pc - yc) / (pc * (1.0 - pc)) / m
    g[~inner] = 0.0
    grad[certain] = g
    return BceResult(value, grad, False)


def seg_loss(y1: np.ndarray, y2: np.ndarray, p1: np.ndarray, p2: np.ndarray) -> float:
    """Mean of the two partial BCE terms of an (original or mixed) pair."""
    return 0.5 * (partial_bce(y1, p1).value + partial_bce(y2, p2).value)


class CosineResult(NamedTuple):
    value: float
    grad: np.ndarray


def cosine_loss(p: np.ndarray, q_stopgrad: np.ndarray) -> CosineResult:
    """1 - cos(p, q) over flattened maps; q is a stop-gradient operand, so the
    returned gradient is w.r.t. p only (the q gradient is zero by contract)."""
    pv = np.asarray(p, dtype=np.float64).ravel()
    qv = np.asarray(q_stopgrad, dtype=np.float64).ravel()
    if pv.shape != qv.shape:
        raise ValueError(f"shape mismatch: {pv.shape} vs {qv.shape}")
    np_ = float(np.linalg.norm(pv))
    nq = float(np.linalg.norm(qv))
    if np_ == 0.0 or nq == 0.0:
        raise NumericError("cosine undefined for a zero-norm map")
    dot = float(pv @ qv)
    value = 1.0 - dot / (np_ * nq)
    grad = (dot * pv / np_**2 - qv) / (np_ * nq)
    return CosineResult(value, grad.reshape(np.asarray(p).shape))


class InvarianceResult(NamedTuple):
    value: float
    grads: dict[str, np.ndarray]


def invariance_loss(
    p_m_12: np.ndarray,
    p_m_21: np.ndarray,
    pbar_m_12: np.ndarray,
    pbar_m_21: np.ndarray,
) -> InvarianceResult:
    """Mean of the two direction cosines between mixed-image predictions and
    mixed original predictions; gradients flow only into the p_m inputs."""
    c1 = cosine_loss(p_m_12, pbar_m_12)
    c2 = cosine_loss(p_m_21, pbar_m_21)
    value = 0.5 * (c1.value + c2.value)
    grads = {
        "p_m_12": 0.5 * c1.grad,
        "p_m_21": 0.5 * c2.grad,
        "pbar_m_12": np.zeros_like(np.asarray(pbar_m_12, dtype=np.float64)),
        "pbar_m_21": np.zeros_like(np.asarray(pbar_m_21, dtype=np.float64)),
    }
    return InvarianceResult(value, grads)


def topology_filter(y: np.ndarray) -> np.ndarray:
    """1 where the label is certain (0 or 1), 0 where it is uncertain."""
    y = validate_trilabel(y)
    return (y != 0.5).astype(np.uint8)


def apply_topology_filter(p: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero out the uncertain region of both the prediction and the label
    before they face the discriminator."""
    p = validate_prediction(p)
    y = validate_trilabel(y)
    if p.shape != y.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {y.shape}")
    t = topology_filter(y).astype(np.float64)
    return p * t, y * t


class PatchAdvResult(NamedTuple):
    value: float
    grad: np.ndarray


def patch_adv_loss(scores: np.ndarray, flag: int) -> PatchAdvResult:
    """Cross-entropy of patch scores against the real/fake flag, averaged over
    the patch grid. Channel 0 is the fake class, channel 1 the real class;
    flag=1 means the discriminator saw a pseudo-label (real input)."""
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 3 or s.shape[2] != 2:
        raise ValueError(f"patch scores must be N x N x 2, got {s.shape}")
    if flag not in (0, 1):
        raise ValueError(f"flag must be 0 or 1, got {flag!r}")
    if not np.isfinite(s).all():
        raise NumericError("patch scores contain non-finite values")
    if (s <= 0.0).any() or (s >= 1.0).any():
        raise ValueError("patch scores must lie strictly inside (0, 1)")
    sums = s.sum(axis=2)
    if np.abs(sums - 1.0).max() > _PATCH_SUM_TOL:
        worst = np.unravel_index(np.argmax(np.abs(sums - 1.0)), sums.shape)
        raise ValueError(
            f"per-patch probabilities non-normalized at {worst}: sum {sums[worst]:.8f}"
        )
    n_patches = s.shape[0] * s.shape[1]
    ch = 1 if flag == 1 else 0
    value = float(-np.log(s[..., ch]).sum() / n_patches)
    grad = np.zeros_like(s)
    grad[..., ch] = -1.0 / (s[..., ch] * n_patches)
    return PatchAdvResult(value, grad)


def total_loss(
    l_seg: float, l_seg_m: float, l_inv: float, l_cd: float, weights: LossWeights
) -> LossReport:
    """Weighted sum of all loss components; the identity
    total = l_seg + l_seg_m + lambda1*l_inv + lambda2*l_cd is re-computable
    bit-exactly from the report."""
    weights.validate()
    parts = (l_seg, l_seg_m, l_inv, l_cd)
    if not all(np.isfinite(v) for v in parts):
        raise NumericError(f"non-finite loss component in {parts}")
    total = l_seg + l_seg_m + weights.lambda1 * l_inv + weights.lambda2 * l_cd
    return LossReport(l_seg=l_seg, l_seg_m=l_seg_m, l_inv=l_inv, l_cd=l_cd, total=total)
