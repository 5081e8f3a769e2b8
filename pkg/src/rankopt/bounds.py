"""Hinge-based lower bound on true positives and upper bound on false positives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset, ThresholdedScorer


@dataclass(frozen=True)
class BoundValues:
    tp_lb: float
    fp_ub: float
    loss_pos: float
    loss_neg: float


def hinge_loss(raw_score, threshold, label):
    """``max(0, 1 - y (s - theta))``; broadcasts over arrays."""
    out = np.maximum(0.0, 1.0 - label * (np.asarray(raw_score) - threshold))
    return float(out) if np.ndim(out) == 0 else out


def hinge_subgradient(raw_score, threshold, label):
    """Derivative of the hinge with respect to the raw score.

    Returns ``-y`` where the margin is below 1 and 0 elsewhere; the kink itself
    takes the inactive branch, so points sitting exactly on the margin add
    nothing.
    """
    margin = label * (np.asarray(raw_score) - threshold)
    out = np.where(margin < 1.0, -np.asarray(label, dtype=np.float64), 0.0)
    return float(out) if np.ndim(out) == 0 else out


def class_hinge_sums(scores: np.ndarray, y: np.ndarray, threshold: float):
    """Per-class hinge sums ``(loss_pos, loss_neg)`` in dataset order."""
    losses = np.maximum(0.0, 1.0 - y * (scores - threshold))
    pos = y > 0
    return float(np.sum(losses[pos])), float(np.sum(losses[~pos]))


def compute_bounds(scorer: ThresholdedScorer, anchor_index: int,
                   data: LabeledDataset) -> BoundValues:
    if not 0 <= anchor_index < scorer.thresholds.size:
        raise IndexError(f"anchor {anchor_index} out of range for {scorer.thresholds.size} thresholds")
    loss_pos, loss_neg = class_hinge_sums(
        scorer.scores(data.X), data.y, scorer.thresholds[anchor_index])
    return BoundValues(data.n_pos - loss_pos, loss_neg, loss_pos, loss_neg)


def surrogate_precision(b: BoundValues) -> float:
    denom = b.tp_lb + b.fp_ub
    if denom == 0:
        raise ZeroDivisionError("surrogate precision undefined: tp_lb + fp_ub == 0")
    return b.tp_lb / denom


def surrogate_recall(b: BoundValues, n_pos: int) -> float:
    if n_pos < 1:
        raise ValueError("n_pos must be at least 1")
    return b.tp_lb / n_pos
