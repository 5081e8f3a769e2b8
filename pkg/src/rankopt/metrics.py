"""Exact (non-surrogate) ranking metrics and brute-force threshold oracles.

Thresholds follow the ``score >= theta`` convention, so tied scores always
cross a threshold together and curves carry one point per distinct score.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import LabeledDataset, MetricsReport, ThresholdedScorer

NO_THRESHOLD = math.inf


@dataclass(frozen=True)
class ScoredSet:
    """Scores and +/-1 labels sorted by descending score."""

    scores: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_arrays(cls, scores, labels) -> "ScoredSet":
        scores = np.asarray(scores, dtype=np.float64).reshape(-1)
        labels = np.asarray(labels).reshape(-1)
        if scores.shape != labels.shape:
            raise ValueError("scores and labels differ in length")
        labels = np.where(labels > 0, 1, -1).astype(np.int8)
        order = np.argsort(-scores, kind="stable")
        return cls(scores[order], labels[order])

    @classmethod
    def from_model(cls, scorer: ThresholdedScorer, data: LabeledDataset) -> "ScoredSet":
        return cls.from_arrays(scorer.scores(data.X), data.y)

    @property
    def n_pos(self) -> int:
        return int(np.count_nonzero(self.labels > 0))

    @property
    def n_neg(self) -> int:
        return int(self.labels.size - self.n_pos)

    @property
    def has_ties(self) -> bool:
        return bool(np.any(np.diff(self.scores) == 0))

    def cumulative(self):
        """``(thresholds, tp, fp)`` at each distinct score, highest first."""
        pos = (self.labels > 0).astype(np.int64)
        tp = np.cumsum(pos)
        fp = np.cumsum(1 - pos)
        # last index of each run of equal scores
        last = np.flatnonzero(np.append(np.diff(self.scores) != 0, True))
        return self.scores[last], tp[last], fp[last]


def confusion_at(scored: ScoredSet, threshold: float):
    above = scored.scores >= threshold
    pos = scored.labels > 0
    tp = int(np.count_nonzero(above & pos))
    fp = int(np.count_nonzero(above & ~pos))
    return tp, fp, scored.n_pos - tp, scored.n_neg - fp


def pr_curve(scored: ScoredSet) -> list[tuple[float, float]]:
    return [(r, p) for _, r, p in pr_curve_points(scored)]


def pr_curve_points(scored: ScoredSet):
    """``(threshold, recall, precision)`` per distinct score."""
    n_pos = scored.n_pos
    if n_pos < 1:
        raise ValueError("PR curve needs at least one positive")
    th, tp, fp = scored.cumulative()
    return [(float(t), float(a / n_pos), float(a / (a + b))) for t, a, b in zip(th, tp, fp)]


def roc_curve_points(scored: ScoredSet):
    """``(threshold, fpr, tpr)`` per distinct score."""
    th, tp, fp = scored.cumulative()
    return [(float(t), float(b / scored.n_neg), float(a / scored.n_pos)) for t, a, b in zip(th, tp, fp)]


def average_precision(scored: ScoredSet) -> float:
    n_pos = scored.n_pos
    if n_pos < 1:
        raise ValueError("average precision needs at least one positive")
    _, tp, fp = scored.cumulative()
    precision = tp / (tp + fp)
    # each tie group contributes its new positives at the group's precision
    new_pos = np.diff(tp, prepend=0)
    return float(np.sum(new_pos * precision) / n_pos)


def exact_recall_at_precision(scored: ScoredSet, alpha: float):
    """Best recall over thresholds with precision >= alpha.

    Returns ``(0.0, inf)`` when no threshold qualifies.
    """
    th, tp, fp = scored.cumulative()
    ok = tp >= alpha * (tp + fp) * (1 - 1e-12)
    if not np.any(ok & (tp > 0)):
        return 0.0, NO_THRESHOLD
    idx = np.flatnonzero(ok)
    best = idx[np.argmax(tp[idx])]
    return float(tp[best] / scored.n_pos), float(th[best])


def exact_precision_at_recall(scored: ScoredSet, beta_recall: float):
    """Best precision over thresholds with recall >= beta_recall."""
    th, tp, fp = scored.cumulative()
    ok = tp >= beta_recall * scored.n_pos * (1 - 1e-12)
    idx = np.flatnonzero(ok)
    precision = tp[idx] / (tp[idx] + fp[idx])
    j = int(np.argmax(precision))
    return float(precision[j]), float(th[idx[j]])


def exact_fbeta(tp: int, fp: int, fn: int, beta: float) -> float:
    b2 = beta * beta
    denom = (1 + b2) * tp + b2 * fn + fp
    if denom == 0:
        raise ValueError("F-beta undefined for an empty confusion table")
    return (1 + b2) * tp / denom


def auc_roc(scored: ScoredSet) -> float:
    """Pairwise AUC with ties counted as one half (Mann-Whitney form)."""
    n_pos, n_neg = scored.n_pos, scored.n_neg
    if n_pos < 1 or n_neg < 1:
        raise ValueError("AUCROC needs both classes")
    ranks = rankdata(scored.scores)
    pos_rank_sum = float(np.sum(ranks[scored.labels > 0]))
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


def metrics_report(scorer: ThresholdedScorer, data: LabeledDataset, anchor: int = 0,
                   beta: float = 1.0, alpha: float | None = None,
                   beta_recall: float | None = None) -> MetricsReport:
    scored = ScoredSet.from_model(scorer, data)
    threshold = float(scorer.thresholds[anchor])
    tp, fp, fn, tn = confusion_at(scored, threshold)
    report = MetricsReport(
        tp=tp, fp=fp, fn=fn, tn=tn,
        # no predicted positives: precision reported as 0
        precision=tp / (tp + fp) if tp + fp else 0.0,
        recall=tp / (tp + fn),
        f_beta=exact_fbeta(tp, fp, fn, beta),
        accuracy=(tp + tn) / len(data),
        average_precision=average_precision(scored),
        auc_roc=auc_roc(scored),
        pr_curve=pr_curve(scored),
        threshold=threshold,
        beta=beta,
    )
    if alpha is not None:
        r, t = exact_recall_at_precision(scored, alpha)
        report.recall_at_precision = {"alpha": alpha, "recall": r,
                                      "threshold": t if math.isfinite(t) else None}
    if beta_recall is not None:
        p, t = exact_precision_at_recall(scored, beta_recall)
        report.precision_at_recall = {"beta": beta_recall, "precision": p, "threshold": t}
    return report


def write_pr_csv(scored: ScoredSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["threshold", "recall", "precision"])
        for t, r, p in pr_curve_points(scored):
            w.writerow([repr(t), repr(r), repr(p)])


def write_roc_csv(scored: ScoredSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["threshold", "fpr", "tpr"])
        for t, f, r in roc_curve_points(scored):
            w.writerow([repr(t), repr(f), repr(r)])
