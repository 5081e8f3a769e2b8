"""Shared domain types: datasets, thresholded linear scorers, objective specs."""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np


class DataError(ValueError):
    """Malformed or degenerate input data."""


@dataclass(frozen=True)
class LabeledExample:
    features: np.ndarray
    label: int


class LabeledDataset:
    """Immutable feature matrix with +/-1 labels and cached class counts."""

    def __init__(self, X, y):
        X = np.array(X, dtype=np.float64, copy=True)
        y = np.asarray(y)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError(f"expected {X.shape[0]} labels, got shape {y.shape}")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain non-finite values")
        y = normalize_labels(y)
        n_pos = int(np.count_nonzero(y > 0))
        n_neg = int(y.size - n_pos)
        if n_pos < 1 or n_neg < 1:
            raise DataError(
                f"dataset needs both classes (got {n_pos} positives, {n_neg} negatives)"
            )
        X.setflags(write=False)
        y.setflags(write=False)
        self.X = X
        self.y = y
        self.n_pos = n_pos
        self.n_neg = n_neg

    @property
    def prior(self) -> float:
        return self.n_pos / (self.n_pos + self.n_neg)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.X.shape[0]

    def __iter__(self) -> Iterator[LabeledExample]:
        for x, label in zip(self.X, self.y):
            yield LabeledExample(x, int(label))

    @property
    def examples(self) -> list[LabeledExample]:
        return list(self)

    def subset(self, index) -> "LabeledDataset":
        return LabeledDataset(self.X[index], self.y[index])

    def split(self, fraction: float = 0.8, seed: int = 0):
        """Seeded shuffle split into (train, validation)."""
        rng = np.random.default_rng(seed)
        order = rng.permutation(len(self))
        cut = int(round(fraction * len(self)))
        return self.subset(np.sort(order[:cut])), self.subset(np.sort(order[cut:]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return np.array_equal(self.X, other.X) and np.array_equal(self.y, other.y)

    def __repr__(self) -> str:
        return (f"LabeledDataset(n={len(self)}, d={self.dim}, "
                f"n_pos={self.n_pos}, n_neg={self.n_neg})")


def normalize_labels(y) -> np.ndarray:
    """Map {0,1} or {-1,+1} labels to int8 {-1,+1}."""
    y = np.asarray(y)
    values = set(np.unique(y).tolist())
    if values <= {-1, 1}:
        out = y.astype(np.int8)
    elif values <= {0, 1}:
        out = np.where(y > 0, 1, -1).astype(np.int8)
    else:
        raise DataError(f"labels must be in {{0,1}} or {{-1,+1}}, got {sorted(values)}")
    return out


def load_csv(path, label_column: str = "label") -> LabeledDataset:
    """Read ``f0,...,f{d-1},label`` with a header row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: missing '{label_column}' column")
        li = header.index(label_column)
        feats, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                labels.append(int(float(row[li])))
                feats.append([float(v) for j, v in enumerate(row) if j != li])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    if not labels:
        raise DataError(f"{path}: no data rows")
    return LabeledDataset(np.array(feats, dtype=np.float64).reshape(len(labels), -1),
                          np.array(labels))


def save_csv(data: LabeledDataset, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(data.dim)] + ["label"])
        for x, label in zip(data.X, data.y):
            # repr round-trips float64 exactly
            writer.writerow([repr(float(v)) for v in x] + [int(label)])


@dataclass
class ThresholdedScorer:
    """Linear score ``w.x + b`` with one decision threshold per anchor."""

    weights: np.ndarray
    bias: float = 0.0
    thresholds: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        self.bias = float(self.bias)
        self.thresholds = np.asarray(self.thresholds, dtype=np.float64).reshape(-1)
        if self.thresholds.size < 1:
            raise ValueError("scorer needs at least one threshold")

    @classmethod
    def zeros(cls, dim: int, n_thresholds: int = 1) -> "ThresholdedScorer":
        return cls(np.zeros(dim), 0.0, np.zeros(n_thresholds))

    @property
    def dim(self) -> int:
        return self.weights.size

    def scores(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ValueError(f"feature dimension {X.shape[-1]} != scorer dimension {self.dim}")
        return X @ self.weights + self.bias

    def predict(self, X, anchor: int = 0) -> np.ndarray:
        return np.where(self.scores(X) >= self.thresholds[anchor], 1, -1)

    def copy(self) -> "ThresholdedScorer":
        return ThresholdedScorer(self.weights.copy(), self.bias, self.thresholds.copy())

    def to_dict(self) -> dict:
        return {"weights": [float(v) for v in self.weights],
                "bias": float(self.bias),
                "thresholds": [float(v) for v in self.thresholds]}

    @classmethod
    def from_dict(cls, d: dict) -> "ThresholdedScorer":
        try:
            return cls(d["weights"], d["bias"], d["thresholds"])
        except KeyError as exc:
            raise DataError(f"model is missing field {exc}") from None

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path) -> "ThresholdedScorer":
        return cls.from_dict(json.loads(Path(path).read_text()))


def score(scorer: ThresholdedScorer, x) -> float:
    """Raw score ``w.x + b``; thresholds are applied by callers."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != scorer.dim:
        raise ValueError(f"feature dimension {x.size} != scorer dimension {scorer.dim}")
    return float(x @ scorer.weights + scorer.bias)


class ObjectiveKind(enum.Enum):
    RECALL_AT_PRECISION = "rap"
    PRECISION_AT_RECALL = "par"
    AUCPR = "aucpr"
    AUCROC = "aucroc"
    FBETA = "fbeta"
    # unweighted hinge: the accuracy-style baseline
    HINGE = "hinge"


@dataclass
class ObjectiveSpec:
    kind: ObjectiveKind
    target: float | None = None
    anchors: Sequence[float] = ()
    precision_range: tuple[float, float] | None = None

    def __post_init__(self):
        self.kind = ObjectiveKind(self.kind)
        self.anchors = tuple(float(a) for a in self.anchors)
        k = self.kind
        if k in (ObjectiveKind.RECALL_AT_PRECISION, ObjectiveKind.PRECISION_AT_RECALL,
                 ObjectiveKind.FBETA) and self.target is None:
            raise ValueError(f"{k.value} objective needs a target")
        if k is ObjectiveKind.PRECISION_AT_RECALL and not 0 < self.target <= 1:
            raise ValueError(f"recall target must be in (0, 1], got {self.target}")
        if k is ObjectiveKind.RECALL_AT_PRECISION and not 0 < self.target < 1:
            raise ValueError(f"precision target must be in (0, 1), got {self.target}")
        if k is ObjectiveKind.FBETA and not self.target > 0:
            raise ValueError(f"beta must be positive, got {self.target}")
        if k in (ObjectiveKind.AUCPR, ObjectiveKind.AUCROC):
            a = np.asarray(self.anchors)
            if a.size < 2:
                raise ValueError("AUC objectives need a base anchor and at least one more")
            if np.any(np.diff(a) <= 0) or a[0] < 0 or a[-1] >= 1:
                raise ValueError(f"anchors must be strictly increasing in [0, 1): {self.anchors}")

    @property
    def n_thresholds(self) -> int:
        if self.kind in (ObjectiveKind.AUCPR, ObjectiveKind.AUCROC):
            return len(self.anchors) - 1
        return 1

    def check_prior(self, prior: float) -> None:
        if self.kind is ObjectiveKind.RECALL_AT_PRECISION and self.target <= prior:
            raise ValueError(
                f"precision target {self.target} must exceed the positive prior {prior:.4f}")


@dataclass
class SaddleState:
    """Primal scorer (plus the F-beta auxiliary) and non-negative duals."""

    scorer: ThresholdedScorer
    duals: np.ndarray
    step: int = 0
    psi: float | None = None

    def __post_init__(self):
        self.duals = np.asarray(self.duals, dtype=np.float64).reshape(-1)

    def copy(self) -> "SaddleState":
        return SaddleState(self.scorer.copy(), self.duals.copy(), self.step, self.psi)


@dataclass
class MetricsReport:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f_beta: float
    accuracy: float
    average_precision: float
    auc_roc: float
    pr_curve: list[tuple[float, float]]
    threshold: float
    beta: float = 1.0
    recall_at_precision: dict | None = None
    precision_at_recall: dict | None = None

    def to_dict(self, include_curve: bool = True) -> dict:
        d = {
            "tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
            "threshold": _finite_or_none(self.threshold),
            "precision": self.precision, "recall": self.recall,
            "beta": self.beta, "f_beta": self.f_beta, "accuracy": self.accuracy,
            "average_precision": self.average_precision, "auc_roc": self.auc_roc,
        }
        if self.recall_at_precision is not None:
            d["recall_at_precision"] = self.recall_at_precision
        if self.precision_at_recall is not None:
            d["precision_at_recall"] = self.precision_at_recall
        if include_curve:
            d["pr_curve"] = [[r, p] for r, p in self.pr_curve]
        return d


def _finite_or_none(v: float):
    return v if math.isfinite(v) else None
