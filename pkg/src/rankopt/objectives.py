"""Saddle-point Lagrangians of the hinge-bound surrogates, with subgradients.

Every Lagrangian here is a sum over anchors ``t`` of

    a_t * loss_pos(theta_t) + b_t * loss_neg(theta_t) + c_t

where the coefficients depend on the duals only. That shared shape is what
``_anchor_terms`` evaluates; the public functions just supply coefficients and
the derivatives of those coefficients with respect to the duals.

``data`` may be a full ``LabeledDataset`` or a ``Batch``. A batch carries the
full-data class counts and rescales its per-class hinge sums by
``n_pos / b_pos`` and ``n_neg / b_neg`` so the batch Lagrangian estimates the
full-data one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import BoundValues
from .core import LabeledDataset, ObjectiveKind, ObjectiveSpec, SaddleState, ThresholdedScorer


@dataclass
class SaddleEvaluation:
    value: float
    grad_weights: np.ndarray
    grad_bias: float
    grad_thresholds: np.ndarray
    grad_duals: np.ndarray
    grad_psi: float = 0.0

    def primal_vector(self) -> np.ndarray:
        """Gradient stacked as ``[weights, bias, thresholds(, psi)]``."""
        return np.concatenate([self.grad_weights, [self.grad_bias], self.grad_thresholds])


@dataclass(frozen=True)
class AnchorWeights:
    alphas: np.ndarray
    deltas: np.ndarray

    @classmethod
    def from_anchors(cls, anchors) -> "AnchorWeights":
        """``anchors`` includes the base value alpha_0 as its first entry."""
        a = np.asarray(anchors, dtype=np.float64)
        if a.size < 2 or np.any(np.diff(a) <= 0):
            raise ValueError(f"anchors must be strictly increasing with a base value: {anchors}")
        return cls(a[1:].copy(), np.diff(a))

    @property
    def base(self) -> float:
        return float(self.alphas[0] - self.deltas[0])


def uniform_anchors(base: float, k: int, upper: float = 1.0, epsilon_cap: float = 0.05):
    """``base`` followed by ``base + (upper - base) t / k`` for t = 1..k.

    Values are clamped to ``min(upper, 1 - epsilon_cap)`` and duplicates
    created by the clamp are dropped, so fewer than ``k`` anchors may come back.
    """
    if k < 1:
        raise ValueError("need at least one anchor")
    cap = min(upper, 1.0 - epsilon_cap)
    if not 0 <= base < cap:
        raise ValueError(f"anchor base {base} must lie in [0, {cap})")
    t = np.arange(1, k + 1)
    raw = np.minimum(base + (upper - base) * t / k, cap)
    out = [base]
    for v in raw:
        if v > out[-1]:
            out.append(float(v))
    return np.array(out)


def precision_anchors(prior: float, k: int, epsilon_cap: float = 0.05,
                      precision_range: tuple[float, float] | None = None):
    lo, hi = precision_range if precision_range is not None else (0.0, 1.0)
    return uniform_anchors(max(prior, lo), k, hi, epsilon_cap)


def fpr_anchors(k: int, epsilon_cap: float = 0.05,
                fpr_range: tuple[float, float] | None = None):
    lo, hi = fpr_range if fpr_range is not None else (0.0, 1.0)
    return uniform_anchors(lo, k, hi, epsilon_cap)


@dataclass(frozen=True)
class Batch:
    """Rows drawn from a dataset plus the scale factors of the estimator."""

    X: np.ndarray
    y: np.ndarray
    n_pos: int
    n_neg: int
    pos_scale: float
    neg_scale: float

    @property
    def has_pos(self) -> bool:
        return self.pos_scale > 0

    @property
    def has_neg(self) -> bool:
        return self.neg_scale > 0

    @classmethod
    def full(cls, data: LabeledDataset) -> "Batch":
        return cls(data.X, data.y, data.n_pos, data.n_neg, 1.0, 1.0)

    @classmethod
    def sample(cls, data: LabeledDataset, index) -> "Batch":
        y = data.y[index]
        b_pos = int(np.count_nonzero(y > 0))
        b_neg = y.size - b_pos
        # an absent class contributes nothing (scale 0)
        return cls(data.X[index], y, data.n_pos, data.n_neg,
                   data.n_pos / b_pos if b_pos else 0.0,
                   data.n_neg / b_neg if b_neg else 0.0)


def as_batch(data) -> Batch:
    return data if isinstance(data, Batch) else Batch.full(data)


def _anchor_terms(scorer: ThresholdedScorer, batch: Batch, a, b):
    """Evaluate per-anchor hinge sums and the gradient of sum_t a_t l+ + b_t l-.

    Returns ``(loss_pos[K], loss_neg[K], grad_w, grad_bias, grad_theta[K])``.
    """
    X, y = batch.X, batch.y
    s = X @ scorer.weights + scorer.bias
    pos = y > 0
    yf = y.astype(np.float64)
    scale = np.where(pos, batch.pos_scale, batch.neg_scale)
    K = scorer.thresholds.size
    loss_pos = np.empty(K)
    loss_neg = np.empty(K)
    dscore = np.zeros_like(s)
    grad_theta = np.empty(K)
    for t in range(K):
        margin = yf * (s - scorer.thresholds[t])
        active = margin < 1.0
        hinge = np.where(active, 1.0 - margin, 0.0) * scale
        loss_pos[t] = np.sum(hinge[pos])
        loss_neg[t] = np.sum(hinge[~pos])
        # d/ds of the weighted hinge sum at anchor t
        coef = np.where(pos, a[t], b[t]) * scale
        d = np.where(active, -yf * coef, 0.0)
        dscore += d
        grad_theta[t] = -np.sum(d)
    return loss_pos, loss_neg, X.T @ dscore, float(np.sum(dscore)), grad_theta


def _lagrangian(scorer, batch, a, b, c, grad_duals_fn) -> SaddleEvaluation:
    loss_pos, loss_neg, gw, gb, gt = _anchor_terms(scorer, batch, a, b)
    value = float(np.sum(a * loss_pos + b * loss_neg + c))
    return SaddleEvaluation(value, gw, gb, gt, grad_duals_fn(loss_pos, loss_neg))


def _check_alphas(alphas) -> None:
    if np.any(np.asarray(alphas) >= 1.0) or np.any(np.asarray(alphas) <= 0.0):
        raise ValueError(f"precision targets must lie in (0, 1): {alphas}")


def _check_state(state: SaddleState, K: int) -> None:
    if state.scorer.thresholds.size != K or state.duals.size != K:
        raise ValueError(f"state has {state.scorer.thresholds.size} thresholds and "
                         f"{state.duals.size} duals; objective needs {K}")


# Coefficient builders: (a, b, c, dual-gradient function) for duals ``lam``.

def _rap_terms(alphas, deltas, lam, n_pos, n_neg):
    ratio = alphas / (1.0 - alphas)
    return (deltas * (1.0 + lam), deltas * lam * ratio, -deltas * lam * n_pos,
            lambda lp, ln: deltas * (lp + ratio * ln - n_pos))


def _par_terms(beta_recall, lam, n_pos, n_neg):
    return (lam / n_pos, np.ones(1), lam * (beta_recall - 1.0),
            lambda lp, ln: beta_recall + lp / n_pos - 1.0)


def _roc_terms(phis, deltas, lam, n_pos, n_neg):
    return (deltas.copy(), deltas * lam, -deltas * lam * phis * n_neg,
            lambda lp, ln: deltas * (ln - phis * n_neg))


def _hinge_terms(lam, n_pos, n_neg):
    return np.ones(1), np.ones(1), np.zeros(1), lambda lp, ln: np.zeros(0)


def linear_terms(objective: ObjectiveSpec, duals, n_pos: int, n_neg: int):
    """Coefficients ``(a, b, c, dual_grad_fn)`` of the hinge-linear objectives.

    The F-beta auxiliary form is not linear in the class losses and is rejected.
    """
    lam = np.asarray(duals, dtype=np.float64)
    kind = objective.kind
    if kind is ObjectiveKind.RECALL_AT_PRECISION:
        _check_alphas([objective.target])
        return _rap_terms(np.array([objective.target]), np.ones(1), lam[:1], n_pos, n_neg)
    if kind is ObjectiveKind.PRECISION_AT_RECALL:
        if not 0 < objective.target <= 1:
            raise ValueError(f"recall target must be in (0, 1], got {objective.target}")
        return _par_terms(objective.target, lam[:1], n_pos, n_neg)
    if kind is ObjectiveKind.AUCPR:
        aw = AnchorWeights.from_anchors(objective.anchors)
        _check_alphas(aw.alphas)
        return _rap_terms(aw.alphas, aw.deltas, lam, n_pos, n_neg)
    if kind is ObjectiveKind.AUCROC:
        aw = AnchorWeights.from_anchors(objective.anchors)
        _check_alphas(aw.alphas)
        return _roc_terms(aw.alphas, aw.deltas, lam, n_pos, n_neg)
    if kind is ObjectiveKind.HINGE:
        return _hinge_terms(lam, n_pos, n_neg)
    raise ValueError(f"{kind.value} objective has no hinge-linear form")


def rap_lagrangian(state: SaddleState, alpha: float, data) -> SaddleEvaluation:
    """Recall at fixed precision ``alpha``:
    ``(1 + lam) l+ + lam * alpha / (1 - alpha) * l- - lam * n_pos``.
    """
    _check_alphas([alpha])
    batch = as_batch(data)
    return _lagrangian(state.scorer, batch, *_rap_terms(
        np.array([alpha]), np.ones(1), state.duals[:1], batch.n_pos, batch.n_neg))


def rap_constraint_residual(state: SaddleState, alpha: float, data) -> float:
    """``alpha l- + (1 - alpha) l+ - (1 - alpha) n_pos``; <= 0 means feasible."""
    batch = as_batch(data)
    lp, ln, *_ = _anchor_terms(state.scorer, batch, np.zeros(1), np.zeros(1))
    return float(alpha * ln[0] + (1 - alpha) * lp[0] - (1 - alpha) * batch.n_pos)


def c_weight(alpha: float, lam: float) -> float:
    """Positive-class weight of the equivalent weighted SVM at fixed ``lam``."""
    if lam <= 0:
        raise ValueError("c(alpha, lambda) is undefined for lambda <= 0")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return (1 + lam) * (1 - alpha) / (lam * alpha)


def weighted_hinge_objective(scorer: ThresholdedScorer, data, c: float,
                             anchor: int = 0) -> SaddleEvaluation:
    """``c * l+ + l-``: the hinge objective with positives weighted by ``c``."""
    batch = as_batch(data)
    K = scorer.thresholds.size
    a = np.zeros(K)
    b = np.zeros(K)
    a[anchor], b[anchor] = c, 1.0
    return _lagrangian(scorer, batch, a, b, np.zeros(K), lambda lp, ln: np.zeros(0))


def par_lagrangian(state: SaddleState, beta_recall: float, data) -> SaddleEvaluation:
    """Precision at fixed recall in the 1/P form:
    ``l- + lam * (beta + l+ / n_pos - 1)``.
    """
    if not 0 < beta_recall <= 1:
        raise ValueError(f"recall target must be in (0, 1], got {beta_recall}")
    batch = as_batch(data)
    return _lagrangian(state.scorer, batch, *_par_terms(
        beta_recall, state.duals[:1], batch.n_pos, batch.n_neg))


def aucpr_lagrangian(state: SaddleState, anchors: AnchorWeights, data) -> SaddleEvaluation:
    """Anchor sum of recall-at-precision Lagrangians weighted by ``Delta_t``."""
    _check_alphas(anchors.alphas)
    _check_state(state, anchors.alphas.size)
    batch = as_batch(data)
    return _lagrangian(state.scorer, batch, *_rap_terms(
        anchors.alphas, anchors.deltas, state.duals, batch.n_pos, batch.n_neg))


def aucroc_lagrangian(state: SaddleState, fpr_anchors: AnchorWeights, data) -> SaddleEvaluation:
    """Anchor sum of true-positive-rate at fixed false-positive-rate:
    ``sum_t Delta_t (l+(theta_t) + lam_t (l-(theta_t) - phi_t n_neg))``.
    """
    _check_alphas(fpr_anchors.alphas)
    _check_state(state, fpr_anchors.alphas.size)
    batch = as_batch(data)
    return _lagrangian(state.scorer, batch, *_roc_terms(
        fpr_anchors.alphas, fpr_anchors.deltas, state.duals, batch.n_pos, batch.n_neg))


def hinge_lagrangian(state: SaddleState, data) -> SaddleEvaluation:
    """Unweighted hinge ``l+ + l-`` (no constraint, no duals)."""
    return weighted_hinge_objective(state.scorer, data, 1.0)


def fbeta_surrogate(b: BoundValues, n_pos: int, beta: float) -> float:
    """``(1 + beta^2) tp_lb / (beta^2 n_pos + tp_lb + fp_ub)``, a lower bound on F-beta."""
    b2 = beta * beta
    denom = b2 * n_pos + b.tp_lb + b.fp_ub
    if denom <= 0:
        raise ValueError("F-beta surrogate undefined: non-positive denominator")
    return (1 + b2) * b.tp_lb / denom


def fbeta_psi_lagrangian(state: SaddleState, psi: float, lam: float, data,
                         beta: float = 1.0) -> SaddleEvaluation:
    """Auxiliary-variable form of the reciprocal F-beta surrogate:
    ``l- / psi + lam l+ + (beta^2 / psi - lam) n_pos + psi lam``.

    With ``psi = n_pos - l+`` this equals ``(1 + beta^2) / F_beta_surrogate - 1``.
    The dual gradient ``psi + l+ - n_pos`` is the constraint residual.
    """
    if psi <= 0:
        raise ValueError(f"psi must be positive, got {psi}")
    batch = as_batch(data)
    n_pos = batch.n_pos
    b2 = beta * beta
    lp, ln, gw, gb, gt = _anchor_terms(
        state.scorer, batch, np.array([lam]), np.array([1.0 / psi]))
    lp, ln = lp[0], ln[0]
    value = ln / psi + lam * lp + (b2 / psi - lam) * n_pos + psi * lam
    grad_psi = -(ln + b2 * n_pos) / psi ** 2 + lam
    return SaddleEvaluation(float(value), gw, gb, gt,
                            np.array([psi + lp - n_pos]), float(grad_psi))


def evaluate(state: SaddleState, objective: ObjectiveSpec, data) -> SaddleEvaluation:
    """Dispatch on the objective kind."""
    kind = objective.kind
    if kind is ObjectiveKind.RECALL_AT_PRECISION:
        return rap_lagrangian(state, objective.target, data)
    if kind is ObjectiveKind.PRECISION_AT_RECALL:
        return par_lagrangian(state, objective.target, data)
    if kind is ObjectiveKind.AUCPR:
        return aucpr_lagrangian(state, AnchorWeights.from_anchors(objective.anchors), data)
    if kind is ObjectiveKind.AUCROC:
        return aucroc_lagrangian(state, AnchorWeights.from_anchors(objective.anchors), data)
    if kind is ObjectiveKind.FBETA:
        return fbeta_psi_lagrangian(state, state.psi, float(state.duals[0]), data,
                                    objective.target)
    if kind is ObjectiveKind.HINGE:
        return hinge_lagrangian(state, data)
    raise ValueError(f"unknown objective {kind}")


def n_duals(objective: ObjectiveSpec) -> int:
    return 0 if objective.kind is ObjectiveKind.HINGE else objective.n_thresholds
