"""Stochastic primal-descent / dual-ascent on the surrogate Lagrangians.

Each step descends the batch Lagrangian in the primal (weights, bias,
thresholds, and the F-beta auxiliary), then ascends it in the duals at the
*updated* primal point, then projects the duals onto ``[0, lambda_cap]``.

Learning rates are per example: the hinge-sum Lagrangians are divided by
the dataset size before stepping, so the same rates work across dataset
sizes. On top of that a fixed diagonal preconditioner keeps each coordinate
at unit scale (see ``_Scaling``); it changes step lengths, not fixed points.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import LabeledDataset, ObjectiveKind, ObjectiveSpec, SaddleState, ThresholdedScorer
from .metrics import metrics_report
from .objectives import AnchorWeights, Batch, evaluate, linear_terms, n_duals

log = logging.getLogger(__name__)

LR_DECAYS = ("constant", "inv_sqrt")


@dataclass
class TrainConfig:
    steps: int = 2000
    batch_size: int = 256
    lr_primal: float = 0.05
    lr_dual: float | None = None
    lr_decay: str = "constant"
    l2_reg: float = 1e-3
    lambda_cap: float | None = 1e4
    seed: int = 0
    eval_every: int = 100

    def __post_init__(self):
        if self.lr_dual is None:
            self.lr_dual = self.lr_primal
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2")
        if self.lr_primal < 0 or self.lr_dual < 0:
            raise ValueError("learning rates must be non-negative")
        if self.lr_decay not in LR_DECAYS:
            raise ValueError(f"lr_decay must be one of {LR_DECAYS}, got {self.lr_decay!r}")
        if self.l2_reg < 0:
            raise ValueError("l2_reg must be non-negative")
        if self.eval_every < 1:
            raise ValueError("eval_every must be >= 1")

    def rate(self, step: int) -> float:
        """Schedule multiplier for 1-based ``step``."""
        return 1.0 if self.lr_decay == "constant" else 1.0 / math.sqrt(step)


@dataclass
class TracePoint:
    step: int
    lagrangian: float
    duals: list[float]
    metrics: dict
    scorer: ThresholdedScorer
    psi: float | None = None

    def to_json(self) -> str:
        d = {"step": self.step, "lagrangian": self.lagrangian, "duals": self.duals,
             "metrics": self.metrics, "model": self.scorer.to_dict()}
        if self.psi is not None:
            d["psi"] = self.psi
        return json.dumps(d)


@dataclass
class TrainTrace:
    points: list[TracePoint] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def append(self, point: TracePoint) -> None:
        if self.points and point.step <= self.points[-1].step:
            raise ValueError("trace steps must increase")
        self.points.append(point)

    def __len__(self) -> int:
        return len(self.points)

    def write_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for p in self.points:
                fh.write(p.to_json() + "\n")
            for w in self.warnings:
                fh.write(json.dumps({"warning": w}) + "\n")


@dataclass(frozen=True)
class _Scaling:
    """Objective normalization and per-coordinate step multipliers."""

    value: float          # multiplies the Lagrangian before stepping
    thresholds: np.ndarray
    duals: np.ndarray
    psi: float = 0.0


def _scaling(objective: ObjectiveSpec, n_pos: int, n_neg: int) -> _Scaling:
    n = n_pos + n_neg
    kind = objective.kind
    K = objective.n_thresholds
    if kind in (ObjectiveKind.AUCPR, ObjectiveKind.AUCROC):
        # each anchor's threshold and dual see only its Delta_t share
        inv_delta = 1.0 / AnchorWeights.from_anchors(objective.anchors).deltas
        return _Scaling(1.0 / n, inv_delta, inv_delta)
    if kind is ObjectiveKind.PRECISION_AT_RECALL:
        # lam / n_pos is the positive-class weight
        return _Scaling(1.0 / n, np.ones(1), np.array([float(n_pos) ** 2]))
    if kind is ObjectiveKind.FBETA:
        # the psi form is already O(1); psi ~ n_pos and lam ~ 1 / n_pos
        return _Scaling(1.0, np.ones(1), np.array([1.0 / n_pos ** 2]), float(n_pos) ** 2)
    return _Scaling(1.0 / n, np.ones(K), np.ones(n_duals(objective)))


def initial_state(data: LabeledDataset, objective: ObjectiveSpec) -> SaddleState:
    K = objective.n_thresholds
    scorer = ThresholdedScorer.zeros(data.dim, K)
    kind = objective.kind
    if kind is ObjectiveKind.PRECISION_AT_RECALL:
        duals = np.array([float(data.n_pos)])
    elif kind is ObjectiveKind.FBETA:
        duals = np.array([1.0 / data.n_pos])
    else:
        duals = np.ones(n_duals(objective))
    psi = 0.5 * data.n_pos if kind is ObjectiveKind.FBETA else None
    return SaddleState(scorer, duals, 0, psi)


def _check_finite(step: int, *arrays) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise FloatingPointError(f"non-finite gradient at step {step}")


def sgd_step(state: SaddleState, batch: Batch | LabeledDataset, objective: ObjectiveSpec,
             cfg: TrainConfig, rate: float = 1.0) -> SaddleState:
    """One primal descent step followed by one dual ascent step."""
    if not isinstance(batch, Batch):
        batch = Batch.full(batch)
    sc = _scaling(objective, batch.n_pos, batch.n_neg)
    step = state.step + 1
    gp, gd = cfg.lr_primal * rate, cfg.lr_dual * rate

    ev = evaluate(state, objective, batch)
    gw = sc.value * ev.grad_weights + cfg.l2_reg * state.scorer.weights
    gb = sc.value * ev.grad_bias
    gt = sc.value * ev.grad_thresholds
    _check_finite(step, gw, gb, gt, ev.grad_psi)

    new = state.copy()
    new.step = step
    s = new.scorer
    s.weights = s.weights - gp * gw
    s.bias = s.bias - gp * gb
    s.thresholds = s.thresholds - gp * sc.thresholds * gt
    if state.psi is not None:
        n_pos = batch.n_pos
        psi = state.psi - gp * sc.psi * sc.value * ev.grad_psi
        new.psi = float(np.clip(psi, 1e-3 * n_pos, n_pos))

    if new.duals.size and batch.has_pos and batch.has_neg:
        # dual gradient at the updated primal, old duals
        ev_new = evaluate(new, objective, batch)
        dg = sc.value * ev_new.grad_duals
        _check_finite(step, dg)
        cap = cfg.lambda_cap if cfg.lambda_cap is not None else np.inf
        new.duals = np.clip(state.duals + gd * sc.duals * dg, 0.0, cap)
    return new


def _batches(data: LabeledDataset, batch_size: int, rng: np.random.Generator):
    """Endless shuffled epochs; the final short batch of an epoch is kept."""
    n = len(data)
    if batch_size >= n:
        full = Batch.full(data)
        while True:
            yield full
    while True:
        order = rng.permutation(n)
        for i in range(0, n, batch_size):
            idx = np.sort(order[i:i + batch_size])
            if idx.size >= 2:
                yield Batch.sample(data, idx)


def _trace_point(state: SaddleState, objective: ObjectiveSpec, batch, eval_data) -> TracePoint:
    value = evaluate(state, objective, batch).value
    report = metrics_report(state.scorer, eval_data)
    return TracePoint(state.step, value, [float(v) for v in state.duals],
                      report.to_dict(include_curve=False), state.scorer.copy(), state.psi)


def train(data: LabeledDataset, objective: ObjectiveSpec, cfg: TrainConfig,
          eval_data: LabeledDataset | None = None,
          init: SaddleState | None = None) -> tuple[ThresholdedScorer, TrainTrace]:
    """Run ``cfg.steps`` saddle steps; deterministic given ``cfg.seed``."""
    objective.check_prior(data.prior)
    eval_data = data if eval_data is None else eval_data
    state = initial_state(data, objective) if init is None else init.copy()
    rng = np.random.default_rng(cfg.seed)
    trace = TrainTrace()
    capped = False
    batches = _batches(data, cfg.batch_size, rng)
    for k in range(1, cfg.steps + 1):
        batch = next(batches)
        state = sgd_step(state, batch, objective, cfg, cfg.rate(k))
        if (not capped and cfg.lambda_cap is not None and state.duals.size
                and np.any(state.duals >= cfg.lambda_cap)):
            capped = True
            msg = f"step {k}: dual reached lambda_cap={cfg.lambda_cap}; constraint may be infeasible"
            trace.warnings.append(msg)
            log.warning(msg)
        if k % cfg.eval_every == 0 or k == cfg.steps:
            trace.append(_trace_point(state, objective, batch, eval_data))
    return state.scorer.copy(), trace


def train_state(data, objective, cfg, **kw) -> tuple[SaddleState, TrainTrace]:
    """Like ``train`` but returns the final trace point as a full state."""
    scorer, trace = train(data, objective, cfg, **kw)
    last = trace.points[-1]
    return SaddleState(scorer, np.array(last.duals), last.step, last.psi), trace


def averaged_iterate(trace: TrainTrace) -> ThresholdedScorer:
    """Uniform average of the snapshots from the middle of the trace onward."""
    if not trace.points:
        raise ValueError("empty trace")
    tail = trace.points[(len(trace.points) - 1) // 2:]
    return ThresholdedScorer(
        np.mean([p.scorer.weights for p in tail], axis=0),
        float(np.mean([p.scorer.bias for p in tail])),
        np.mean([p.scorer.thresholds for p in tail], axis=0))


def averaged_duals(trace: TrainTrace) -> np.ndarray:
    if not trace.points:
        raise ValueError("empty trace")
    tail = trace.points[(len(trace.points) - 1) // 2:]
    return np.mean([p.duals for p in tail], axis=0)


def regularized_value(state: SaddleState, objective: ObjectiveSpec, data: LabeledDataset,
                      l2_reg: float) -> float:
    """The normalized, L2-regularized Lagrangian that ``sgd_step`` descends."""
    sc = _scaling(objective, data.n_pos, data.n_neg)
    w = state.scorer.weights
    return sc.value * evaluate(state, objective, data).value + 0.5 * l2_reg * float(w @ w)


def duality_gap(state: SaddleState, objective: ObjectiveSpec, data: LabeledDataset,
                l2_reg: float, dual_box: float) -> float:
    """``max_{0 <= lam' <= box} J(f, lam') - min_f' J(f', lam)``.

    ``J`` is the normalized regularized Lagrangian. The inner primal
    minimization is a convex QP, solved exactly with cvxpy. Only the
    hinge-linear objectives are supported.
    """
    import cvxpy as cp

    sc = _scaling(objective, data.n_pos, data.n_neg)
    lam = np.asarray(state.duals, dtype=np.float64)
    # max over the dual box: J is affine in each lam_t
    at_zero = state.copy()
    at_zero.duals = np.zeros_like(lam)
    ev0 = evaluate(at_zero, objective, data)
    w = state.scorer.weights
    upper = (sc.value * ev0.value + 0.5 * l2_reg * float(w @ w)
             + dual_box * float(np.sum(np.maximum(sc.value * ev0.grad_duals, 0.0))))

    a, b, c, _ = linear_terms(objective, lam, data.n_pos, data.n_neg)
    K = objective.n_thresholds
    X, y = data.X, data.y.astype(np.float64)
    pos = y > 0
    wv = cp.Variable(data.dim)
    bias = cp.Variable()
    theta = cp.Variable(K)
    s = X @ wv + bias
    total = 0
    for t in range(K):
        hinge = cp.pos(1 - cp.multiply(y, s - theta[t]))
        total += a[t] * cp.sum(hinge[np.flatnonzero(pos)]) + b[t] * cp.sum(hinge[np.flatnonzero(~pos)])
    total = sc.value * (total + float(np.sum(c))) + 0.5 * l2_reg * cp.sum_squares(wv)
    prob = cp.Problem(cp.Minimize(total))
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"inner primal minimization failed: {prob.status}")
    return upper - float(prob.value)


def config_to_dict(cfg: TrainConfig) -> dict:
    return asdict(cfg)
