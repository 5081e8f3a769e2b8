"""F1 as a linear program via the linear-fractional change of variables.

Variables are laid out as ``[tau (n_pos), phi (n_neg), omega (d + 1), eps]``;
the last coordinate of ``omega`` multiplies a constant-1 feature and plays
the role of the bias. At the optimum ``w = omega / eps``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset, ThresholdedScorer
from .simplex import LPError, simplex


class DegenerateOptimum(LPError):
    """Optimum with ``eps == 0``; the inverse mapping is undefined."""


@dataclass
class FBetaLP:
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    free: np.ndarray
    n_pos: int
    n_neg: int
    dim: int

    @property
    def n_vars(self) -> int:
        return self.c.size

    def slices(self):
        p, q, d = self.n_pos, self.n_neg, self.dim + 1
        return (slice(0, p), slice(p, p + q), slice(p + q, p + q + d), p + q + d)

    def dump(self) -> str:
        """Plain-text listing: objective row then one constraint per line."""
        names = ([f"tau{i}" for i in range(self.n_pos)] + [f"phi{i}" for i in range(self.n_neg)]
                 + [f"omega{j}" for j in range(self.dim + 1)] + ["eps"])

        def row(coefs):
            return " ".join(f"{v:+.17g}*{nm}" for v, nm in zip(coefs, names) if v != 0) or "0"

        lines = ["minimize " + row(self.c)]
        for a, b in zip(self.A_eq, self.b_eq):
            lines.append(f"{row(a)} = {b:.17g}")
        for a, b in zip(self.A_ub, self.b_ub):
            lines.append(f"{row(a)} <= {b:.17g}")
        bounded = [nm for nm, f in zip(names, self.free) if not f]
        lines.append("bounds " + " ".join(f"{nm} >= 0" for nm in bounded))
        return "\n".join(lines) + "\n"


@dataclass
class LPSolution:
    x: np.ndarray
    objective: float
    lp: FBetaLP

    @property
    def tau(self):
        return self.x[self.lp.slices()[0]]

    @property
    def phi(self):
        return self.x[self.lp.slices()[1]]

    @property
    def omega(self):
        return self.x[self.lp.slices()[2]]

    @property
    def eps(self) -> float:
        return float(self.x[self.lp.slices()[3]])

    def surrogate_f1(self) -> float:
        """The LP optimum equals ``2 / F1_surrogate``."""
        return 2.0 / self.objective


def build_lp(data: LabeledDataset | tuple) -> FBetaLP:
    """Build the LP from a dataset or an ``(X, y)`` pair (negatives optional)."""
    if isinstance(data, LabeledDataset):
        X, y = data.X, data.y
    else:
        X, y = (np.asarray(v) for v in data)
        X = np.asarray(X, dtype=np.float64).reshape(len(y), -1)
    Xp = X[y > 0]
    Xn = X[y <= 0]
    p, q, d = Xp.shape[0], Xn.shape[0], X.shape[1]
    if p < 1:
        raise ValueError("the F1 program needs at least one positive")
    Xp1 = np.hstack([Xp, np.ones((p, 1))])
    Xn1 = np.hstack([Xn, np.ones((q, 1))])
    nv = p + q + d + 1 + 1
    t0, f0, o0, e = 0, p, p + q, p + q + d + 1

    c = np.zeros(nv)
    c[t0:t0 + p] = 1.0
    c[f0:f0 + q] = 1.0
    c[e] = p

    rows = []
    for i in range(p):
        r = np.zeros(nv)          # tau_i - eps <= 0
        r[t0 + i], r[e] = 1.0, -1.0
        rows.append(r)
        r = np.zeros(nv)          # tau_i - omega.x_i <= 0
        r[t0 + i] = 1.0
        r[o0:o0 + d + 1] = -Xp1[i]
        rows.append(r)
    for i in range(q):
        r = np.zeros(nv)          # eps + omega.x_i - phi_i <= 0
        r[f0 + i], r[e] = -1.0, 1.0
        r[o0:o0 + d + 1] = Xn1[i]
        rows.append(r)
    A_ub = np.array(rows).reshape(-1, nv)
    A_eq = np.zeros((1, nv))
    A_eq[0, t0:t0 + p] = 1.0

    free = np.zeros(nv, bool)
    free[t0:t0 + p] = True
    free[o0:o0 + d + 1] = True
    # phi_i >= 0 and eps >= 0 are variable bounds
    return FBetaLP(c, A_ub, np.zeros(A_ub.shape[0]), A_eq, np.ones(1), free, p, q, d)


def solve_lp(lp: FBetaLP, tol: float = 1e-10) -> LPSolution:
    res = simplex(lp.c, lp.A_ub, lp.b_ub, lp.A_eq, lp.b_eq, lp.free, tol=tol)
    return LPSolution(res.x, res.objective, lp)


def recover_scorer(solution: LPSolution, eps_tol: float = 1e-12) -> ThresholdedScorer:
    eps = solution.eps
    if eps <= eps_tol:
        raise DegenerateOptimum(f"eps = {eps:.3e}: cannot map omega back to w")
    w = solution.omega / eps
    return ThresholdedScorer(w[:-1], w[-1], [0.0])


def max_violation(solution: LPSolution) -> float:
    """Largest constraint or bound violation of the solver output."""
    lp, x = solution.lp, solution.x
    v = [np.max(lp.A_ub @ x - lp.b_ub, initial=0.0),
         np.max(np.abs(lp.A_eq @ x - lp.b_eq), initial=0.0),
         np.max(-x[~lp.free], initial=0.0)]
    return float(max(v))


def fit_f1_lp(data: LabeledDataset) -> tuple[ThresholdedScorer, LPSolution]:
    sol = solve_lp(build_lp(data))
    return recover_scorer(sol), sol
