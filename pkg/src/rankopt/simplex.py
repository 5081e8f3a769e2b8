"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0`` with
columns flagged ``free`` split into positive and negative parts. Meant for
small problems (a few hundred variables) where an exact vertex is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    pivots: int


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    col_vals = T[:, col].copy()
    col_vals[row] = 0.0
    T -= np.outer(col_vals, T[row])
    basis[row] = col


def _bland(T: np.ndarray, basis: list[int], n_cols: int, tol: float, max_pivots: int,
           allowed: np.ndarray) -> int:
    """Run Bland-rule pivots on tableau ``T`` (last row = reduced costs)."""
    pivots = 0
    m = T.shape[0] - 1
    while True:
        cost = T[-1, :n_cols]
        candidates = np.flatnonzero((cost < -tol) & allowed)
        if candidates.size == 0:
            return pivots
        col = int(candidates[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            raise Unbounded(f"objective unbounded along column {col}")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + tol * max(1.0, abs(best))]
        # Bland: among tied rows leave the basic variable with smallest index
        row = int(tied[np.argmin([basis[r] for r in tied])])
        _pivot(T, basis, row, col)
        pivots += 1
        if pivots > max_pivots:
            raise LPError(f"pivot limit {max_pivots} exceeded")


def simplex(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, free=None,
            tol: float = 1e-10, max_pivots: int = 50_000) -> LPResult:
    c = np.asarray(c, dtype=np.float64)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=np.float64)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=np.float64)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=np.float64)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=np.float64)
    free = np.zeros(n, bool) if free is None else np.asarray(free, bool)

    # split free columns: x = x+ - x-
    free_idx = np.flatnonzero(free)
    cs = np.concatenate([c, -c[free_idx]])
    Aub = np.hstack([A_ub, -A_ub[:, free_idx]])
    Aeq = np.hstack([A_eq, -A_eq[:, free_idx]])
    ns = cs.size
    m_ub, m_eq = Aub.shape[0], Aeq.shape[0]

    # standard form with slacks on the inequality rows
    A = np.zeros((m_ub + m_eq, ns + m_ub))
    A[:m_ub, :ns] = Aub
    A[:m_ub, ns:] = np.eye(m_ub)
    A[m_ub:, :ns] = Aeq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1
    b = np.where(neg, -b, b)
    m, n_std = A.shape

    # phase 1: artificial column on every row
    T = np.zeros((m + 1, n_std + m + 1))
    T[:m, :n_std] = A
    T[:m, n_std:n_std + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n_std] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n_std, n_std + m))
    allowed = np.ones(n_std + m, bool)
    pivots = _bland(T, basis, n_std + m, tol, max_pivots, allowed)
    if -T[-1, -1] > 1e-8 * max(1.0, np.abs(b).max(initial=0.0)):
        raise Infeasible(f"phase-1 optimum {-T[-1, -1]:.3e} > 0")

    # drive remaining artificials out of the basis
    for r in range(m):
        if basis[r] >= n_std:
            nz = np.flatnonzero(np.abs(T[r, :n_std]) > tol)
            if nz.size:
                _pivot(T, basis, r, int(nz[0]))
                pivots += 1
    keep = [r for r in range(m) if basis[r] < n_std]
    T = np.vstack([T[keep][:, list(range(n_std)) + [T.shape[1] - 1]], np.zeros(n_std + 1)])
    basis = [basis[r] for r in keep]

    # phase 2: reduced costs of the real objective
    cfull = np.concatenate([cs, np.zeros(m_ub)])
    T[-1, :n_std] = cfull
    T[-1, -1] = 0.0
    for r, j in enumerate(basis):
        T[-1] -= cfull[j] * T[r]
    pivots += _bland(T, basis, n_std, tol, max_pivots, np.ones(n_std, bool))

    xs = np.zeros(n_std)
    for r, j in enumerate(basis):
        xs[j] = T[r, -1]
    x = xs[:n].copy()
    x[free_idx] -= xs[n:ns]
    return LPResult(x, float(c @ x), pivots)
