import numpy as np
import pytest
from scipy.optimize import linprog

from rankopt.bounds import compute_bounds
from rankopt.core import LabeledDataset
from rankopt.fbeta_lp import (DegenerateOptimum, LPSolution, build_lp, fit_f1_lp, max_violation,
                              recover_scorer, solve_lp)
from rankopt.metrics import ScoredSet, confusion_at, exact_fbeta
from rankopt.objectives import fbeta_surrogate

from oracles import grid_max_surrogate_f1


def test_smallest_instance_layout():
    lp = build_lp(LabeledDataset([[1.0], [-1.0]], [1, -1]))
    # tau, phi, omega (weight + bias), eps
    assert lp.n_vars == 5
    # 3 inequality rows plus the bounds phi >= 0, eps >= 0
    assert lp.A_ub.shape == (3, 5) and lp.A_eq.shape == (1, 5)
    assert int(np.sum(~lp.free)) == 2


def test_smallest_instance_optimum():
    model, sol = fit_f1_lp(LabeledDataset([[1.0], [-1.0]], [1, -1]))
    assert sol.objective == pytest.approx(2.0)
    assert sol.surrogate_f1() == pytest.approx(1.0)
    # any w >= 1 with zero bias reaches the optimum
    assert model.weights[0] >= 1 - 1e-9 and model.bias == pytest.approx(0.0, abs=1e-9)


def test_no_negatives():
    X = np.array([[1.0], [2.0], [0.5]])
    sol = solve_lp(build_lp((X, np.ones(3))))
    assert sol.phi.size == 0
    assert sol.surrogate_f1() == pytest.approx(1.0)


def test_no_positives_rejected():
    with pytest.raises(ValueError):
        build_lp((np.zeros((2, 1)), -np.ones(2)))


def test_bias_only():
    data = LabeledDataset(np.zeros((3, 0)), [1, 1, -1])
    sol = solve_lp(build_lp(data))
    best, _ = grid_max_surrogate_f1(data.X, data.y)
    assert sol.surrogate_f1() == pytest.approx(best, abs=1e-6)
    assert sol.omega.size == 1


def test_separable_1d_exact_f1():
    data = LabeledDataset([[1.0], [2.0], [-1.0], [-2.0]], [1, 1, -1, -1])
    model, _ = fit_f1_lp(data)
    tp, fp, fn, _ = confusion_at(ScoredSet.from_model(model, data), 0.0)
    assert exact_fbeta(tp, fp, fn, 1.0) == 1.0
    # grid oracle over w agrees
    best, _ = grid_max_surrogate_f1(data.X, data.y)
    assert best == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(15))
def test_matches_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    n, d = 6, int(rng.integers(1, 3))
    y = np.array([1, 1, 1, -1, -1, -1])
    X = rng.normal(size=(n, d)) + 0.7 * y[:, None]
    sol = solve_lp(build_lp(LabeledDataset(X, y)))
    best, _ = grid_max_surrogate_f1(X, y)
    assert sol.surrogate_f1() == pytest.approx(best, abs=1e-3)


@pytest.mark.parametrize("seed", range(10))
def test_recovered_model_attains_optimum(seed):
    rng = np.random.default_rng(100 + seed)
    y = np.where(rng.random(12) < 0.5, 1, -1)
    y[:2] = [1, -1]
    data = LabeledDataset(rng.normal(size=(12, 2)) + y[:, None], y)
    model, sol = fit_f1_lp(data)
    assert max_violation(sol) < 1e-9
    f = fbeta_surrogate(compute_bounds(model, 0, data), data.n_pos, 1.0)
    assert f == pytest.approx(sol.surrogate_f1(), abs=1e-8)
    ref = linprog(sol.lp.c, A_ub=sol.lp.A_ub, b_ub=sol.lp.b_ub, A_eq=sol.lp.A_eq,
                  b_eq=sol.lp.b_eq, bounds=[(None, None) if f else (0, None) for f in sol.lp.free],
                  method="highs")
    assert sol.objective == pytest.approx(ref.fun, abs=1e-8)


def test_scaled_features():
    # scaling every feature by 2 halves the optimal weights and keeps the value
    rng = np.random.default_rng(4)
    y = np.array([1, 1, 1, -1, -1, -1, -1])
    X = rng.normal(size=(7, 2)) + y[:, None]
    a = solve_lp(build_lp(LabeledDataset(X, y)))
    b = solve_lp(build_lp(LabeledDataset(2 * X, y)))
    assert a.objective == pytest.approx(b.objective, abs=1e-9)


def test_recover_scorer():
    lp = build_lp(LabeledDataset([[1.0], [-1.0]], [1, -1]))
    x = np.zeros(lp.n_vars)
    x[2:4] = [2.0, 1.0]
    x[4] = 0.5
    m = recover_scorer(LPSolution(x, 0.0, lp))
    np.testing.assert_allclose(np.r_[m.weights, m.bias], [4.0, 2.0])
    x[4] = 1.0
    m = recover_scorer(LPSolution(x, 0.0, lp))
    np.testing.assert_allclose(np.r_[m.weights, m.bias], [2.0, 1.0])
    x[4] = 0.0
    with pytest.raises(DegenerateOptimum):
        recover_scorer(LPSolution(x, 0.0, lp))


def test_dump_lists_rows():
    lp = build_lp(LabeledDataset([[1.0], [-1.0]], [1, -1]))
    text = lp.dump().splitlines()
    assert text[0].startswith("minimize")
    assert len(text) == 1 + 1 + 3 + 1
    assert text[-1] == "bounds phi0 >= 0 eps >= 0"
