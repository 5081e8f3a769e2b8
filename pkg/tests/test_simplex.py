import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from rankopt.simplex import Infeasible, LPError, Unbounded, simplex


def test_textbook():
    # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
    res = simplex([-3, -5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    np.testing.assert_allclose(res.x, [2, 6])
    assert res.objective == pytest.approx(-36)


def test_beale_cycling_example():
    # cycles under the textbook largest-coefficient rule; Bland's rule terminates
    c = [-0.75, 20, -0.5, 6]
    A = [[0.25, -8, -1, 9], [0.5, -12, -0.5, 3], [0, 0, 1, 0]]
    res = simplex(c, A, [0, 0, 1])
    assert res.objective == pytest.approx(-1.25)
    np.testing.assert_allclose(res.x, [1, 0, 1, 0], atol=1e-12)


def test_equality_and_free():
    # min x + y, x + y = 1 with x free, y >= 0 and x >= -3 via a row
    res = simplex([1, 2], [[-1, 0]], [3], [[1, 1]], [1], free=[True, False])
    np.testing.assert_allclose(res.x, [1, 0])


def test_negative_rhs():
    # x >= 2 written as -x <= -2
    res = simplex([1], [[-1]], [-2])
    assert res.x[0] == pytest.approx(2)


def test_infeasible():
    with pytest.raises(Infeasible):
        simplex([1, 1], [[1, 1]], [-1])


def test_unbounded():
    with pytest.raises(Unbounded):
        simplex([-1, 0], [[0, 1]], [1])


def test_errors_share_base():
    assert issubclass(Infeasible, LPError) and issubclass(Unbounded, LPError)


def test_redundant_equalities():
    res = simplex([1, 1], A_eq=[[1, 1], [2, 2]], b_eq=[1, 2])
    assert res.objective == pytest.approx(1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_highs(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(2, 7)), int(rng.integers(1, 7))
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0, 1, size=n)
    b = A @ x0 + rng.uniform(0, 1, size=m)   # x0 feasible
    c = rng.normal(size=n)
    ref = linprog(c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs")
    if ref.status == 3:
        with pytest.raises(Unbounded):
            simplex(c, A, b)
        return
    res = simplex(c, A, b)
    assert res.objective == pytest.approx(ref.fun, abs=1e-8)
    assert np.max(A @ res.x - b) <= 1e-9 and np.min(res.x) >= -1e-12
