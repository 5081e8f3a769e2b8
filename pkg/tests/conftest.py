import numpy as np
import pytest

from rankopt.core import LabeledDataset, SaddleState, ThresholdedScorer
from rankopt.metrics import ScoredSet


@pytest.fixture
def four_point_scored():
    """Scores {0.9:+, 0.8:-, 0.7:+, 0.6:-}."""
    return ScoredSet.from_arrays([0.9, 0.8, 0.7, 0.6], [1, -1, 1, -1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_dataset(rng, n=None, d=None, shift=1.0):
    n = n or int(rng.integers(4, 60))
    d = d or int(rng.integers(1, 5))
    y = np.where(rng.random(n) < rng.uniform(0.2, 0.8), 1, -1)
    y[0], y[1] = 1, -1
    X = rng.normal(size=(n, d)) + shift * np.outer(y, rng.normal(size=d))
    return LabeledDataset(X, y)


def random_state(rng, d, K=1, n_duals=None, scale=2.0, psi=None):
    scorer = ThresholdedScorer(rng.normal(scale=scale, size=d), rng.normal(),
                               rng.normal(size=K))
    n_duals = K if n_duals is None else n_duals
    return SaddleState(scorer, rng.uniform(0.0, 3.0, size=n_duals), 0, psi)


def pytest_terminal_summary(terminalreporter):
    lines = getattr(terminalreporter.config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def record_criterion(request):
    """Record one PASS/FAIL line for the acceptance summary."""
    store = request.config.__dict__.setdefault("_acceptance_lines", [])

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        store.append(line)
        print(line)
        return ok

    return record
