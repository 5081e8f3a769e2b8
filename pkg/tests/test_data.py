import numpy as np
import pytest

from rankopt.data import Generator, SyntheticSpec, generate
from rankopt.metrics import ScoredSet, average_precision


@pytest.mark.parametrize("gen", [g.value for g in Generator])
def test_deterministic(gen):
    spec = SyntheticSpec(gen, 30, 70, 3, 1.0, seed=5)
    a, b = generate(spec), generate(spec)
    assert a == b
    assert (a.n_pos, a.n_neg, a.dim) == (30, 70, 3)


def test_seed_changes_data():
    assert generate(SyntheticSpec(seed=1)) != generate(SyntheticSpec(seed=2))


def test_separable_by_construction():
    d = generate(SyntheticSpec("separable", 50, 150, 4, 0.0, seed=3))
    # the least-squares direction is not max-margin but the gap is wide enough
    w = np.linalg.lstsq(np.c_[d.X, np.ones(len(d))], d.y.astype(float), rcond=None)[0]
    s = d.X @ w[:-1] + w[-1]
    scored = ScoredSet.from_arrays(s, d.y)
    assert average_precision(scored) == 1.0
    assert s[d.y > 0].min() > s[d.y < 0].max()


def test_fig1_shape():
    d = generate(SyntheticSpec())
    assert (d.n_pos, d.n_neg, d.dim) == (400, 1600, 2)
    assert d.prior == 0.2


@pytest.mark.parametrize("kw", [{"n_pos": 0}, {"dimension": 0}, {"overlap": -1.0},
                                {"generator": "two_gaussians_fig1", "dimension": 1},
                                {"generator": "nope"}])
def test_invalid(kw):
    with pytest.raises(ValueError):
        SyntheticSpec(**kw)


def test_uniform_noise_counts():
    d = generate(SyntheticSpec("uniform_noise", 10, 90, 2, 0.3, seed=0))
    assert d.n_pos == 10 and np.all(np.abs(d.X) <= 1)
