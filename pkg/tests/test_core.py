import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankopt.core import (DataError, LabeledDataset, ObjectiveSpec, SaddleState,
                          ThresholdedScorer, load_csv, normalize_labels, save_csv, score)


class TestScore:
    def test_dot_product(self):
        assert score(ThresholdedScorer([1, 2], 0.0), [3, 1]) == 5

    def test_zero_weights(self):
        s = ThresholdedScorer([0, 0], 0.5)
        assert score(s, [123.0, -7.0]) == 0.5

    def test_negative(self):
        assert score(ThresholdedScorer([1], 0.0), [-2]) == -2

    def test_threshold_not_subtracted(self):
        assert score(ThresholdedScorer([1.0], 0.0, [10.0]), [1.0]) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            score(ThresholdedScorer([1, 2]), [1, 2, 3])


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.integers(0, 2**31 - 1))
def test_shift_invariance(c, seed):
    # moving bias and every threshold by c leaves classifications alone
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(30, 3))
    s = ThresholdedScorer(rng.normal(size=3), rng.normal(), rng.normal(size=4))
    shifted = ThresholdedScorer(s.weights, s.bias + c, s.thresholds + c)
    for t in range(4):
        # float rounding can flip a point lying within ~1 ulp of its threshold
        margin = np.abs(s.scores(X) - s.thresholds[t])
        keep = margin > 1e-9
        np.testing.assert_array_equal(s.predict(X, t)[keep], shifted.predict(X, t)[keep])


class TestDataset:
    def test_counts_and_prior(self):
        d = LabeledDataset([[0.0], [1.0], [2.0], [3.0]], [1, -1, -1, -1])
        assert (d.n_pos, d.n_neg) == (1, 3)
        assert d.prior == 0.25
        assert len(d) == 4 and d.dim == 1

    def test_zero_one_labels_normalized(self):
        d = LabeledDataset([[0.0], [1.0]], [0, 1])
        np.testing.assert_array_equal(d.y, [-1, 1])

    @pytest.mark.parametrize("labels", [[1, 1, 1], [0, 0, 0], [-1, -1, -1]])
    def test_single_class_rejected(self, labels):
        with pytest.raises(DataError):
            LabeledDataset(np.zeros((3, 1)), labels)

    def test_bad_labels(self):
        with pytest.raises(DataError):
            normalize_labels([0, 1, 2])

    def test_non_finite_rejected(self):
        with pytest.raises(DataError):
            LabeledDataset([[np.nan], [1.0]], [1, -1])

    def test_immutable(self):
        d = LabeledDataset([[0.0], [1.0]], [1, -1])
        with pytest.raises(ValueError):
            d.X[0, 0] = 5.0

    def test_examples_view(self):
        d = LabeledDataset([[0.0, 1.0], [1.0, 2.0]], [1, 0])
        ex = d.examples
        assert [e.label for e in ex] == [1, -1]
        np.testing.assert_array_equal(ex[1].features, [1.0, 2.0])

    def test_split_is_seeded(self, rng):
        d = LabeledDataset(rng.normal(size=(50, 2)), np.r_[np.ones(20), -np.ones(30)])
        a1, b1 = d.split(0.8, seed=3)
        a2, b2 = d.split(0.8, seed=3)
        assert a1 == a2 and b1 == b2
        assert len(a1) == 40 and len(b1) == 10


class TestCsv:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        X = rng.normal(size=(25, 3)) * 10.0 ** rng.integers(-8, 8, size=(25, 3))
        y = np.where(rng.random(25) < 0.5, 1, -1)
        y[:2] = [1, -1]
        d = LabeledDataset(X, y)
        path = tmp_path / "d.csv"
        save_csv(d, path)
        d2 = load_csv(path)
        save_csv(d2, tmp_path / "d2.csv")
        assert d2 == d
        assert (d2.n_pos, d2.n_neg) == (d.n_pos, d.n_neg)
        assert (tmp_path / "d2.csv").read_bytes() == path.read_bytes()

    def test_zero_one_file(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("f0,f1,label\n1,2,1\n3,4,0\n")
        d = load_csv(p)
        np.testing.assert_array_equal(d.y, [1, -1])

    def test_missing_label_column(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("f0,f1\n1,2\n3,4\n")
        with pytest.raises(DataError, match="label"):
            load_csv(p)

    def test_ragged_row(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("f0,label\n1,1\n2\n")
        with pytest.raises(DataError):
            load_csv(p)


class TestModelJson:
    def test_round_trip(self, tmp_path):
        s = ThresholdedScorer([0.1, -2.5], 0.3, [1.0, 2.0])
        s.save(tmp_path / "m.json")
        d = json.loads((tmp_path / "m.json").read_text())
        assert set(d) == {"weights", "bias", "thresholds"}
        s2 = ThresholdedScorer.load(tmp_path / "m.json")
        np.testing.assert_array_equal(s2.weights, s.weights)
        np.testing.assert_array_equal(s2.thresholds, s.thresholds)
        assert s2.bias == s.bias

    def test_missing_field(self):
        with pytest.raises(DataError):
            ThresholdedScorer.from_dict({"weights": [1.0]})


class TestObjectiveSpec:
    def test_rap_target_must_exceed_prior(self):
        spec = ObjectiveSpec("rap", 0.2)
        with pytest.raises(ValueError):
            spec.check_prior(0.3)
        spec.check_prior(0.1)

    @pytest.mark.parametrize("kind,target", [("rap", 1.0), ("rap", 0.0), ("par", 0.0),
                                             ("par", 1.5), ("fbeta", 0.0), ("rap", None)])
    def test_bad_targets(self, kind, target):
        with pytest.raises(ValueError):
            ObjectiveSpec(kind, target)

    def test_par_target_one_allowed(self):
        ObjectiveSpec("par", 1.0)

    def test_anchor_validation(self):
        with pytest.raises(ValueError):
            ObjectiveSpec("aucpr", anchors=[0.2, 0.5, 0.4])
        with pytest.raises(ValueError):
            ObjectiveSpec("aucpr", anchors=[0.2, 1.0])
        assert ObjectiveSpec("aucpr", anchors=[0.2, 0.5, 0.9]).n_thresholds == 2


def test_saddle_state_copy_is_deep():
    s = SaddleState(ThresholdedScorer([1.0]), [1.0])
    c = s.copy()
    c.scorer.weights[0] = 5.0
    c.duals[0] = 9.0
    assert s.scorer.weights[0] == 1.0 and s.duals[0] == 1.0
