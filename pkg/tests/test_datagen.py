import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from calib.calibrators import CalibrationPoints
from calib.classifiers import ClassifierSpec
from calib.datagen import (
    DataGenerationError,
    DgConfig,
    DggConfig,
    dg_generate,
    dgg_group,
    group_bounds,
)
from calib.dataset import Dataset
from calib.synthetic import make_synthetic


@pytest.fixture(scope="module")
def train():
    ds, _ = make_synthetic(40, 8)
    return ds


@pytest.mark.parametrize("n_points", [1, 7, 100, 333])
def test_dg_returns_exactly_n_points(train, n_points):
    pts = dg_generate(train, DgConfig(n_points=n_points, seed=1))
    assert len(pts) == n_points
    assert pts.is_binary
    assert np.all((pts.scores >= 0) & (pts.scores <= 1))


def test_dg_label_share_tracks_training_share(train):
    pts = dg_generate(train, DgConfig(n_points=800, seed=2))
    assert abs(pts.targets.mean() - train.labels.mean()) <= 0.05


def test_dg_rf_runs_and_is_deterministic(train):
    spec = ClassifierSpec("random_forest", rf_ntree=10, rf_mtry=2)
    a = dg_generate(train, DgConfig(n_points=50, seed=4, classifier=spec))
    b = dg_generate(train, DgConfig(n_points=50, seed=4, classifier=spec))
    c = dg_generate(train, DgConfig(n_points=50, seed=5, classifier=spec))
    np.testing.assert_array_equal(a.scores, b.scores)
    np.testing.assert_array_equal(a.targets, b.targets)
    assert not np.array_equal(a.scores, c.scores)


def test_dg_errors(train):
    one_class = Dataset(train.features[:5], np.ones(5, dtype=int), train.feature_names)
    with pytest.raises(DataGenerationError):
        dg_generate(one_class, DgConfig(n_points=5))
    with pytest.raises(ValueError):
        DgConfig(holdout_fraction=1.0)
    with pytest.raises(ValueError):
        DgConfig(n_points=0)
    with pytest.raises(ValueError):
        DggConfig(group_size=0)


def test_dgg_six_point_example():
    pts = CalibrationPoints.from_labels([0.1, 0.8, 0.2, 0.3, 0.7, 0.5], [0, 1, 1, 0, 0, 1])
    g = dgg_group(pts, DggConfig(group_size=3))
    np.testing.assert_allclose(g.scores, [0.2, 2 / 3], atol=1e-4)
    np.testing.assert_allclose(g.targets, [1 / 3, 2 / 3])
    np.testing.assert_array_equal(g.weights, [3, 3])


def test_group_bounds_remainder_rule():
    np.testing.assert_array_equal(group_bounds(10, 4), [0, 4, 8, 10])  # 2 of 4 forms a group
    np.testing.assert_array_equal(group_bounds(9, 4), [0, 4, 9])  # 1 of 4 joins the last
    np.testing.assert_array_equal(group_bounds(8, 4), [0, 4, 8])
    with pytest.raises(ValueError):
        group_bounds(3, 4)


def test_group_size_one_is_sorted_identity():
    pts = CalibrationPoints.from_labels([0.4, 0.1, 0.9], [1, 0, 1])
    g = dgg_group(pts, DggConfig(group_size=1))
    s = pts.sorted()
    np.testing.assert_array_equal(g.scores, s.scores)
    np.testing.assert_array_equal(g.targets, s.targets)
    np.testing.assert_array_equal(g.weights, [1, 1, 1])


@given(
    st.lists(st.tuples(st.floats(0, 1), st.integers(0, 1)), min_size=1, max_size=60),
    st.integers(1, 12),
)
def test_dgg_conserves_counts_and_positives(rows, k):
    if len(rows) < k:
        return
    s, y = (np.array(a, dtype=float) for a in zip(*rows))
    g = dgg_group(CalibrationPoints.from_labels(s, y), DggConfig(group_size=k))
    assert g.weights.sum() == len(rows)
    assert np.dot(g.weights, g.targets) == pytest.approx(y.sum())
    assert np.dot(g.weights, g.scores) == pytest.approx(s.sum())
    assert np.all(np.diff(g.scores) >= -1e-12)
    half = -(-k // 2)
    assert np.all(g.weights >= half) and np.all(g.weights <= k + half - 1)
    assert np.all(g.weights[:-1] == k)


def test_mixed_groups_have_fractional_targets():
    pts = CalibrationPoints.from_labels(np.linspace(0, 1, 8), [0, 1] * 4)
    g = dgg_group(pts, DggConfig(group_size=4))
    assert np.all((g.targets > 0) & (g.targets < 1))
