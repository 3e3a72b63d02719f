import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import multivariate_normal

from calib.synthetic import (
    SYNTHETIC_VARIANTS,
    SyntheticSpec,
    derive_features,
    make_synthetic,
    true_posterior,
    write_truth_csv,
)


def _oracle(points, spec):
    fp = multivariate_normal(spec.positive_mean, spec.positive_cov).pdf(points)
    fn = multivariate_normal(spec.negative_mean, spec.negative_cov).pdf(points)
    return fp / (fp + fn)


@pytest.mark.parametrize("variant", sorted(SYNTHETIC_VARIANTS))
def test_truth_matches_independent_density_ratio(variant):
    spec = SYNTHETIC_VARIANTS[variant]
    ds, truth = make_synthetic(100, 4, spec)
    np.testing.assert_allclose(truth.true_probs, _oracle(truth.raw_points, spec), rtol=0, atol=1e-12)
    np.testing.assert_array_equal(ds.true_probs, truth.true_probs)


def test_shape_and_labels():
    ds, truth = make_synthetic(100, 0)
    assert ds.n_samples == 200 and ds.n_positive == 100
    assert ds.n_features == 5
    assert list(ds.labels[:100]) == [1] * 100
    np.testing.assert_allclose(ds.features, derive_features(truth.raw_points))


def test_classifier_never_sees_raw_coordinates():
    ds, truth = make_synthetic(20, 1)
    for j in range(ds.n_features):
        for k in range(2):
            assert not np.allclose(ds.features[:, j], truth.raw_points[:, k])


def test_equidistant_point_has_half_probability():
    spec = SyntheticSpec()
    mid = (np.asarray(spec.positive_mean) + np.asarray(spec.negative_mean)) / 2
    assert true_posterior(mid[None, :], spec)[0] == pytest.approx(0.5, abs=1e-15)
    # any point on the perpendicular bisector x1 + x2 = 1.5
    assert true_posterior(np.array([[3.0, -1.5]]), spec)[0] == pytest.approx(0.5, abs=1e-12)


def test_bayes_error_is_about_fourteen_percent():
    # shared identity covariance: error = Phi(-d/2) with d = |mu+ - mu-|
    from scipy.stats import norm

    d = np.hypot(1.5, 1.5)
    assert norm.cdf(-d / 2) == pytest.approx(0.144, abs=0.002)


@given(st.lists(st.tuples(st.floats(-8, 8), st.floats(-8, 8)), min_size=1, max_size=20))
def test_truth_in_open_unit_interval_and_label_swap(pts):
    pts = np.array(pts)
    spec = SyntheticSpec()
    p = true_posterior(pts, spec)
    assert np.all((p > 0) & (p < 1))
    swapped = SyntheticSpec(positive_mean=spec.negative_mean, negative_mean=spec.positive_mean)
    np.testing.assert_allclose(true_posterior(pts, swapped), 1 - p, atol=1e-12)


def test_determinism_and_seed_sensitivity():
    a, _ = make_synthetic(30, 9)
    b, _ = make_synthetic(30, 9)
    c, _ = make_synthetic(30, 10)
    np.testing.assert_array_equal(a.features, b.features)
    assert not np.array_equal(a.features, c.features)


def test_too_small():
    with pytest.raises(ValueError):
        make_synthetic(1, 0)


def test_truth_csv(tmp_path):
    _, truth = make_synthetic(3, 0)
    write_truth_csv(truth, tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "row_id,true_prob"
    assert len(lines) == 7
    assert float(lines[1].split(",")[1]) == truth.true_probs[0]
