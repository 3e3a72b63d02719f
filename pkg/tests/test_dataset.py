import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from calib.dataset import (
    Dataset,
    DatasetError,
    EmptyFileError,
    LabelError,
    MissingColumnError,
    MissingValueError,
    NoFeaturesError,
    NonNumericCellError,
    SplitError,
    load_csv,
    split_calibration,
    standardize,
    stratified_holdout_indices,
    stratified_k_fold,
    subsample_class,
    write_csv,
)


def _ds(X, y, name="t"):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return Dataset(X, np.asarray(y), tuple(f"f{i}" for i in range(X.shape[1])), name)


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


# ---- Dataset ----------------------------------------------------------------

def test_dataset_validates_shapes_and_labels():
    with pytest.raises(DatasetError):
        _ds([[1.0], [2.0]], [0, 1, 1])
    with pytest.raises(DatasetError):
        _ds([[1.0], [2.0]], [0, 2])


def test_dataset_arrays_are_read_only():
    ds = _ds([[1.0], [2.0]], [0, 1])
    with pytest.raises(ValueError):
        ds.features[0, 0] = 5.0


def test_flipped_swaps_labels_and_truth():
    ds = Dataset(np.eye(3), np.array([1, 0, 1]), ("a", "b", "c"), "x", np.array([0.9, 0.2, 0.6]))
    f = ds.flipped()
    assert list(f.labels) == [0, 1, 0]
    np.testing.assert_allclose(f.true_probs, [0.1, 0.8, 0.4])


# ---- load_csv ---------------------------------------------------------------

def test_load_csv_basic(tmp_path):
    p = _write(tmp_path, "a,b,cls\n1,2,yes\n3,4,no\n5.5,-1,yes\n")
    ds = load_csv(p, "cls", "yes")
    assert ds.n_samples == 3 and ds.n_features == 2
    assert list(ds.labels) == [1, 0, 1]
    assert ds.feature_names == ("a", "b")
    np.testing.assert_array_equal(ds.features[2], [5.5, -1.0])
    assert ds.name == "d"


def test_load_csv_numeric_positive_label(tmp_path):
    p = _write(tmp_path, "x,y\n1,1.0\n2,0\n")
    assert list(load_csv(p, "y", "1").labels) == [1, 0]


def test_load_csv_roundtrip(tmp_path):
    ds = _ds(np.arange(12.0).reshape(6, 2) / 7, [0, 1, 0, 1, 1, 0])
    write_csv(ds, tmp_path / "r.csv")
    back = load_csv(tmp_path / "r.csv", "label", "1")
    np.testing.assert_array_equal(back.features, ds.features)
    np.testing.assert_array_equal(back.labels, ds.labels)


@pytest.mark.parametrize(
    "text, err",
    [
        ("", EmptyFileError),
        ("a,cls\n", EmptyFileError),
        ("a,b\n1,2\n", MissingColumnError),
        ("cls\nyes\n", NoFeaturesError),
        ("a,cls\nfoo,yes\n2,no\n", NonNumericCellError),
        ("a,cls\n1,a\n2,b\n3,c\n", LabelError),
        ("a,cls\n1,no\n2,no\n", LabelError),
        ("a,cls\n1,yes\n2,yes\n", LabelError),
    ],
)
def test_load_csv_errors(tmp_path, text, err):
    with pytest.raises(err):
        load_csv(_write(tmp_path, text), "cls", "yes")


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "nope.csv", "cls", "yes")


def test_load_csv_drops_rows_with_missing_cells(tmp_path):
    p = _write(tmp_path, "a,b,cls\n1,2,yes\n,4,no\n3,NA,no\n5,6,no\n7,?,yes\n")
    ds = load_csv(p, "cls", "yes")
    np.testing.assert_array_equal(ds.features, [[1, 2], [5, 6]])
    with pytest.raises(MissingValueError):
        load_csv(p, "cls", "yes", on_missing="error")


def test_load_csv_bundled_data():
    ds = load_csv("data/breast_cancer.csv", "diagnosis", "malignant")
    assert (ds.n_samples, ds.n_features, ds.n_positive) == (569, 30, 212)
    ds = load_csv("data/anes96.csv", "vote", "1")
    assert (ds.n_samples, ds.n_features, ds.n_positive) == (944, 10, 393)


# ---- standardize ------------------------------------------------------------

def test_standardize_sample_sd_convention():
    train = _ds([1.0, 2.0, 3.0], [0, 1, 0])
    out, _, params = standardize(train)
    np.testing.assert_allclose(out.features[:, 0], [-1.0, 0.0, 1.0], atol=1e-12)
    assert params.std_devs[0] == pytest.approx(1.0)


def test_standardize_drops_constant_column_everywhere():
    train = _ds([[1, 5], [2, 5], [3, 5]], [0, 1, 0])
    test = _ds([[4, 7]], [1])
    out, (t2,), params = standardize(train, [test])
    assert out.n_features == 1 and t2.n_features == 1
    assert list(params.kept_columns) == [0]
    assert out.feature_names == ("f0",)


def test_standardize_all_constant_is_an_error():
    with pytest.raises(DatasetError):
        standardize(_ds([[5.0], [5.0], [5.0]], [0, 1, 0]))


def test_standardize_train_mean_maps_to_zero():
    rng = np.random.default_rng(0)
    train = _ds(rng.normal(3, 2, (20, 3)), rng.integers(0, 2, 20))
    mean_row = _ds(train.features.mean(axis=0)[None, :], [1])
    _, (z,), _ = standardize(train, [mean_row])
    np.testing.assert_allclose(z.features, 0.0, atol=1e-12)


def test_standardize_uses_training_rows_only():
    rng = np.random.default_rng(1)
    train = _ds(rng.normal(0, 1, (30, 2)), rng.integers(0, 2, 30))
    test = _ds(rng.normal(100, 50, (10, 2)), rng.integers(0, 2, 10))
    _, _, p1 = standardize(train, [test])
    _, _, p2 = standardize(train)
    np.testing.assert_array_equal(p1.means, p2.means)
    np.testing.assert_array_equal(p1.std_devs, p2.std_devs)


@given(st.integers(0, 10_000), st.integers(3, 40), st.integers(1, 5))
def test_standardize_moments_and_idempotence(seed, n, d):
    rng = np.random.default_rng(seed)
    X = rng.normal(rng.normal(0, 5, d), rng.uniform(0.1, 10, d), (n, d))
    out, _, _ = standardize(_ds(X, rng.integers(0, 2, n)))
    np.testing.assert_allclose(out.features.mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(out.features.var(axis=0, ddof=1), 1.0, atol=1e-9)
    again, _, _ = standardize(out)
    assert np.max(np.abs(again.features - out.features)) <= 1e-9


# ---- folds ------------------------------------------------------------------

def test_k_fold_748_rows_table_sizes():
    y = np.array([1] * 180 + [0] * 568)
    plan = stratified_k_fold(_ds(np.zeros((748, 1)), y), 10, 3)
    for f in range(10):
        idx = plan.test_indices(f)
        assert 74 <= idx.size <= 75
        assert 17 <= y[idx].sum() <= 19


def test_k_fold_exact_divisibility():
    y = np.array([1] * 10 + [0] * 10)
    plan = stratified_k_fold(_ds(np.zeros((20, 1)), y), 10, 0)
    for f in range(10):
        idx = plan.test_indices(f)
        assert sorted(y[idx]) == [0, 1]


def test_k_fold_small_class_error_names_class():
    y = np.array([1] * 3 + [0] * 20)
    with pytest.raises(SplitError, match="class 1"):
        stratified_k_fold(_ds(np.zeros((23, 1)), y), 5, 0)


@given(st.integers(2, 12), st.integers(0, 60), st.integers(0, 60), st.integers(0, 2**31))
def test_k_fold_partition_and_balance(k, extra_pos, extra_neg, seed):
    n_pos, n_neg = k + extra_pos, k + extra_neg
    y = np.array([1] * n_pos + [0] * n_neg)
    ds = _ds(np.zeros((y.size, 1)), y)
    plan = stratified_k_fold(ds, k, seed)
    assert sorted(np.unique(plan.assignments)) == list(range(k))
    sizes = np.bincount(plan.assignments, minlength=k)
    assert sizes.max() - sizes.min() <= 1
    # remainder in the lowest-index folds
    assert np.all(np.diff(sizes) <= 0)
    pos = np.bincount(plan.assignments[y == 1], minlength=k)
    assert np.all(np.abs(pos - n_pos / k) <= 1)
    again = stratified_k_fold(ds, k, seed)
    np.testing.assert_array_equal(plan.assignments, again.assignments)
    for f, tr, te in plan.splits():
        assert np.intersect1d(tr, te).size == 0 and tr.size + te.size == y.size


# ---- calibration split ------------------------------------------------------

@pytest.mark.parametrize("n_train, expected", [(673, 67), (949, 94), (950, 95), (1325, 132)])
def test_split_calibration_floor_sizes(n_train, expected):
    y = np.array([1] * (n_train // 3) + [0] * (n_train - n_train // 3))
    model, cal = split_calibration(_ds(np.arange(n_train, dtype=float), y), 0.10, 5)
    assert cal.n_samples == expected
    assert model.n_samples + cal.n_samples == n_train


def test_split_calibration_half_of_ten():
    y = np.array([1] * 5 + [0] * 5)
    model, cal = split_calibration(_ds(np.arange(10.0), y), 0.5, 0)
    assert cal.n_samples == 5 and model.n_samples == 5
    assert abs(cal.n_positive - 2.5) <= 0.5


def test_split_calibration_disjoint_and_complete():
    y = np.array([1] * 30 + [0] * 70)
    ds = _ds(np.arange(100.0), y)
    model, cal = split_calibration(ds, 0.2, 11)
    values = np.concatenate([model.features[:, 0], cal.features[:, 0]])
    assert sorted(values) == list(range(100))
    assert cal.n_positive == 6


def test_split_calibration_errors():
    with pytest.raises(SplitError):
        split_calibration(_ds(np.arange(5.0), [1, 0, 0, 0, 1]), 0.1, 0)  # empty
    with pytest.raises(SplitError):
        split_calibration(_ds(np.arange(12.0), [1] + [0] * 11), 0.1, 0)  # single class
    with pytest.raises(SplitError):
        split_calibration(_ds(np.arange(4.0), [0, 0, 0, 0]), 0.5, 0)


@given(st.integers(1, 80), st.integers(1, 80), st.floats(0.05, 0.95), st.integers(0, 2**31))
def test_holdout_counts(n_pos, n_neg, frac, seed):
    y = np.array([1] * n_pos + [0] * n_neg)
    keep, hold = stratified_holdout_indices(y, frac, np.random.default_rng(seed))
    assert hold.size == math.floor(frac * y.size)
    assert np.union1d(keep, hold).size == y.size and np.intersect1d(keep, hold).size == 0
    assert abs(y[hold].sum() - frac * n_pos) < 1 + 1e-9


# ---- subsampling ------------------------------------------------------------

def test_subsample_class_counts_and_determinism():
    y = np.array([1] * 800 + [0] * 750)
    ds = _ds(np.arange(1550.0), y)
    sub = subsample_class(ds, 1, 25, 7)
    assert sub.n_positive == 25 and sub.n_samples == 775
    assert sub.positive_fraction == pytest.approx(25 / 775)
    np.testing.assert_array_equal(sub.features, subsample_class(ds, 1, 25, 7).features)
    neg = np.sort(sub.features[sub.labels == 0, 0])
    np.testing.assert_array_equal(neg, np.arange(800, 1550))


def test_subsample_full_class_is_a_permutation():
    y = np.array([1, 0, 1, 0, 1])
    ds = _ds(np.arange(5.0), y)
    sub = subsample_class(ds, 1, 3, 0)
    assert sorted(sub.features[:, 0]) == [0, 1, 2, 3, 4]


def test_subsample_too_many_is_an_error():
    with pytest.raises(SplitError):
        subsample_class(_ds(np.arange(4.0), [1, 0, 1, 0]), 1, 3, 0)


@pytest.mark.parametrize("cls", [1, 0])
def test_subsample_rescales_known_posteriors_to_new_prior(cls):
    from scipy.stats import multivariate_normal

    from calib.synthetic import SyntheticSpec, make_synthetic

    spec = SyntheticSpec()
    ds, truth = make_synthetic(60, 2, spec)
    raw = Dataset(truth.raw_points, ds.labels, ("x1", "x2"), "raw", ds.true_probs)
    sub = subsample_class(raw, cls, 9, 4)
    n_pos, n_neg = sub.n_positive, sub.n_samples - sub.n_positive
    fp = multivariate_normal(spec.positive_mean, spec.positive_cov).pdf(sub.features)
    fn = multivariate_normal(spec.negative_mean, spec.negative_cov).pdf(sub.features)
    expect = n_pos * fp / (n_pos * fp + n_neg * fn)
    np.testing.assert_allclose(sub.true_probs, expect, atol=1e-12)
