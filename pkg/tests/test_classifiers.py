import numpy as np
import pytest
from scipy.stats import norm

from calib.classifiers import (
    ClassifierSpec,
    default_mtry,
    fit_classifier,
    fit_naive_bayes,
    fit_random_forest,
    oob_error,
    predict_score,
    tune_mtry,
)
from calib.classifiers import _tree
from calib.classifiers.forest import _bootstrap
from calib.dataset import Dataset
from calib.synthetic import make_synthetic


def _ds(X, y, name="t"):
    X = np.asarray(X, dtype=float)
    return Dataset(X, np.asarray(y), tuple(f"f{i}" for i in range(X.shape[1])), name)


def _rf(ntree=25, mtry=None, seed=0):
    return ClassifierSpec("random_forest", rf_ntree=ntree, rf_mtry=mtry, seed=seed)


# ---- naive Bayes ------------------------------------------------------------

def test_nb_closed_form_four_points():
    ds = _ds([[0.0], [2.0], [3.0], [5.0]], [0, 0, 1, 1])
    m = fit_naive_bayes(ds)
    np.testing.assert_allclose(m.priors, [0.5, 0.5])
    np.testing.assert_allclose(m.means[:, 0], [1.0, 4.0])
    np.testing.assert_allclose(m.variances[:, 0], [1.0, 1.0])
    for x in (-1.0, 2.5, 4.2):
        fp, fn = norm.pdf(x, 4, 1), norm.pdf(x, 1, 1)
        assert predict_score(m, [x]) == pytest.approx(fp / (fp + fn), abs=1e-12)
    assert predict_score(m, [2.5]) == pytest.approx(0.5, abs=1e-15)


def test_nb_label_flip_gives_complement():
    ds, _ = make_synthetic(40, 3)
    flipped = _ds(ds.features, 1 - ds.labels)
    a = fit_naive_bayes(ds).predict_scores(ds.features)
    b = fit_naive_bayes(flipped).predict_scores(ds.features)
    np.testing.assert_allclose(a + b, 1.0, atol=1e-12)


def test_nb_separates_and_handles_constant_feature():
    X = np.column_stack([np.r_[np.zeros(10), np.ones(10)] + 0.01 * np.arange(20), np.full(20, 3.0)])
    m = fit_naive_bayes(_ds(X, [0] * 10 + [1] * 10))
    s = m.predict_scores(X)
    assert np.all(np.isfinite(s))
    assert np.all(s[:10] < 0.5) and np.all(s[10:] > 0.5)


def test_nb_needs_both_classes():
    with pytest.raises(ValueError):
        fit_naive_bayes(_ds([[1.0], [2.0]], [1, 1]))


# ---- random forest ----------------------------------------------------------

def test_presorted_kernel_matches_reference_kernel():
    ds, _ = make_synthetic(60, 5)
    X = np.ascontiguousarray(ds.features)
    y = ds.labels.astype(np.int64)
    boot, seeds = _bootstrap(ds.n_samples, 12, 7)
    fast = _tree.fit_trees(X, y, boot, seeds, 2, 1)
    ref = _tree.fit_trees_reference(X, y, boot, seeds, 2, 1)
    grid = np.random.default_rng(0).normal(size=(300, X.shape[1])) * 2
    for Z in (X, np.ascontiguousarray(grid)):
        np.testing.assert_array_equal(_tree.tree_votes(Z, *fast[:5]), _tree.tree_votes(Z, *ref[:5]))


def test_bootstrap_rows_and_oob_fraction():
    ds, _ = make_synthetic(100, 1)
    m, oob = fit_random_forest(ds, _rf(ntree=200, mtry=2))
    assert m.boot.shape == (200, ds.n_samples)
    out = (m.inbag_counts() == 0).mean()
    assert 0.33 <= out <= 0.41
    assert oob.defined.all()


def test_oob_scores_brute_force_recount():
    ds, _ = make_synthetic(15, 2)
    m, oob = fit_random_forest(ds, _rf(ntree=8, mtry=2))
    votes = m.votes(ds.features)
    for i in range(ds.n_samples):
        trees = [t for t in range(m.ntree) if i not in set(m.boot[t].tolist())]
        assert oob.n_trees[i] == len(trees)
        if trees:
            assert oob.scores[i] == pytest.approx(np.mean([votes[t, i] for t in trees]))
        else:
            assert np.isnan(oob.scores[i])


def test_leaf_ties_vote_negative():
    # identical rows cannot be split: each tree votes for the in-bag majority
    ds = _ds([[0.0], [0.0], [0.0]], [0, 1, 1])
    m, _ = fit_random_forest(ds, _rf(ntree=60, mtry=1))
    votes = m.votes(np.zeros((1, 1)))[:, 0]
    pos = ds.labels[m.boot].sum(axis=1)
    expect = (2 * pos > ds.n_samples).astype(votes.dtype)
    np.testing.assert_array_equal(votes, expect)
    ds2 = _ds([[0.0], [0.0]], [0, 1])
    m2, _ = fit_random_forest(ds2, _rf(ntree=60, mtry=1))
    v2 = m2.votes(np.zeros((1, 1)))[:, 0]
    np.testing.assert_array_equal(v2, (ds2.labels[m2.boot].sum(axis=1) == 2).astype(v2.dtype))


def test_forest_determinism_and_seed():
    ds, _ = make_synthetic(40, 0)
    a, _ = fit_random_forest(ds, _rf(seed=11, mtry=2))
    b, _ = fit_random_forest(ds, _rf(seed=11, mtry=2))
    c, _ = fit_random_forest(ds, _rf(seed=12, mtry=2))
    np.testing.assert_array_equal(a.predict_scores(ds.features), b.predict_scores(ds.features))
    assert not np.array_equal(a.boot, c.boot)


def test_forest_learns_pure_signal():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(200, 4))
    y = (X[:, 0] > 0).astype(int)
    m, oob = fit_random_forest(_ds(X, y), _rf(ntree=50, mtry=2))
    s = m.predict_scores(X)
    assert np.mean((s > 0.5) == y) >= 0.95
    assert oob_error(oob, y) < 0.1
    assert np.all((s >= 0) & (s <= 1))


def test_tune_mtry_matches_exhaustive_hill_climb():
    ds, _ = make_synthetic(50, 6)
    spec = _rf(ntree=30, seed=3)
    trace = []
    chosen = tune_mtry(ds, spec, trace)
    errs = {}
    for m in range(1, ds.n_features + 1):
        _, oob = fit_random_forest(ds, spec.with_mtry(m))
        errs[m] = oob_error(oob, ds.labels)
    assert trace[0][0] == default_mtry(ds.n_features)
    for m, e in trace:
        assert e == errs[m]
    # the choice is the smallest best among the evaluated candidates
    seen = dict(trace)
    assert chosen == min(m for m in seen if seen[m] == min(seen.values()))
    # candidates move in steps of two from the start
    assert all((m - trace[0][0]) % 2 == 0 or m in (1, ds.n_features) for m, _ in trace)


def test_tune_mtry_skipped_for_few_features():
    ds = _ds(np.random.default_rng(0).normal(size=(20, 2)), [0, 1] * 10)
    assert tune_mtry(ds, _rf()) == 1
    model, _ = fit_classifier(ds, _rf(ntree=5))
    assert model.mtry == 1


def test_predict_score_shape_errors():
    ds, _ = make_synthetic(10, 0)
    for model in (fit_naive_bayes(ds), fit_random_forest(ds, _rf(ntree=3, mtry=2))[0]):
        with pytest.raises(ValueError):
            predict_score(model, np.zeros(ds.n_features + 1))
        with pytest.raises(ValueError):
            predict_score(model, np.zeros((1, ds.n_features)))
        assert 0 <= predict_score(model, ds.features[0]) <= 1


def test_spec_validation():
    with pytest.raises(ValueError):
        ClassifierSpec("svm")
    with pytest.raises(ValueError):
        ClassifierSpec("random_forest", rf_ntree=0)
    with pytest.raises(ValueError):
        _rf(mtry=9).resolved_mtry(5)


def test_fit_classifier_oob_switch():
    ds, _ = make_synthetic(20, 0)
    _, oob = fit_classifier(ds, _rf(ntree=5, mtry=2), with_oob=False)
    assert oob is None
    _, oob = fit_classifier(ds, _rf(ntree=5, mtry=2))
    assert oob.scores.shape == (ds.n_samples,)
    assert fit_classifier(ds, ClassifierSpec())[1] is None
