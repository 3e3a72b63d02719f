"""Gaussian naive Bayes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset

VAR_FLOOR_REL = 1e-9
VAR_FLOOR_ABS = 1e-12


@dataclass(frozen=True, eq=False)
class NaiveBayesModel:
    """Per-class priors and per-class, per-feature normal parameters.

    Row 0 of ``means``/``variances`` is the negative class, row 1 the positive.
    """

    priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    kind = "naive_bayes"

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def log_odds(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        ll = []
        for c in (0, 1):
            v = self.variances[c]
            ll.append(
                np.log(self.priors[c])
                - 0.5 * np.sum(np.log(2 * np.pi * v) + (X - self.means[c]) ** 2 / v, axis=1)
            )
        return ll[1] - ll[0]

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        z = self.log_odds(X)
        # numerically stable logistic
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out


def fit_naive_bayes(ds: Dataset) -> NaiveBayesModel:
    """Fit class priors and maximum-likelihood per-class means and variances."""
    if ds.n_features < 1:
        raise ValueError("naive Bayes needs at least one feature")
    counts = np.bincount(ds.labels, minlength=2)
    if counts.min() == 0:
        raise ValueError(f"{ds.name}: naive Bayes needs both classes, got counts {counts}")
    floor = np.maximum(VAR_FLOOR_REL * ds.features.var(axis=0), VAR_FLOOR_ABS)
    means = np.empty((2, ds.n_features))
    variances = np.empty((2, ds.n_features))
    for c in (0, 1):
        Xc = ds.features[ds.labels == c]
        means[c] = Xc.mean(axis=0)
        variances[c] = np.maximum(Xc.var(axis=0), floor)
    return NaiveBayesModel(priors=counts / counts.sum(), means=means, variances=variances)
