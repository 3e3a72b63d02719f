"""Classifiers that produce a positive-class score in [0, 1]."""

from __future__ import annotations

import numpy as np

from ..dataset import Dataset
from .forest import (
    OobScores,
    RandomForestModel,
    default_mtry,
    fit_random_forest,
    oob_error,
    oob_scores,
    tune_mtry,
)
from .naive_bayes import NaiveBayesModel, fit_naive_bayes
from .spec import ClassifierSpec

TrainedClassifier = NaiveBayesModel | RandomForestModel

__all__ = [
    "ClassifierSpec",
    "NaiveBayesModel",
    "OobScores",
    "RandomForestModel",
    "TrainedClassifier",
    "default_mtry",
    "fit_classifier",
    "fit_naive_bayes",
    "fit_random_forest",
    "oob_error",
    "oob_scores",
    "predict_score",
    "tune_mtry",
]


def predict_score(model: TrainedClassifier, x) -> float:
    """Positive-class score of a single feature vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.n_features:
        raise ValueError(f"expected a vector of {model.n_features} features, got shape {x.shape}")
    return float(model.predict_scores(x[None, :])[0])


def fit_classifier(
    ds: Dataset, spec: ClassifierSpec, with_oob: bool = True
) -> tuple[TrainedClassifier, OobScores | None]:
    """Fit ``spec`` on ``ds``. Random forests tune mtry first when it is unset.

    The second element holds OOB scores for forests fitted ``with_oob``.
    """
    if spec.kind == "naive_bayes":
        return fit_naive_bayes(ds), None
    if spec.rf_mtry is None:
        spec = spec.with_mtry(tune_mtry(ds, spec))
    return fit_random_forest(ds, spec, with_oob)
