"""Random forest with bootstrap bookkeeping, Out-of-Bag scores and mtry tuning."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset
from . import _tree
from .spec import ClassifierSpec


@dataclass(frozen=True, eq=False)
class RandomForestModel:
    """A fitted forest.

    ``boot`` holds the bootstrap row indices of every tree (one row per
    tree), so the in-bag multiset of each tree can be audited.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    node_count: np.ndarray
    boot: np.ndarray
    mtry: int
    n_features: int

    kind = "random_forest"

    @property
    def ntree(self) -> int:
        return self.feature.shape[0]

    def votes(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=float)))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        return _tree.tree_votes(X, self.feature, self.threshold, self.left, self.right, self.value)

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        """Fraction of trees voting for the positive class."""
        return self.votes(X).mean(axis=0, dtype=float)

    def inbag_counts(self) -> np.ndarray:
        """How often each training row was drawn, shape (ntree, n_train)."""
        n = self.boot.shape[1]
        counts = np.zeros(self.boot.shape, dtype=np.int32)
        for t in range(self.ntree):
            counts[t] = np.bincount(self.boot[t], minlength=n)
        return counts


@dataclass(frozen=True, eq=False)
class OobScores:
    """Out-of-Bag vote fraction per training row; NaN where no tree left it out."""

    scores: np.ndarray
    n_trees: np.ndarray

    @property
    def defined(self) -> np.ndarray:
        return self.n_trees > 0


def _bootstrap(n: int, ntree: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Bootstrap rows (ntree, n) and a feature-sampling seed for every tree.

    Tree t owns two words of ``SeedSequence(seed)``: word t seeds its
    bootstrap draws, word ntree + t its feature sampling. Each tree's stream
    depends only on (seed, t), so trees could be grown in any order.
    """
    words = np.random.SeedSequence(seed).generate_state(2 * ntree, dtype=np.uint32).astype(np.int64)
    boot = _tree.draw_bootstrap(words[:ntree], n)
    return boot, words[ntree:]


def oob_scores(model: RandomForestModel, X_train: np.ndarray) -> OobScores:
    votes = model.votes(X_train)
    out_of_bag = model.inbag_counts() == 0
    n_trees = out_of_bag.sum(axis=0)
    pos = (votes * out_of_bag).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        scores = np.where(n_trees > 0, pos / np.maximum(n_trees, 1), np.nan)
    return OobScores(scores=scores, n_trees=n_trees)


def fit_random_forest(
    ds: Dataset, spec: ClassifierSpec, with_oob: bool = True
) -> tuple[RandomForestModel, OobScores | None]:
    if ds.n_positive in (0, ds.n_samples):
        raise ValueError(f"{ds.name}: random forest needs both classes")
    mtry = spec.resolved_mtry(ds.n_features)
    boot, seeds = _bootstrap(ds.n_samples, spec.rf_ntree, spec.seed)
    X = np.ascontiguousarray(ds.features)
    y = ds.labels.astype(np.int64)
    arrays = _tree.fit_trees(X, y, boot, seeds, mtry, spec.rf_min_node)
    model = RandomForestModel(*arrays, boot=boot, mtry=mtry, n_features=ds.n_features)
    return model, oob_scores(model, X) if with_oob else None


def oob_error(oob: OobScores, labels: np.ndarray) -> float:
    """Misclassification of the OOB majority vote (ties count as negative)."""
    ok = oob.defined
    if not ok.any():
        return float("nan")
    pred = (oob.scores[ok] > 0.5).astype(int)
    return float(np.mean(pred != labels[ok]))


def default_mtry(n_features: int) -> int:
    return max(1, math.isqrt(n_features))


def tune_mtry(ds: Dataset, spec: ClassifierSpec, trace: list | None = None) -> int:
    """Hill-climb mtry in steps of two on the OOB error.

    Starts at floor(sqrt(p)), tries both neighbours two steps away, then keeps
    stepping in the better direction while the error strictly drops. The
    smallest mtry wins ties. ``trace`` (if given) receives the (mtry, error)
    pairs in evaluation order.
    """
    p = ds.n_features
    start = default_mtry(p)
    if p < 3:
        return start
    errors: dict[int, float] = {}

    def err(m: int) -> float:
        if m not in errors:
            _, oob = fit_random_forest(ds, spec.with_mtry(m))
            errors[m] = oob_error(oob, ds.labels)
            if trace is not None:
                trace.append((m, errors[m]))
        return errors[m]

    current = start
    e0 = err(current)
    down = max(1, current - 2)
    up = min(p, current + 2)
    e_down = err(down) if down != current else math.inf
    e_up = err(up) if up != current else math.inf
    if e_down < e0 and e_down <= e_up:
        step, current = -2, down
    elif e_up < e0:
        step, current = 2, up
    else:
        step = 0
    while step:
        nxt = min(p, max(1, current + step))
        if nxt == current or not err(nxt) < errors[current]:
            break
        current = nxt
    best = min(errors.values())
    return min(m for m, e in errors.items() if e == best)
