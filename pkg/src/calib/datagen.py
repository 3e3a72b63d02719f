"""Calibration-data generation for small training sets.

DG repeatedly holds out a stratified slice of the training set, refits the
classifier on the rest and records (holdout score, holdout label) pairs,
which is Monte Carlo cross-validation run until enough pairs exist. DGG then
sorts those pairs by score and replaces each run of ``group_size`` pairs by
its mean score and fraction of positives, which smooths the labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import derive_seed
from .calibrators.points import CalibrationPoints
from .classifiers import ClassifierSpec, fit_classifier
from .dataset import Dataset, stratified_holdout_indices


class DataGenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class DgConfig:
    n_points: int = 2000
    holdout_fraction: float = 0.1
    seed: int = 0
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)

    def __post_init__(self) -> None:
        if self.n_points < 1:
            raise ValueError("n_points must be at least 1")
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ValueError("holdout_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class DggConfig:
    group_size: int = 20

    def __post_init__(self) -> None:
        if self.group_size < 1:
            raise ValueError("group_size must be at least 1")


def dg_generate(train: Dataset, cfg: DgConfig) -> CalibrationPoints:
    """Collect exactly ``cfg.n_points`` (score, label) pairs by repeated holdouts.

    Iteration ``i`` draws its split and its classifier seed from
    ``(cfg.seed, i)``, so the output is fixed by the seed. Random forests
    should arrive with ``rf_mtry`` already set; otherwise every refit tunes.
    """
    if train.n_positive in (0, train.n_samples):
        raise DataGenerationError(f"{train.name}: both classes are needed to generate data")
    scores: list[np.ndarray] = []
    labels: list[np.ndarray] = []
    collected = 0
    i = 0
    while collected < cfg.n_points:
        rng = np.random.default_rng(derive_seed(cfg.seed, i, "split"))
        keep, hold = stratified_holdout_indices(train.labels, cfg.holdout_fraction, rng)
        if hold.size == 0:
            raise DataGenerationError(
                f"holdout of {cfg.holdout_fraction} x {train.n_samples} rows is empty"
            )
        spec = cfg.classifier.with_seed(derive_seed(cfg.seed, i, "classifier"))
        try:
            model, _ = fit_classifier(train.subset(keep), spec, with_oob=False)
        except Exception as exc:
            raise DataGenerationError(f"classifier fit failed in DG iteration {i}: {exc}") from exc
        scores.append(model.predict_scores(train.features[hold]))
        labels.append(train.labels[hold])
        collected += hold.size
        i += 1
    s = np.concatenate(scores)[: cfg.n_points]
    y = np.concatenate(labels)[: cfg.n_points]
    return CalibrationPoints.from_labels(s, y)


def group_bounds(n: int, group_size: int) -> np.ndarray:
    """Start offsets of each group plus the end offset ``n``.

    A trailing remainder of at least half a group forms its own group;
    a smaller one joins the previous group.
    """
    if n < group_size:
        raise ValueError(f"{n} points cannot form a group of {group_size}")
    n_full, rem = divmod(n, group_size)
    starts = list(range(0, n_full * group_size, group_size))
    if rem and 2 * rem >= group_size:
        starts.append(n_full * group_size)
    return np.array(starts + [n])


def dgg_group(points: CalibrationPoints, cfg: DggConfig) -> CalibrationPoints:
    """Group score-sorted points into (mean score, positive fraction, group size)."""
    pts = points.sorted()
    bounds = group_bounds(len(pts), cfg.group_size)
    starts = bounds[:-1]
    counts = np.diff(bounds).astype(float)
    mean_scores = np.add.reduceat(pts.scores, starts) / counts
    fractions = np.add.reduceat(pts.targets, starts) / counts
    return CalibrationPoints(mean_scores, np.clip(fractions, 0.0, 1.0), counts)
