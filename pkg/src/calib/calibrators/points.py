"""Calibration points: (score, target, weight) triples fed to every calibrator."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np


class CalibrationPoint(NamedTuple):
    score: float
    target: float
    weight: float = 1.0


@dataclass(frozen=True, eq=False)
class CalibrationPoints:
    """Column-oriented collection of :class:`CalibrationPoint`.

    Targets are 0/1 labels or, after grouping, fractions of positives.
    """

    scores: np.ndarray
    targets: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.scores, dtype=float).ravel()
        t = np.asarray(self.targets, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if not (s.shape == t.shape == w.shape):
            raise ValueError(
                f"scores, targets and weights differ in length: {s.size}, {t.size}, {w.size}"
            )
        if not np.all(np.isfinite(s)):
            raise ValueError("calibration scores must be finite")
        if np.any((t < 0) | (t > 1)) or not np.all(np.isfinite(t)):
            raise ValueError("calibration targets must lie in [0, 1]")
        if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
            raise ValueError("calibration weights must be positive")
        for name, arr in (("scores", s), ("targets", t), ("weights", w)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def from_labels(cls, scores, labels, weights=None) -> "CalibrationPoints":
        scores = np.asarray(scores, dtype=float)
        if weights is None:
            weights = np.ones_like(scores)
        return cls(scores, np.asarray(labels, dtype=float), weights)

    @classmethod
    def from_points(cls, points: Sequence[CalibrationPoint]) -> "CalibrationPoints":
        if not points:
            return cls(np.empty(0), np.empty(0), np.empty(0))
        s, t, w = zip(*points)
        return cls(np.array(s), np.array(t), np.array(w))

    def __len__(self) -> int:
        return self.scores.size

    def __iter__(self) -> Iterator[CalibrationPoint]:
        for s, t, w in zip(self.scores, self.targets, self.weights):
            yield CalibrationPoint(float(s), float(t), float(w))

    def __getitem__(self, idx) -> "CalibrationPoints":
        if isinstance(idx, (int, np.integer)):
            idx = [idx]
        return CalibrationPoints(self.scores[idx], self.targets[idx], self.weights[idx])

    def sorted(self) -> "CalibrationPoints":
        order = np.argsort(self.scores, kind="stable")
        return self[order]

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.targets == 0) | (self.targets == 1)))

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["score", "target", "weight"])
            for p in self:
                writer.writerow([repr(p.score), repr(p.target), repr(p.weight)])

    @classmethod
    def read_csv(cls, path: str | Path) -> "CalibrationPoints":
        with Path(path).open(newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        return cls(
            np.array([float(r["score"]) for r in rows]),
            np.array([float(r["target"]) for r in rows]),
            np.array([float(r["weight"]) for r in rows]),
        )


def as_points(points) -> CalibrationPoints:
    if isinstance(points, CalibrationPoints):
        return points
    return CalibrationPoints.from_points(list(points))


@dataclass(frozen=True, eq=False)
class MergedPoints:
    """Points with tied scores pooled: weighted mean target, summed weight."""

    scores: np.ndarray
    targets: np.ndarray
    weights: np.ndarray
    inverse: np.ndarray  # original point -> merged index


def merge_ties(points: CalibrationPoints) -> MergedPoints:
    uniq, inverse = np.unique(points.scores, return_inverse=True)
    w = np.bincount(inverse, weights=points.weights, minlength=uniq.size)
    wt = np.bincount(inverse, weights=points.weights * points.targets, minlength=uniq.size)
    targets = np.clip(wt / w, 0.0, 1.0)
    return MergedPoints(uniq, targets, w, inverse)


def require_fit_input(points: CalibrationPoints, what: str) -> None:
    if len(points) < 2:
        raise ValueError(f"{what} needs at least 2 calibration points, got {len(points)}")


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise-constant map clamped to its end values outside the knots.

    A score equal to a threshold falls into the lower piece.
    """

    thresholds: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        th = np.asarray(self.thresholds, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.size != th.size + 1:
            raise ValueError("a step function needs exactly one more value than thresholds")
        object.__setattr__(self, "thresholds", th)
        object.__setattr__(self, "values", v)

    def __call__(self, scores) -> np.ndarray:
        idx = np.searchsorted(self.thresholds, np.asarray(scores, dtype=float), side="left")
        return self.values[idx]


def midpoints(sorted_unique: np.ndarray) -> np.ndarray:
    return 0.5 * (sorted_unique[:-1] + sorted_unique[1:])


def compress_steps(knot_scores: np.ndarray, values: np.ndarray) -> StepFunction:
    """Step function over distinct scores, merging neighbours with equal values."""
    th = midpoints(knot_scores)
    keep = np.flatnonzero(values[1:] != values[:-1])
    return StepFunction(th[keep], np.concatenate([values[:1], values[1:][keep]]))
