"""Datasets, CSV ingestion, preprocessing and the fold / calibration splits."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

log = logging.getLogger(__name__)

NZV_THRESHOLD = 1e-8
MISSING_MARKERS = frozenset({"NA", "NAN", "?"})


class DatasetError(ValueError):
    """Base class for invalid dataset input."""


class EmptyFileError(DatasetError):
    pass


class MissingColumnError(DatasetError):
    pass


class NoFeaturesError(DatasetError):
    pass


class NonNumericCellError(DatasetError):
    pass


class MissingValueError(DatasetError):
    pass


class LabelError(DatasetError):
    """Labels are not a two-valued column containing the positive label."""


class SplitError(DatasetError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus binary labels (1 = positive class).

    ``true_probs`` is only set for synthetic data where the posterior of the
    positive class is known exactly; it travels with the rows through every
    subset operation.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    name: str = "dataset"
    true_probs: np.ndarray | None = None

    def __post_init__(self) -> None:
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DatasetError(
                f"labels length {y.shape} does not match {X.shape[0]} feature rows"
            )
        if not np.all((y == 0) | (y == 1)):
            raise LabelError("labels must be exactly 0 or 1")
        if not np.all(np.isfinite(X)):
            raise MissingValueError("features contain missing or non-finite values")
        if len(self.feature_names) != X.shape[1]:
            raise DatasetError(
                f"{len(self.feature_names)} feature names for {X.shape[1]} columns"
            )
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y.astype(np.int8)))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if self.true_probs is not None:
            p = np.asarray(self.true_probs, dtype=float)
            if p.shape != y.shape:
                raise DatasetError("true_probs must align with labels")
            object.__setattr__(self, "true_probs", _frozen(p))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_positive(self) -> int:
        return int(self.labels.sum())

    @property
    def positive_fraction(self) -> float:
        return self.n_positive / self.n_samples

    def subset(self, indices: Sequence[int] | np.ndarray, name: str | None = None) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(
            features=self.features[idx],
            labels=self.labels[idx],
            feature_names=self.feature_names,
            name=self.name if name is None else name,
            true_probs=None if self.true_probs is None else self.true_probs[idx],
        )

    def with_features(self, features: np.ndarray, feature_names: Sequence[str]) -> "Dataset":
        return Dataset(features, self.labels, tuple(feature_names), self.name, self.true_probs)

    def flipped(self, name: str | None = None) -> "Dataset":
        """Swap the roles of the two classes (labels 1 - y, truth 1 - p)."""
        return Dataset(
            features=self.features,
            labels=1 - self.labels,
            feature_names=self.feature_names,
            name=self.name if name is None else name,
            true_probs=None if self.true_probs is None else 1.0 - self.true_probs,
        )


def _labels_match(value: str, positive_label: str) -> bool:
    if value == positive_label:
        return True
    try:
        return float(value) == float(positive_label)
    except ValueError:
        return False


def load_csv(
    path: str | Path,
    label_column: str,
    positive_label: str,
    name: str | None = None,
    on_missing: Literal["drop", "error"] = "drop",
) -> Dataset:
    """Read a comma separated file with a header row into a :class:`Dataset`.

    Every column other than ``label_column`` is a numeric feature. Rows with
    a missing cell (empty, NA, NaN or ?) are never imputed: they are dropped
    with a logged warning, or raise :class:`MissingValueError` when
    ``on_missing="error"``.
    """
    if on_missing not in ("drop", "error"):
        raise ValueError(f"on_missing must be 'drop' or 'error', got {on_missing!r}")
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such data file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not any(h.strip() for h in header):
            raise EmptyFileError(f"{path}: file is empty (no header row)")
        header = [h.strip() for h in header]
        if label_column not in header:
            raise MissingColumnError(
                f"{path}: label column {label_column!r} not in header {header}"
            )
        label_pos = header.index(label_column)
        feature_cols = [i for i in range(len(header)) if i != label_pos]
        if not feature_cols:
            raise NoFeaturesError(f"{path}: no feature columns besides {label_column!r}")

        rows: list[list[float]] = []
        raw_labels: list[str] = []
        dropped = 0
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}:{line_no}: expected {len(header)} cells, got {len(row)}"
                )
            cells = [c.strip() for c in row]
            gaps = [i for i, c in enumerate(cells) if c == "" or c.upper() in MISSING_MARKERS]
            if gaps:
                if on_missing == "error":
                    raise MissingValueError(
                        f"{path}:{line_no}: missing value in column {header[gaps[0]]!r}"
                    )
                dropped += 1
                continue
            values = []
            for i in feature_cols:
                try:
                    v = float(cells[i])
                except ValueError:
                    raise NonNumericCellError(
                        f"{path}:{line_no}: column {header[i]!r} has non-numeric "
                        f"value {cells[i]!r}"
                    ) from None
                if not math.isfinite(v):
                    raise MissingValueError(
                        f"{path}:{line_no}: non-finite value in column {header[i]!r}"
                    )
                values.append(v)
            rows.append(values)
            raw_labels.append(cells[label_pos])

    if dropped:
        log.warning("%s: dropped %d row(s) with missing values", path, dropped)
    if not rows:
        raise EmptyFileError(f"{path}: no complete data rows")
    distinct = sorted(set(raw_labels))
    if len(distinct) > 2:
        raise LabelError(
            f"{path}: label column {label_column!r} is not binary, found values {distinct}"
        )
    positive = [_labels_match(v, positive_label) for v in raw_labels]
    if not any(positive):
        raise LabelError(f"{path}: positive label {positive_label!r} not found in {distinct}")
    if all(positive):
        raise LabelError(f"{path}: only one label value present ({distinct})")
    return Dataset(
        features=np.array(rows, dtype=float),
        labels=np.array(positive, dtype=np.int8),
        feature_names=tuple(header[i] for i in feature_cols),
        name=name or path.stem,
    )


def write_csv(ds: Dataset, path: str | Path, label_column: str = "label") -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([*ds.feature_names, label_column])
        for x, y in zip(ds.features, ds.labels):
            writer.writerow([*(repr(float(v)) for v in x), int(y)])


@dataclass(frozen=True, eq=False)
class StandardizationParams:
    means: np.ndarray
    std_devs: np.ndarray
    kept_columns: np.ndarray
    n_input_features: int

    def apply(self, ds: Dataset) -> Dataset:
        if ds.n_features != self.n_input_features:
            raise DatasetError(
                f"dataset has {ds.n_features} columns, standardization expects "
                f"{self.n_input_features}"
            )
        X = (ds.features[:, self.kept_columns] - self.means) / self.std_devs
        names = [ds.feature_names[i] for i in self.kept_columns]
        return ds.with_features(X, names)


def standardize(
    train: Dataset,
    apply_to: Sequence[Dataset] = (),
    nzv_threshold: float = NZV_THRESHOLD,
) -> tuple[Dataset, list[Dataset], StandardizationParams]:
    """Scale columns to zero mean and unit sample variance using ``train`` only.

    Columns whose training variance is below ``nzv_threshold`` are dropped
    from every output.
    """
    if train.n_samples < 2:
        raise DatasetError("standardization needs at least 2 training rows")
    for other in apply_to:
        if other.n_features != train.n_features:
            raise DatasetError(
                f"{other.name}: {other.n_features} columns, training set has "
                f"{train.n_features}"
            )
    var = train.features.var(axis=0, ddof=1)
    kept = np.flatnonzero(var >= nzv_threshold)
    if kept.size == 0:
        raise DatasetError("every feature has near-zero variance; no features remain")
    params = StandardizationParams(
        means=_frozen(train.features[:, kept].mean(axis=0)),
        std_devs=_frozen(np.sqrt(var[kept])),
        kept_columns=_frozen(kept),
        n_input_features=train.n_features,
    )
    return params.apply(train), [params.apply(d) for d in apply_to], params


@dataclass(frozen=True, eq=False)
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def splits(self):
        for f in range(self.k):
            yield f, self.train_indices(f), self.test_indices(f)


def stratified_k_fold(ds: Dataset, k: int, seed: int) -> FoldPlan:
    """Shuffle each class by ``seed`` and deal it round-robin into ``k`` folds.

    Positives are dealt first, starting at fold 0; negatives continue where
    the positives stopped. Per-class fold counts and fold sizes therefore
    differ by at most one, and the remainder of n / k lands in the
    lowest-index folds.
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    rng = np.random.default_rng(seed)
    assignments = np.empty(ds.n_samples, dtype=np.intp)
    start = 0
    for cls in (1, 0):
        members = np.flatnonzero(ds.labels == cls)
        if members.size < k:
            raise SplitError(
                f"class {cls} has {members.size} samples, fewer than k={k} folds"
            )
        members = rng.permutation(members)
        assignments[members] = (start + np.arange(members.size)) % k
        start = (start + members.size) % k
    return FoldPlan(k=k, assignments=_frozen(assignments), seed=seed)


def stratified_holdout_indices(
    labels: np.ndarray, fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Return sorted (keep, holdout) index arrays with |holdout| = floor(fraction * n).

    Per-class holdout counts are floor(fraction * n_c); leftover slots go to
    the classes with the largest fractional parts (positive class first on
    ties).
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    labels = np.asarray(labels)
    n = labels.size
    n_hold = math.floor(fraction * n)
    counts = {c: int(np.sum(labels == c)) for c in (1, 0)}
    exact = {c: fraction * counts[c] for c in counts}
    take = {c: math.floor(exact[c]) for c in counts}
    leftover = n_hold - sum(take.values())
    for c in sorted(counts, key=lambda c: (-(exact[c] - take[c]), -c))[:leftover]:
        take[c] += 1
    holdout = []
    for c in (0, 1):
        members = np.flatnonzero(labels == c)
        holdout.append(rng.choice(members, size=take[c], replace=False))
    hold = np.sort(np.concatenate(holdout))
    keep = np.setdiff1d(np.arange(n), hold, assume_unique=True)
    return keep, hold


def split_calibration(
    train: Dataset, fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Split ``train`` into a model-training part and a stratified calibration part."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    if train.n_positive in (0, train.n_samples):
        raise SplitError(f"{train.name}: both classes must be present to split")
    keep, hold = stratified_holdout_indices(
        train.labels, fraction, np.random.default_rng(seed)
    )
    if hold.size == 0:
        raise SplitError(
            f"{train.name}: calibration split of {fraction} x {train.n_samples} is empty"
        )
    cal_labels = train.labels[hold]
    if cal_labels.min() == cal_labels.max():
        raise SplitError(
            f"{train.name}: calibration split of {hold.size} rows has a single class"
        )
    return train.subset(keep), train.subset(hold)


def subsample_class(ds: Dataset, target_class: int, n_keep: int, seed: int) -> Dataset:
    """Keep ``n_keep`` random members of ``target_class``; the other class is untouched.

    Known posteriors are carried over to the new class balance: keeping a
    fraction r of one class multiplies that class's posterior odds by r.
    """
    if target_class not in (0, 1):
        raise ValueError(f"target_class must be 0 or 1, got {target_class}")
    members = np.flatnonzero(ds.labels == target_class)
    if n_keep > members.size:
        raise SplitError(
            f"cannot keep {n_keep} samples of class {target_class}; only {members.size} present"
        )
    if n_keep < 0:
        raise ValueError("n_keep must be non-negative")
    rng = np.random.default_rng(seed)
    kept = rng.choice(members, size=n_keep, replace=False)
    others = np.flatnonzero(ds.labels != target_class)
    order = rng.permutation(np.concatenate([kept, others]))
    out = ds.subset(order)
    if out.true_probs is None:
        return out
    r = n_keep / members.size
    p = out.true_probs
    pc = p if target_class == 1 else 1.0 - p
    pc = r * pc / (r * pc + (1.0 - pc))
    return replace(out, true_probs=pc if target_class == 1 else 1.0 - pc)
