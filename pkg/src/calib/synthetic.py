"""Two-Gaussian synthetic data with an exactly known positive-class posterior."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset

DERIVED_FEATURE_NAMES = ("x1_plus_x2", "x1_minus_x2", "x1_times_x2", "x1_sq", "x2_sq")


@dataclass(frozen=True)
class SyntheticSpec:
    """Class-conditional normals with equal priors.

    ``covariance`` is shared unless ``negative_covariance`` is given, in
    which case it applies to the positive class only.
    """

    positive_mean: tuple[float, float] = (0.0, 0.0)
    negative_mean: tuple[float, float] = (1.5, 1.5)
    covariance: tuple[tuple[float, float], tuple[float, float]] = ((1.0, 0.0), (0.0, 1.0))
    negative_covariance: tuple[tuple[float, float], tuple[float, float]] | None = None

    @property
    def positive_cov(self) -> np.ndarray:
        return np.asarray(self.covariance, dtype=float)

    @property
    def negative_cov(self) -> np.ndarray:
        c = self.covariance if self.negative_covariance is None else self.negative_covariance
        return np.asarray(c, dtype=float)


# second variant: unequal spreads give a quadratic Bayes boundary
SYNTHETIC_VARIANTS = {
    "shared": SyntheticSpec(),
    "unequal": SyntheticSpec(negative_covariance=((2.0, 0.0), (0.0, 2.0))),
}


@dataclass(frozen=True, eq=False)
class SyntheticTruth:
    positive_mean: np.ndarray
    negative_mean: np.ndarray
    covariance: np.ndarray
    negative_covariance: np.ndarray
    raw_points: np.ndarray
    true_probs: np.ndarray = field(repr=False)


def log_density_ratio(points: np.ndarray, spec: SyntheticSpec) -> np.ndarray:
    """ln f+(x) - ln f-(x)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    cp, cn = spec.positive_cov, spec.negative_cov
    dp = points - np.asarray(spec.positive_mean)
    dn = points - np.asarray(spec.negative_mean)
    qp = np.einsum("ij,jk,ik->i", dp, np.linalg.inv(cp), dp)
    qn = np.einsum("ij,jk,ik->i", dn, np.linalg.inv(cn), dn)
    # log-determinants cancel when the covariance is shared
    logdet = np.linalg.slogdet(cn)[1] - np.linalg.slogdet(cp)[1]
    return 0.5 * (qn - qp + logdet)


def true_posterior(points: np.ndarray, spec: SyntheticSpec = SyntheticSpec()) -> np.ndarray:
    """f+ / (f+ + f-) evaluated at each row of ``points``."""
    r = log_density_ratio(points, spec)
    # logistic of the log ratio, split by sign to stay finite
    out = np.empty_like(r)
    pos = r >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-r[pos]))
    e = np.exp(r[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def derive_features(points: np.ndarray) -> np.ndarray:
    x1, x2 = points[:, 0], points[:, 1]
    return np.column_stack([x1 + x2, x1 - x2, x1 * x2, x1**2, x2**2])


def make_synthetic(
    n_per_class: int,
    seed: int,
    spec: SyntheticSpec = SyntheticSpec(),
    name: str = "synthetic",
) -> tuple[Dataset, SyntheticTruth]:
    """Sample ``n_per_class`` points from each Gaussian.

    The returned dataset holds only the derived features; the raw 2-D points
    and the exact posteriors live in the :class:`SyntheticTruth`.
    """
    if n_per_class < 2:
        raise ValueError(f"n_per_class must be at least 2, got {n_per_class}")
    rng = np.random.default_rng(seed)
    pos = rng.multivariate_normal(spec.positive_mean, spec.positive_cov, size=n_per_class)
    neg = rng.multivariate_normal(spec.negative_mean, spec.negative_cov, size=n_per_class)
    raw = np.vstack([pos, neg])
    labels = np.concatenate([np.ones(n_per_class), np.zeros(n_per_class)])
    probs = true_posterior(raw, spec)
    ds = Dataset(
        features=derive_features(raw),
        labels=labels,
        feature_names=DERIVED_FEATURE_NAMES,
        name=name,
        true_probs=probs,
    )
    truth = SyntheticTruth(
        positive_mean=np.asarray(spec.positive_mean, dtype=float),
        negative_mean=np.asarray(spec.negative_mean, dtype=float),
        covariance=spec.positive_cov,
        negative_covariance=spec.negative_cov,
        raw_points=raw,
        true_probs=probs,
    )
    return ds, truth


def write_truth_csv(truth: SyntheticTruth, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_id", "true_prob"])
        for i, p in enumerate(truth.true_probs):
            writer.writerow([i, repr(float(p))])
