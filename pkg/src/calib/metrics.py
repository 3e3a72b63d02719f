"""Calibration and classification metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

DEFAULT_CLIP = 1e-6


def _check(probs, labels) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(probs, dtype=float).ravel()
    y = np.asarray(labels, dtype=float).ravel()
    if p.size != y.size:
        raise ValueError(f"length mismatch: {p.size} probabilities, {y.size} labels")
    if p.size == 0:
        raise ValueError("metrics need at least one observation")
    if np.any(~((p >= 0) & (p <= 1))):
        raise ValueError("probabilities must lie in [0, 1]")
    return p, y


def logloss(probs, labels, clip_epsilon: float = DEFAULT_CLIP) -> float:
    """Mean negative log-likelihood of binary labels; probabilities clipped to [eps, 1 - eps]."""
    if not 0 < clip_epsilon < 0.5:
        raise ValueError("clip_epsilon must lie in (0, 0.5)")
    p, y = _check(probs, labels)
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    # clip the probability given to the observed class: clipping p to 1 - eps
    # and taking log1p(-p) would round below eps for tiny eps
    q = np.clip(np.where(y == 1, p, 1.0 - p), clip_epsilon, 1 - clip_epsilon)
    return float(-np.mean(np.log(q)))


def mse(probs, labels) -> float:
    p, y = _check(probs, labels)
    return float(np.mean((y - p) ** 2))


def mse_vs_truth(probs, true_probs) -> float:
    """Mean squared difference to the exact posterior (synthetic data only)."""
    p, t = _check(probs, true_probs)
    if np.any(~((t >= 0) & (t <= 1))):
        raise ValueError("true probabilities must lie in [0, 1]")
    return float(np.mean((p - t) ** 2))


def classification_rate(probs, labels, threshold: float) -> float:
    """Fraction of samples where (p >= threshold) agrees with (label == 1)."""
    p, y = _check(probs, labels)
    return float(np.mean((p >= threshold) == (y == 1)))


def select_threshold(probs, labels) -> float:
    """Threshold maximising the classification rate.

    Candidates are 0, 1 and the midpoints between adjacent distinct
    probabilities; the smallest best candidate wins.
    """
    p, y = _check(probs, labels)
    u = np.unique(p)
    mid = 0.5 * (u[:-1] + u[1:])
    # adjacent subnormals can have a midpoint equal to the lower value
    mid = np.where(mid > u[:-1], mid, u[1:])
    cands = np.unique(np.concatenate([[0.0], mid, [1.0]]))
    # rate(t) = (#pos with p >= t + #neg with p < t) / n, via sorted counts
    ps = np.sort(p[y == 1])
    ns = np.sort(p[y == 0])
    tp = ps.size - np.searchsorted(ps, cands, side="left")
    tn = np.searchsorted(ns, cands, side="left")
    rates = (tp + tn) / p.size
    return float(cands[int(np.argmax(rates))])


@dataclass(frozen=True)
class MetricReport:
    logloss: float
    mse: float
    classification_rate: float
    threshold: float
    clip_epsilon: float
    mse_vs_truth: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(
    test_probs,
    test_labels,
    threshold: float,
    clip_epsilon: float = DEFAULT_CLIP,
    true_probs=None,
) -> MetricReport:
    return MetricReport(
        logloss=logloss(test_probs, test_labels, clip_epsilon),
        mse=mse(test_probs, test_labels),
        classification_rate=classification_rate(test_probs, test_labels, threshold),
        threshold=threshold,
        clip_epsilon=clip_epsilon,
        mse_vs_truth=None if true_probs is None else mse_vs_truth(test_probs, true_probs),
    )
