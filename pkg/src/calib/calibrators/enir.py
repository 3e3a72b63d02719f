"""Ensemble of near-isotonic regression fits (ENIR), weighted by BIC."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import xlogy

from .isotonic import NirPath, nir_path, pava
from .points import as_points, merge_ties, midpoints, require_fit_input

RSS_FLOOR = 1e-12

Criterion = Literal["bernoulli", "gaussian"]
CRITERIA = ("bernoulli", "gaussian")


def bic_score(rss: float, n: float, df: int) -> float:
    """Gaussian-residual BIC: n ln(RSS / n) + df ln n."""
    return n * np.log(max(rss, RSS_FLOOR) / n) + df * np.log(n)


def bernoulli_bic(neg_loglik: float, n: float, df: int) -> float:
    """Binomial-likelihood BIC: 2 NLL + df ln n (inf when a target gets probability 0)."""
    return 2.0 * neg_loglik + df * np.log(n)


def bic_weights(bic: np.ndarray) -> np.ndarray:
    """exp(-(BIC - BIC_min) / 2), normalised."""
    rel = np.exp(-(np.asarray(bic) - np.min(bic)) / 2.0)
    return rel / rel.sum()


@dataclass(frozen=True, eq=False)
class EnirModel:
    """BIC-weighted average of near-isotonic step maps.

    ``member_values[k]`` holds member k's value at each distinct training
    score in ``knot_scores``; maps switch value halfway between neighbouring
    training scores and are clamped outside the training range.
    """

    knot_scores: np.ndarray
    member_values: np.ndarray
    member_lambdas: np.ndarray
    member_df: np.ndarray
    bic: np.ndarray
    weights: np.ndarray

    kind = "enir"

    def __post_init__(self) -> None:
        blended = self.weights @ self.member_values
        object.__setattr__(self, "_blended", blended)
        object.__setattr__(self, "_thresholds", midpoints(self.knot_scores))

    @property
    def n_members(self) -> int:
        return self.weights.size

    def member_predictions(self, scores) -> np.ndarray:
        idx = np.searchsorted(self._thresholds, np.asarray(scores, dtype=float), side="left")
        return self.member_values[:, idx]

    def predict(self, scores) -> np.ndarray:
        idx = np.searchsorted(self._thresholds, np.asarray(scores, dtype=float), side="left")
        return np.clip(self._blended[idx], 0.0, 1.0)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "knot_scores": self.knot_scores.tolist(),
            "member_values": self.member_values.tolist(),
            "member_lambdas": self.member_lambdas.tolist(),
            "member_df": self.member_df.tolist(),
            "bic": self.bic.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnirModel":
        return cls(
            knot_scores=np.asarray(d["knot_scores"], dtype=float),
            member_values=np.asarray(d["member_values"], dtype=float).reshape(
                len(d["weights"]), len(d["knot_scores"])
            ),
            member_lambdas=np.asarray(d["member_lambdas"], dtype=float),
            member_df=np.asarray(d["member_df"], dtype=int),
            bic=np.asarray(d["bic"], dtype=float),
            weights=np.asarray(d["weights"], dtype=float),
        )


def _rss(path: NirPath, fits: np.ndarray, points) -> np.ndarray:
    """Weighted residual sum of squares over the original (unmerged) points.

    Weights are rescaled to average one so unit weights give the plain RSS.
    """
    w = points.weights * (len(points) / points.weights.sum())
    pred = fits[:, path.merged.inverse]
    return ((points.targets - pred) ** 2 * w).sum(axis=1)


def _neg_loglik(path: NirPath, fits: np.ndarray, points) -> np.ndarray:
    """Weighted Bernoulli negative log-likelihood; weights count as replicates."""
    pred = np.clip(fits[:, path.merged.inverse], 0.0, 1.0)
    t, w = points.targets, points.weights
    with np.errstate(divide="ignore"):
        ll = xlogy(t, pred) + xlogy(1.0 - t, 1.0 - pred)
    return -(w * ll).sum(axis=1)


def _member_bic(path: NirPath, fits: np.ndarray, points, df: np.ndarray, criterion: str) -> np.ndarray:
    if criterion == "gaussian":
        n = len(points)
        rss = _rss(path, fits, points)
        return np.array([bic_score(r, n, int(k)) for r, k in zip(rss, df)])
    nll = _neg_loglik(path, fits, points)
    n = float(points.weights.sum())
    return np.array([bernoulli_bic(v, n, int(k)) for v, k in zip(nll, df)])


def enir_fit(points, criterion: Criterion = "bernoulli") -> EnirModel:
    """Fit ENIR: near-isotonic path, BIC per knot, exp(-dBIC/2) weights.

    ``criterion="bernoulli"`` scores each member by the binomial likelihood
    of the targets (sample size = total weight); ``"gaussian"`` uses
    n ln(RSS / n) + df ln n with n the number of points. The saturated
    lam = 0 member is dropped when it interpolates the data (RSS below
    1e-12); members with infinite BIC or with weights that underflow to zero
    are dropped. If nothing survives, the isotonic fit alone is used with
    weight one.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"unknown BIC criterion {criterion!r}; choose from {CRITERIA}")
    points = as_points(points)
    require_fit_input(points, "ENIR")
    path = nir_path(points)
    rss = _rss(path, path.fits, points)
    bic = _member_bic(path, path.fits, points, path.n_groups, criterion)
    keep = np.isfinite(bic)
    if rss[0] < RSS_FLOOR:
        keep[0] = False
    if not keep.any():
        m = merge_ties(points)
        fit = pava(m.targets, m.weights)[None, :]
        df = np.array([np.unique(fit).size])
        return EnirModel(
            knot_scores=m.scores,
            member_values=fit,
            member_lambdas=np.array([path.lambdas[-1]]),
            member_df=df,
            bic=_member_bic(path, fit, points, df, criterion),
            weights=np.ones(1),
        )
    fits = path.fits[keep]
    df = path.n_groups[keep]
    bic = bic[keep]
    weights = bic_weights(bic)
    alive = weights > 0
    weights = weights[alive] / weights[alive].sum()
    return EnirModel(
        knot_scores=path.merged.scores,
        member_values=fits[alive],
        member_lambdas=path.lambdas[keep][alive],
        member_df=df[alive],
        bic=bic[alive],
        weights=weights,
    )
