"""Isotonic regression (PAVA) and the near-isotonic regression solution path.

Near-isotonic regression at penalty ``lam`` minimises

    0.5 * sum_i w_i (y_i - b_i)**2 + lam * sum_i (b_i - b_{i+1})_+

over points sorted by score. At ``lam = 0`` the fit reproduces the targets;
as ``lam`` grows, neighbouring groups of points fuse, and once every
downward step is gone the fit is the isotonic (PAVA) solution. Between
fusion events each group value moves linearly in ``lam``, so the path is
fully described by the fits at the fusion points ("knots").
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .points import (
    CalibrationPoints,
    MergedPoints,
    StepFunction,
    as_points,
    compress_steps,
    merge_ties,
    require_fit_input,
)


def pava(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted least-squares non-decreasing fit of ``y`` (already in score order)."""
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    n = y.size
    vals = np.empty(n)
    wts = np.empty(n)
    size = np.empty(n, dtype=np.intp)
    top = -1
    for i in range(n):
        top += 1
        vals[top], wts[top], size[top] = y[i], w[i], 1
        while top > 0 and vals[top - 1] > vals[top]:
            wsum = wts[top - 1] + wts[top]
            vals[top - 1] = (wts[top - 1] * vals[top - 1] + wts[top] * vals[top]) / wsum
            wts[top - 1] = wsum
            size[top - 1] += size[top]
            top -= 1
    return np.repeat(vals[: top + 1], size[: top + 1])


@dataclass(frozen=True, eq=False)
class IsotonicModel:
    step: StepFunction
    knot_scores: np.ndarray
    knot_values: np.ndarray

    kind = "isotonic"

    @property
    def thresholds(self) -> np.ndarray:
        return self.step.thresholds

    @property
    def block_values(self) -> np.ndarray:
        return self.step.values

    def predict(self, scores) -> np.ndarray:
        return self.step(scores)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "knot_scores": self.knot_scores.tolist(),
            "knot_values": self.knot_values.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IsotonicModel":
        s = np.asarray(d["knot_scores"], dtype=float)
        v = np.asarray(d["knot_values"], dtype=float)
        return cls(compress_steps(s, v), s, v)


def pava_fit(points) -> IsotonicModel:
    points = as_points(points)
    require_fit_input(points, "isotonic regression")
    m = merge_ties(points)
    fit = pava(m.targets, m.weights)
    return IsotonicModel(compress_steps(m.scores, fit), m.scores, fit)


@dataclass(frozen=True, eq=False)
class NirPath:
    """Knots of the near-isotonic path over the tie-merged points.

    ``fits[k]`` is the fitted value of every merged point at ``lambdas[k]``;
    ``n_groups[k]`` is the number of fused groups (the degrees of freedom).
    """

    lambdas: np.ndarray
    fits: np.ndarray
    n_groups: np.ndarray
    merged: MergedPoints

    def __len__(self) -> int:
        return self.lambdas.size

    def fit_at(self, lam: float) -> np.ndarray:
        """Fit at any penalty, by linear interpolation between knots."""
        if lam < 0:
            raise ValueError("penalty must be non-negative")
        k = int(np.searchsorted(self.lambdas, lam, side="right")) - 1
        if k >= len(self) - 1:
            return self.fits[-1].copy()
        l0, l1 = self.lambdas[k], self.lambdas[k + 1]
        a = (lam - l0) / (l1 - l0)
        return (1 - a) * self.fits[k] + a * self.fits[k + 1]

    def objective(self, lam: float, beta: np.ndarray) -> float:
        m = self.merged
        return nir_objective(m.targets, m.weights, beta, lam)


def nir_objective(y, w, beta, lam) -> float:
    beta = np.asarray(beta, dtype=float)
    return float(
        0.5 * np.sum(w * (y - beta) ** 2) + lam * np.sum(np.maximum(beta[:-1] - beta[1:], 0.0))
    )


def _expand(values: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    return np.repeat(values, sizes)


def nir_path(points) -> NirPath:
    """Trace the near-isotonic solution path with a modified PAVA.

    Group values follow ``b_g = (S_g - lam * (down_right - down_left)) / W_g``
    where ``down_*`` flags a downward step to the neighbour. The next knot is
    the smallest penalty at which two neighbouring groups meet; they fuse and
    the walk continues until no downward step is left.
    """
    points = as_points(points)
    require_fit_input(points, "near-isotonic regression")
    m = merge_ties(points)
    y, w = m.targets, m.weights
    scale = max(1.0, float(np.max(np.abs(y))))
    tol = 1e-12 * scale

    # fuse equal neighbours up front: they stay fused for every penalty
    starts = np.concatenate([[0], np.flatnonzero(np.abs(np.diff(y)) > tol) + 1])
    sizes = np.diff(np.concatenate([starts, [y.size]]))
    W = np.add.reduceat(w, starts)
    S = np.add.reduceat(w * y, starts)
    beta = S / W

    lam = 0.0
    lambdas = [0.0]
    fits = [y.copy()]
    n_groups = [starts.size]
    while True:
        gap = np.diff(beta)  # b_{g+1} - b_g
        down = gap < 0
        if not down.any():
            break
        d_right = np.concatenate([down, [False]]).astype(float)
        d_left = np.concatenate([[False], down]).astype(float)
        slope = (d_left - d_right) / W
        rate = np.diff(slope)
        with np.errstate(divide="ignore", invalid="ignore"):
            dl = np.where(gap * rate < 0, -gap / rate, np.inf)
        step = float(dl.min())
        if not np.isfinite(step):  # pragma: no cover - impossible while a step is down
            raise RuntimeError("near-isotonic path stalled")
        lam += step
        # fuse every pair meeting at this penalty (chains collapse together)
        meet = dl <= step * (1 + 1e-9) + 1e-15
        grp = np.cumsum(np.concatenate([[True], ~meet])) - 1
        W = np.bincount(grp, weights=W)
        S = np.bincount(grp, weights=S)
        sizes = np.bincount(grp, weights=sizes).astype(np.intp)
        # surviving boundaries keep their direction up to the knot
        down = down[~meet]
        d_right = np.concatenate([down, [False]])
        d_left = np.concatenate([[False], down])
        beta = (S - lam * (d_right.astype(float) - d_left)) / W
        lambdas.append(lam)
        fits.append(_expand(beta, sizes))
        n_groups.append(beta.size)

    return NirPath(
        lambdas=np.asarray(lambdas),
        fits=np.vstack(fits),
        n_groups=np.asarray(n_groups),
        merged=m,
    )
