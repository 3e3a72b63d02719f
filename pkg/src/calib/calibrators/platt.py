"""Platt scaling: p(s) = 1 / (1 + exp(A*s + B))."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .points import as_points, require_fit_input

GRAD_TOL = 1e-10
MAX_ITER = 200


class PlattConvergenceError(RuntimeError):
    def __init__(self, message: str, A: float, B: float, grad_norm: float):
        super().__init__(f"{message} (A={A!r}, B={B!r}, |grad|={grad_norm:.3e})")
        self.A = A
        self.B = B
        self.grad_norm = grad_norm


def _sigmoid_neg(f: np.ndarray) -> np.ndarray:
    """1 / (1 + exp(f)) without overflow."""
    out = np.empty_like(f)
    pos = f >= 0
    e = np.exp(-f[pos])
    out[pos] = e / (1.0 + e)
    out[~pos] = 1.0 / (1.0 + np.exp(f[~pos]))
    return out


@dataclass(frozen=True)
class PlattModel:
    A: float
    B: float

    kind = "platt"

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "B", float(self.B))

    def predict(self, scores) -> np.ndarray:
        s = np.asarray(scores, dtype=float)
        return _sigmoid_neg(self.A * np.atleast_1d(s) + self.B).reshape(s.shape)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "A": self.A, "B": self.B}

    @classmethod
    def from_dict(cls, d: dict) -> "PlattModel":
        return cls(float(d["A"]), float(d["B"]))


def smoothed_targets(targets: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Replace 0/1 labels by (N+ + 1)/(N+ + 2) and 1/(N- + 2)."""
    n_pos = float(weights[targets == 1].sum())
    n_neg = float(weights[targets == 0].sum())
    return np.where(targets == 1, (n_pos + 1) / (n_pos + 2), 1.0 / (n_neg + 2))


def platt_nll(A: float, B: float, scores, targets, weights) -> float:
    """Weighted mean cross-entropy of the sigmoid against (possibly fractional) targets."""
    f = A * np.asarray(scores) + B
    # log(1 + e^f) - (1 - t) f
    val = np.logaddexp(0.0, f) - (1.0 - targets) * f
    return float(np.sum(weights * val) / np.sum(weights))


def platt_fit(points) -> PlattModel:
    """Fit (A, B) by damped Newton with step halving.

    Binary targets are smoothed first; fractional targets are used as given.
    Convergence means the gradient norm of the weighted mean cross-entropy
    drops below ``GRAD_TOL``, or the Newton step's predicted decrease falls
    below the objective's floating-point resolution, within ``MAX_ITER``
    iterations.
    """
    pts = as_points(points)
    require_fit_input(pts, "Platt scaling")
    s, t, w = pts.scores, pts.targets, pts.weights
    if pts.is_binary:
        if t.min() == t.max():
            raise ValueError("Platt scaling needs both classes among the calibration points")
        t = smoothed_targets(t, w)
    elif t.max() - t.min() <= 0:
        raise ValueError("Platt scaling needs targets spanning a nonzero range")
    wn = w / w.sum()

    base = float(np.clip(np.sum(wn * t), 1e-12, 1 - 1e-12))
    A, B = 0.0, float(np.log((1 - base) / base))
    obj = platt_nll(A, B, s, t, w)
    grad_norm = np.inf
    for _ in range(MAX_ITER):
        p = _sigmoid_neg(A * s + B)
        g = wn * (t - p)
        grad = np.array([np.dot(g, s), g.sum()])
        grad_norm = float(np.hypot(*grad))
        if grad_norm < GRAD_TOL:
            return PlattModel(A, B)
        h = wn * p * (1 - p)
        H = np.array([[np.dot(h, s * s), np.dot(h, s)], [np.dot(h, s), h.sum()]])
        H[0, 0] += 1e-12
        H[1, 1] += 1e-12
        dA, dB = np.linalg.solve(H, -grad)
        # predicted decrease below the objective's resolution: nothing left to gain
        if -float(np.dot(grad, [dA, dB])) <= 4 * np.finfo(float).eps * max(1.0, abs(obj)):
            return PlattModel(A, B)
        stepsize = 1.0
        while stepsize >= 1e-10:
            nA, nB = A + stepsize * dA, B + stepsize * dB
            nobj = platt_nll(nA, nB, s, t, w)
            if nobj <= obj + 1e-4 * stepsize * float(np.dot(grad, [dA, dB])):
                break
            stepsize /= 2
        else:
            # no further descent at machine precision
            p = _sigmoid_neg(A * s + B)
            g = wn * (t - p)
            grad_norm = float(np.hypot(np.dot(g, s), g.sum()))
            if grad_norm < GRAD_TOL:
                return PlattModel(A, B)
            raise PlattConvergenceError("line search failed", A, B, grad_norm)
        A, B, obj = nA, nB, nobj
    raise PlattConvergenceError(f"no convergence in {MAX_ITER} iterations", A, B, grad_norm)
