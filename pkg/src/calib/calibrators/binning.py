"""Equal-frequency histogram binning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .points import StepFunction, as_points


@dataclass(frozen=True, eq=False)
class BinningModel:
    """Bin edges sit halfway between the last score of a bin and the first of the next."""

    edges: np.ndarray
    values: np.ndarray
    sizes: np.ndarray

    kind = "binning"

    def predict(self, scores) -> np.ndarray:
        return StepFunction(self.edges, self.values)(scores)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "edges": self.edges.tolist(),
            "values": self.values.tolist(),
            "sizes": self.sizes.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BinningModel":
        return cls(
            np.asarray(d["edges"], dtype=float),
            np.asarray(d["values"], dtype=float),
            np.asarray(d["sizes"], dtype=int),
        )


def bin_sizes(n: int, n_bins: int) -> np.ndarray:
    """Equal counts, with the remainder spread one per bin from the lowest bin."""
    sizes = np.full(n_bins, n // n_bins)
    sizes[: n % n_bins] += 1
    return sizes


def binning_fit(points, n_bins: int) -> BinningModel:
    pts = as_points(points)
    if n_bins < 1:
        raise ValueError("n_bins must be at least 1")
    if len(pts) < n_bins:
        raise ValueError(f"{len(pts)} calibration points cannot fill {n_bins} bins")
    pts = pts.sorted()
    sizes = bin_sizes(len(pts), n_bins)
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    values = np.empty(n_bins)
    for b in range(n_bins):
        sl = slice(bounds[b], bounds[b + 1])
        values[b] = np.average(pts.targets[sl], weights=pts.weights[sl])
    s = pts.scores
    edges = 0.5 * (s[bounds[1:-1] - 1] + s[bounds[1:-1]])
    return BinningModel(edges=edges, values=values, sizes=sizes)
