"""Score-to-probability maps.

Every fitted model exposes ``predict(scores)`` returning probabilities and
``to_dict()`` for JSON persistence (see :func:`model_to_dict`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .binning import BinningModel, bin_sizes, binning_fit
from .enir import EnirModel, bernoulli_bic, bic_score, bic_weights, enir_fit
from .isotonic import IsotonicModel, NirPath, nir_objective, nir_path, pava, pava_fit
from .platt import PlattConvergenceError, PlattModel, platt_fit, platt_nll, smoothed_targets
from .points import CalibrationPoint, CalibrationPoints, StepFunction, as_points, merge_ties


@dataclass(frozen=True)
class IdentityModel:
    """The uncalibrated ("raw") map: scores are already in [0, 1]."""

    kind = "identity"

    def predict(self, scores) -> np.ndarray:
        return np.asarray(scores, dtype=float)

    def to_dict(self) -> dict:
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "IdentityModel":
        return cls()


CalibratorModel = IdentityModel | IsotonicModel | EnirModel | PlattModel | BinningModel

_KINDS = {
    cls.kind: cls for cls in (IdentityModel, IsotonicModel, EnirModel, PlattModel, BinningModel)
}


def calibrate(model: CalibratorModel, score: float) -> float:
    """Map a single score through a fitted calibrator."""
    score = float(score)
    if not math.isfinite(score):
        raise ValueError(f"cannot calibrate non-finite score {score}")
    return float(model.predict(np.array([score]))[0])


def model_to_dict(model: CalibratorModel) -> dict:
    return model.to_dict()


def model_from_dict(d: dict) -> CalibratorModel:
    try:
        cls = _KINDS[d["kind"]]
    except KeyError:
        raise ValueError(f"unknown calibrator kind {d.get('kind')!r}") from None
    return cls.from_dict(d)


def save_model(model: CalibratorModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2), encoding="utf-8")


def load_model(path: str | Path) -> CalibratorModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


__all__ = [
    "BinningModel",
    "CalibrationPoint",
    "CalibrationPoints",
    "CalibratorModel",
    "EnirModel",
    "IdentityModel",
    "IsotonicModel",
    "NirPath",
    "PlattConvergenceError",
    "PlattModel",
    "StepFunction",
    "as_points",
    "bernoulli_bic",
    "bic_score",
    "bic_weights",
    "bin_sizes",
    "binning_fit",
    "calibrate",
    "enir_fit",
    "load_model",
    "merge_ties",
    "model_from_dict",
    "model_to_dict",
    "nir_objective",
    "nir_path",
    "pava",
    "pava_fit",
    "platt_fit",
    "platt_nll",
    "save_model",
    "smoothed_targets",
]
