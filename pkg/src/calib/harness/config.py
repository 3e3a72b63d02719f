from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal

from ..classifiers import ClassifierSpec
from ..metrics import DEFAULT_CLIP
from ..synthetic import SyntheticSpec

SCENARIOS = (
    "raw",
    "enir",
    "enir_full",
    "dg_enir",
    "dgg_enir",
    "enir_oob",
    "platt",
    "platt_full",
)
ScenarioKind = Literal[
    "raw", "enir", "enir_full", "dg_enir", "dgg_enir", "enir_oob", "platt", "platt_full"
]

# command-line spellings
SCENARIO_ALIASES = {
    "raw": "raw",
    "enir": "enir",
    "enir-full": "enir_full",
    "dg": "dg_enir",
    "dgg": "dgg_enir",
    "oob": "enir_oob",
    "platt": "platt",
    "platt-full": "platt_full",
}

SCENARIO_LABELS = {
    "raw": "Raw",
    "enir": "ENIR",
    "enir_full": "ENIR full",
    "dg_enir": "DG + ENIR",
    "dgg_enir": "DGG + ENIR",
    "enir_oob": "ENIR OOB",
    "platt": "Platt",
    "platt_full": "Platt full",
}

# classifier-specific comparison scenario
CS_BASELINE = {"random_forest": "enir_oob", "naive_bayes": "platt_full"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CsvSource:
    path: Path
    label_column: str
    positive_label: str


@dataclass(frozen=True)
class SyntheticSource:
    n_per_class: int = 100
    spec: SyntheticSpec = SyntheticSpec()


@dataclass(frozen=True)
class ExperimentConfig:
    source: CsvSource | SyntheticSource | None = None
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)
    scenarios: tuple[str, ...] = ("raw", "enir", "enir_full", "dg_enir", "dgg_enir")
    folds: int = 10
    cal_fraction: float = 0.10
    dg_points: int = 2000
    dg_holdout: float = 0.10
    dgg_group: int = 20
    clip_epsilon: float = DEFAULT_CLIP
    bic: Literal["bernoulli", "gaussian"] = "bernoulli"
    # threshold chosen on the calibrator's fitting points or on the whole training fold
    threshold_data: Literal["fit_points", "training_fold"] = "fit_points"
    seed: int = 0
    test: Literal["welch", "paired"] = "welch"
    threads: int = 1
    out_dir: Path | None = None

    def validate(self) -> None:
        unknown = [s for s in self.scenarios if s not in SCENARIOS]
        if unknown:
            raise ConfigError(f"unknown scenarios {unknown}; choose from {list(SCENARIOS)}")
        if len(set(self.scenarios)) != len(self.scenarios):
            raise ConfigError("scenarios are listed more than once")
        if not self.scenarios:
            raise ConfigError("at least one scenario is required")
        if "enir_oob" in self.scenarios and self.classifier.kind != "random_forest":
            raise ConfigError("the enir_oob scenario needs the random_forest classifier")
        if self.folds < 2:
            raise ConfigError(f"folds must be at least 2, got {self.folds}")
        for name in ("cal_fraction", "dg_holdout"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ConfigError(f"{name} must lie in (0, 1), got {v}")
        if self.dg_points < 1 or self.dgg_group < 1:
            raise ConfigError("dg_points and dgg_group must be positive")
        if not 0 < self.clip_epsilon < 0.5:
            raise ConfigError("clip_epsilon must lie in (0, 0.5)")
        if self.bic not in ("bernoulli", "gaussian"):
            raise ConfigError(f"unknown BIC criterion {self.bic!r}")
        if self.threshold_data not in ("fit_points", "training_fold"):
            raise ConfigError(f"unknown threshold data {self.threshold_data!r}")
        if self.test not in ("welch", "paired"):
            raise ConfigError(f"unknown test {self.test!r}")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")

    def describe(self) -> dict:
        """JSON-friendly settings that determine the results (no output paths)."""
        d = asdict(self)
        d.pop("out_dir")
        d.pop("threads")
        src = self.source
        if isinstance(src, CsvSource):
            d["source"] = {
                "type": "csv",
                "path": str(src.path),
                "label_column": src.label_column,
                "positive_label": src.positive_label,
            }
        elif isinstance(src, SyntheticSource):
            d["source"] = {"type": "synthetic", **asdict(src)}
        d["scenarios"] = list(self.scenarios)
        return d
