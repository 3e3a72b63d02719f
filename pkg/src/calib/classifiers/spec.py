from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

ClassifierKind = Literal["naive_bayes", "random_forest"]


@dataclass(frozen=True)
class ClassifierSpec:
    kind: ClassifierKind = "naive_bayes"
    rf_ntree: int = 500
    rf_mtry: int | None = None  # None: tune on the OOB error
    rf_min_node: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("naive_bayes", "random_forest"):
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        if self.rf_ntree < 1:
            raise ValueError("rf_ntree must be at least 1")
        if self.rf_mtry is not None and self.rf_mtry < 1:
            raise ValueError("rf_mtry must be at least 1")
        if self.rf_min_node < 1:
            raise ValueError("rf_min_node must be at least 1")

    def with_mtry(self, mtry: int) -> "ClassifierSpec":
        return replace(self, rf_mtry=mtry)

    def with_seed(self, seed: int) -> "ClassifierSpec":
        return replace(self, seed=seed)

    def resolved_mtry(self, n_features: int) -> int:
        from .forest import default_mtry

        m = default_mtry(n_features) if self.rf_mtry is None else self.rf_mtry
        if not 1 <= m <= n_features:
            raise ValueError(f"mtry={m} outside [1, {n_features}]")
        return m
