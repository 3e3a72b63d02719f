"""Per-scenario means, standard deviations and significance flags."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from ..stats import TTestResult, paired_t_test, welch_t_test
from .config import CS_BASELINE, SCENARIOS
from .runner import ResultRecord

METRICS = ("classification_rate", "mse", "logloss", "mse_vs_truth")
BASELINES = ("raw", "enir_full", "cs")


class IncompleteGridError(ValueError):
    pass


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    sd: float
    values: tuple[float, ...]


@dataclass(frozen=True)
class SummaryRow:
    dataset: str
    classifier: str
    scenario: str
    metrics: dict[str, MetricSummary]
    # tests[baseline][metric]; baselines: raw, enir_full, cs (classifier-specific)
    tests: dict[str, dict[str, TTestResult]] = field(default_factory=dict)

    def flag(self, baseline: str, metric: str) -> bool:
        t = self.tests.get(baseline, {}).get(metric)
        return bool(t is not None and t.significant)


@dataclass(frozen=True)
class SummaryTable:
    rows: tuple[SummaryRow, ...]
    metrics: tuple[str, ...]
    test: str

    def row(self, dataset: str, classifier: str, scenario: str) -> SummaryRow:
        for r in self.rows:
            if (r.dataset, r.classifier, r.scenario) == (dataset, classifier, scenario):
                return r
        raise KeyError((dataset, classifier, scenario))

    def groups(self) -> list[tuple[str, str]]:
        seen: list[tuple[str, str]] = []
        for r in self.rows:
            if (r.dataset, r.classifier) not in seen:
                seen.append((r.dataset, r.classifier))
        return seen


def _check_grid(records: Sequence[ResultRecord]) -> dict[tuple[str, str], dict[str, dict[int, ResultRecord]]]:
    grid: dict[tuple[str, str], dict[str, dict[int, ResultRecord]]] = {}
    for r in records:
        cell = grid.setdefault((r.dataset, r.classifier), {}).setdefault(r.scenario, {})
        if r.fold in cell:
            raise IncompleteGridError(
                f"duplicate record for {r.dataset}/{r.classifier}/{r.scenario} fold {r.fold}"
            )
        cell[r.fold] = r
    missing = []
    for (ds, clf), by_scenario in grid.items():
        folds = sorted(set().union(*(set(v) for v in by_scenario.values())))
        for scenario, cell in by_scenario.items():
            missing += [f"{ds}/{clf}/{scenario} fold {f}" for f in folds if f not in cell]
    if missing:
        raise IncompleteGridError("missing records: " + ", ".join(missing))
    return grid


def _test(a: np.ndarray, b: np.ndarray, kind: str) -> TTestResult:
    return paired_t_test(a, b) if kind == "paired" else welch_t_test(a, b)


def summarize(
    records: Sequence[ResultRecord], test: Literal["welch", "paired"] = "welch"
) -> SummaryTable:
    """Mean and SD (ddof=1) of every metric over folds, plus t-tests.

    Each scenario is tested against raw, enir_full and the classifier's own
    baseline (enir_oob for forests, platt_full for naive Bayes) whenever that
    baseline was run and differs from the scenario. Metrics absent from any
    record (mse_vs_truth on real data) are left out.
    """
    if not records:
        raise ValueError("no records to summarize")
    if test not in ("welch", "paired"):
        raise ValueError(f"unknown test {test!r}")
    grid = _check_grid(records)
    metrics = tuple(
        m for m in METRICS if all(getattr(r.metrics, m) is not None for r in records)
    )
    rows = []
    for (ds, clf), by_scenario in grid.items():
        values: dict[str, dict[str, np.ndarray]] = {}
        for scenario, cell in by_scenario.items():
            folds = sorted(cell)
            values[scenario] = {
                m: np.array([getattr(cell[f].metrics, m) for f in folds]) for m in metrics
            }
        baselines = {"raw": "raw", "enir_full": "enir_full", "cs": CS_BASELINE.get(clf)}
        for scenario in sorted(by_scenario, key=SCENARIOS.index):
            v = values[scenario]
            summary = {
                m: MetricSummary(
                    float(v[m].mean()),
                    float(v[m].std(ddof=1)) if v[m].size > 1 else 0.0,
                    tuple(float(x) for x in v[m]),
                )
                for m in metrics
            }
            tests = {}
            for name, base in baselines.items():
                if base is None or base == scenario or base not in values:
                    continue
                if v[metrics[0]].size < 2:
                    continue
                tests[name] = {m: _test(v[m], values[base][m], test) for m in metrics}
            rows.append(SummaryRow(ds, clf, scenario, summary, tests))
    return SummaryTable(tuple(rows), metrics, test)
