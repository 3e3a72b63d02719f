"""Cross-validated scenario runs: standardize, split, train, calibrate, evaluate."""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .._rng import derive_seed
from ..calibrators import CalibrationPoints, IdentityModel, enir_fit, platt_fit
from ..classifiers import ClassifierSpec, fit_classifier, tune_mtry
from ..dataset import Dataset, split_calibration, standardize, stratified_k_fold, subsample_class
from ..datagen import DgConfig, DggConfig, dg_generate, dgg_group
from ..metrics import MetricReport, evaluate, select_threshold
from ..synthetic import make_synthetic
from .config import SCENARIOS, ConfigError, CsvSource, ExperimentConfig, SyntheticSource

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResultRecord:
    dataset: str
    classifier: str
    scenario: str
    fold: int
    metrics: MetricReport
    seconds: float | None = None

    def key(self) -> tuple:
        return (self.dataset, self.classifier, SCENARIOS.index(self.scenario), self.fold)

    def to_dict(self, with_timing: bool = True) -> dict:
        d = {
            "dataset": self.dataset,
            "classifier": self.classifier,
            "scenario": self.scenario,
            "fold": self.fold,
            "metrics": self.metrics.to_dict(),
        }
        if with_timing:
            d["seconds"] = self.seconds
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRecord":
        return cls(
            dataset=d["dataset"],
            classifier=d["classifier"],
            scenario=d["scenario"],
            fold=int(d["fold"]),
            metrics=MetricReport(**d["metrics"]),
            seconds=d.get("seconds"),
        )


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    from ..dataset import load_csv

    src = cfg.source
    if isinstance(src, CsvSource):
        return load_csv(src.path, src.label_column, src.positive_label)
    if isinstance(src, SyntheticSource):
        ds, _ = make_synthetic(src.n_per_class, derive_seed(cfg.seed, "synthetic"), src.spec)
        return ds
    raise ConfigError("the experiment has no data source")


class _Timed:
    """Lazily computed value that remembers how long it took."""

    def __init__(self, fn: Callable):
        self._fn = fn
        self._done = False
        self.value = None
        self.seconds = 0.0

    def get(self):
        if not self._done:
            t0 = time.perf_counter()
            self.value = self._fn()
            self.seconds = time.perf_counter() - t0
            self._done = True
        return self.value


def _tuned_spec(train: Dataset, spec: ClassifierSpec, seed: int) -> ClassifierSpec:
    spec = spec.with_seed(seed)
    if spec.kind == "random_forest" and spec.rf_mtry is None:
        spec = spec.with_mtry(tune_mtry(train, spec))
    return spec


def run_fold(
    ds: Dataset,
    fold: int,
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    cfg: ExperimentConfig,
) -> list[ResultRecord]:
    """All scenarios of one fold.

    Pieces shared between scenarios (the classifier fitted on the whole
    training fold, the 90/10 split model, the DG points) are computed once;
    each scenario's time is the sum of the pieces it uses plus its own
    calibration step.
    """
    seed = lambda *keys: derive_seed(cfg.seed, ds.name, fold, *keys)  # noqa: E731
    train_raw, test_raw = ds.subset(train_idx), ds.subset(test_idx)
    train, (test,), _ = standardize(train_raw, [test_raw])

    def fit_full():
        spec = _tuned_spec(train, cfg.classifier, seed("full"))
        model, oob = fit_classifier(train, spec)
        return spec, model, oob, model.predict_scores(train.features)

    def fit_split():
        model_train, cal = split_calibration(train, cfg.cal_fraction, seed("cal_split"))
        spec = _tuned_spec(model_train, cfg.classifier, seed("split_model"))
        model, _ = fit_classifier(model_train, spec, with_oob=False)
        return model, CalibrationPoints.from_labels(model.predict_scores(cal.features), cal.labels)

    full = _Timed(fit_full)
    split = _Timed(fit_split)

    def generate():
        spec = full.get()[0]
        dg_cfg = DgConfig(cfg.dg_points, cfg.dg_holdout, seed("dg"), spec)
        return dg_generate(train, dg_cfg)

    dg = _Timed(generate)

    records = []
    for scenario in cfg.scenarios:
        if scenario in ("enir", "platt"):
            model, cal = split.get()
            fit_pts = thr_pts = cal
            used = [split]
        else:
            spec, model, oob, train_scores = full.get()
            used = [full]
            resub = CalibrationPoints.from_labels(train_scores, train.labels)
            if scenario in ("raw", "enir_full", "platt_full"):
                fit_pts = thr_pts = resub
            elif scenario == "enir_oob":
                ok = oob.defined
                fit_pts = thr_pts = CalibrationPoints.from_labels(oob.scores[ok], train.labels[ok])
            else:
                thr_pts = dg.get()
                used.append(dg)
                if scenario == "dgg_enir":
                    fit_pts = dgg_group(thr_pts, DggConfig(cfg.dgg_group))
                else:
                    fit_pts = thr_pts
        t_shared_done = time.perf_counter()

        if scenario == "raw":
            calibrator = IdentityModel()
        elif scenario.startswith("platt"):
            calibrator = platt_fit(fit_pts)
        else:
            calibrator = enir_fit(fit_pts, cfg.bic)
        if cfg.threshold_data == "training_fold":
            thr_pts = CalibrationPoints.from_labels(model.predict_scores(train.features), train.labels)
        threshold = select_threshold(calibrator.predict(thr_pts.scores), thr_pts.targets)
        seconds = sum(u.seconds for u in used) + (time.perf_counter() - t_shared_done)

        test_probs = calibrator.predict(model.predict_scores(test.features))
        report = evaluate(
            test_probs, test.labels, threshold, cfg.clip_epsilon, true_probs=test.true_probs
        )
        records.append(
            ResultRecord(ds.name, cfg.classifier.kind, scenario, fold, report, seconds)
        )
    return records


def _n_threads(cfg: ExperimentConfig) -> int:
    env = os.environ.get("CALIB_THREADS")
    cap = int(env) if env else cfg.threads
    return max(1, min(cap, cfg.folds))


def run_experiment(cfg: ExperimentConfig, dataset: Dataset | None = None) -> list[ResultRecord]:
    """Run every configured scenario on every fold of a stratified k-fold split.

    Records come back sorted by (dataset, classifier, scenario, fold) no
    matter how many worker threads ran the folds.
    """
    cfg.validate()
    ds = dataset if dataset is not None else load_dataset(cfg)
    plan = stratified_k_fold(ds, cfg.folds, derive_seed(cfg.seed, ds.name, "folds"))
    jobs = list(plan.splits())
    n_threads = _n_threads(cfg)
    log.info("%s: %d folds, %d scenarios, %d thread(s)", ds.name, cfg.folds, len(cfg.scenarios), n_threads)
    if n_threads == 1:
        chunks = [run_fold(ds, f, tr, te, cfg) for f, tr, te in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            chunks = list(pool.map(lambda j: run_fold(ds, j[0], j[1], j[2], cfg), jobs))
    records = [r for chunk in chunks for r in chunk]
    return sorted(records, key=ResultRecord.key)


IMBALANCE_LEVELS = (100, 50, 25)


def imbalance_datasets(
    base: Dataset, levels: Sequence[int], seed: int
) -> list[Dataset]:
    """Downsample each class in turn to each level; the reduced class becomes the positive one."""
    out = []
    for level in levels:
        for cls in (1, 0):
            have = int(np.sum(base.labels == cls))
            if level > have:
                raise ConfigError(
                    f"imbalance level {level} exceeds the {have} samples of class {cls}"
                )
            sub = subsample_class(base, cls, level, derive_seed(seed, "imbalance", cls, level))
            if cls == 0:
                sub = sub.flipped()
            out.append(replace(sub, name=f"{base.name}-c{cls}-{level}"))
    return out


def run_imbalance_study(
    base: Dataset, levels: Sequence[int], cfg: ExperimentConfig
) -> tuple[list[ResultRecord], dict[str, float]]:
    """Full scenario grid on the six (class x level) downsampled datasets.

    Returns the records and the positive-class share of every derived dataset.
    """
    cfg.validate()
    derived = imbalance_datasets(base, levels, cfg.seed)
    records: list[ResultRecord] = []
    shares = {}
    for ds in derived:
        shares[ds.name] = ds.positive_fraction
        records.extend(run_experiment(cfg, ds))
    return sorted(records, key=ResultRecord.key), shares
