"""Command-line entry point: ``calib run|fit|apply|generate|synthetic|summarize``.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from ..calibrators import (
    CalibrationPoints,
    binning_fit,
    enir_fit,
    load_model,
    pava_fit,
    platt_fit,
    save_model,
)
from ..classifiers import ClassifierSpec
from ..datagen import DgConfig, DggConfig, dg_generate, dgg_group
from ..dataset import DatasetError, load_csv, standardize, write_csv
from ..synthetic import SYNTHETIC_VARIANTS, make_synthetic, write_truth_csv
from .config import SCENARIO_ALIASES, ConfigError, CsvSource, ExperimentConfig, SyntheticSource
from .reports import emit_reports, load_results
from .runner import IMBALANCE_LEVELS, run_experiment, run_imbalance_study
from .summary import summarize

log = logging.getLogger("calib")

CLASSIFIERS = {"nb": "naive_bayes", "rf": "random_forest"}
DEFAULT_SCENARIOS = "raw,enir,enir-full,dg,dgg"
# per-class size of the synthetic imbalance base: levels 25..100 give 3% to 11% positives
IMBALANCE_BASE_N = 800


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors map to exit code 1."""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def _scenarios(text: str) -> tuple[str, ...]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in names if s not in SCENARIO_ALIASES]
    if unknown:
        raise ConfigError(f"unknown scenarios {unknown}; choose from {sorted(SCENARIO_ALIASES)}")
    return tuple(SCENARIO_ALIASES[s] for s in names)


def _levels(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"--levels must be comma-separated integers, got {text!r}") from None


def _add_run(sub) -> None:
    p = sub.add_parser("run", help="run a scenario grid under stratified k-fold CV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", type=Path, help="CSV dataset")
    src.add_argument("--synthetic", action="store_true", help="two-Gaussian synthetic dataset")
    src.add_argument(
        "--imbalance", nargs="?", const="synthetic", metavar="CSV",
        help="class-imbalance study on a CSV base (or a synthetic base when no path is given)",
    )
    p.add_argument("--label-col", help="label column of the CSV")
    p.add_argument("--positive", help="value of the label column that marks the positive class")
    p.add_argument("--classifier", choices=sorted(CLASSIFIERS), default="nb")
    p.add_argument("--scenarios", default=DEFAULT_SCENARIOS, help="comma-separated: " + ",".join(SCENARIO_ALIASES))
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--cal-fraction", type=float, default=0.10)
    p.add_argument("--dg-points", type=int, default=2000)
    p.add_argument("--dg-holdout", type=float, default=0.10)
    p.add_argument("--dgg-group", type=int, default=20)
    p.add_argument("--clip", type=float, default=1e-6, help="logloss clipping epsilon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--ntree", type=int, default=500)
    p.add_argument("--mtry", type=int, default=None, help="fixed mtry (default: tune on OOB error)")
    p.add_argument("--test", choices=("welch", "paired"), default="welch")
    p.add_argument("--bic", choices=("bernoulli", "gaussian"), default="bernoulli")
    p.add_argument("--threshold-data", choices=("fit_points", "training_fold"), default="fit_points")
    p.add_argument(
        "--synthetic-n", type=int, default=None,
        help="samples per class of the synthetic data (default 100; 800 as an imbalance base)",
    )
    p.add_argument("--synthetic-variant", choices=sorted(SYNTHETIC_VARIANTS), default="shared")
    p.add_argument("--levels", default=",".join(map(str, IMBALANCE_LEVELS)), help="imbalance levels")
    p.add_argument("--threads", type=int, default=1, help="fold workers (capped by CALIB_THREADS)")
    p.set_defaults(func=cmd_run)


def _config(args) -> ExperimentConfig:
    needs_csv = args.data is not None or args.imbalance not in (None, "synthetic")
    if needs_csv and (args.label_col is None or args.positive is None):
        raise ConfigError("CSV input needs --label-col and --positive")
    if args.data is not None:
        source = CsvSource(args.data, args.label_col, args.positive)
    elif needs_csv:
        source = CsvSource(Path(args.imbalance), args.label_col, args.positive)
    else:
        n = args.synthetic_n or (IMBALANCE_BASE_N if args.imbalance else 100)
        source = SyntheticSource(n, SYNTHETIC_VARIANTS[args.synthetic_variant])
    try:
        spec = ClassifierSpec(
            kind=CLASSIFIERS[args.classifier], rf_ntree=args.ntree, rf_mtry=args.mtry, seed=args.seed
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = ExperimentConfig(
        source=source,
        classifier=spec,
        scenarios=_scenarios(args.scenarios),
        folds=args.folds,
        cal_fraction=args.cal_fraction,
        dg_points=args.dg_points,
        dg_holdout=args.dg_holdout,
        dgg_group=args.dgg_group,
        clip_epsilon=args.clip,
        bic=args.bic,
        threshold_data=args.threshold_data,
        seed=args.seed,
        test=args.test,
        threads=args.threads,
        out_dir=args.out,
    )
    cfg.validate()
    return cfg


def cmd_run(args) -> int:
    cfg = _config(args)
    if args.imbalance is not None:
        from .runner import load_dataset

        base = load_dataset(cfg)
        records, shares = run_imbalance_study(base, _levels(args.levels), cfg)
    else:
        records, shares = run_experiment(cfg), None
    table = summarize(records, cfg.test)
    paths = emit_reports(table, records, cfg.out_dir, cfg.describe())
    if shares is not None:
        with (cfg.out_dir / "positive_shares.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["dataset", "positive_share"])
            w.writerows([k, f"{v:.6f}"] for k, v in shares.items())
    print(paths["summary.md"].read_text(encoding="utf-8"))
    log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    return 0


def _add_summarize(sub) -> None:
    p = sub.add_parser("summarize", help="rebuild the reports from a results.json")
    p.add_argument("results", type=Path, help="results.json or a directory holding it")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--test", choices=("welch", "paired"), default="welch")
    p.set_defaults(func=cmd_summarize)


def cmd_summarize(args) -> int:
    records = load_results(args.results)
    emit_reports(summarize(records, args.test), records, args.out)
    return 0


def _add_fit(sub) -> None:
    p = sub.add_parser("fit", help="fit a calibrator to a points CSV (score,target[,weight])")
    p.add_argument("points", type=Path)
    p.add_argument("--method", choices=("enir", "isotonic", "platt", "binning"), default="enir")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--bic", choices=("bernoulli", "gaussian"), default="bernoulli")
    p.add_argument("--out", type=Path, required=True, help="model JSON")
    p.set_defaults(func=cmd_fit)


def cmd_fit(args) -> int:
    pts = CalibrationPoints.read_csv(args.points)
    if args.method == "enir":
        model = enir_fit(pts, args.bic)
    elif args.method == "isotonic":
        model = pava_fit(pts)
    elif args.method == "platt":
        model = platt_fit(pts)
    else:
        model = binning_fit(pts, args.bins)
    save_model(model, args.out)
    return 0


def _add_apply(sub) -> None:
    p = sub.add_parser("apply", help="map scores through a saved calibrator")
    p.add_argument("model", type=Path, help="model JSON written by 'calib fit'")
    p.add_argument("scores", type=Path, help="CSV with a 'score' column")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_apply)


def cmd_apply(args) -> int:
    model = load_model(args.model)
    with args.scores.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "score" not in rows[0]:
        raise ConfigError(f"{args.scores}: expected a 'score' column")
    scores = np.array([float(r["score"]) for r in rows])
    if not np.all(np.isfinite(scores)):
        raise ConfigError(f"{args.scores}: scores must be finite")
    probs = model.predict(scores)
    with args.out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["score", "probability"])
        w.writerows([repr(float(s)), repr(float(p))] for s, p in zip(scores, probs))
    return 0


def _add_generate(sub) -> None:
    p = sub.add_parser("generate", help="export DG (or DGG) calibration points for a CSV dataset")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--label-col", required=True)
    p.add_argument("--positive", required=True)
    p.add_argument("--classifier", choices=sorted(CLASSIFIERS), default="nb")
    p.add_argument("--dg-points", type=int, default=2000)
    p.add_argument("--dg-holdout", type=float, default=0.10)
    p.add_argument("--group", type=int, default=None, help="DGG group size (default: no grouping)")
    p.add_argument("--ntree", type=int, default=500)
    p.add_argument("--mtry", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="points CSV")
    p.set_defaults(func=cmd_generate)


def cmd_generate(args) -> int:
    from .runner import _tuned_spec

    ds = load_csv(args.data, args.label_col, args.positive)
    ds, _, _ = standardize(ds)
    spec = ClassifierSpec(CLASSIFIERS[args.classifier], rf_ntree=args.ntree, rf_mtry=args.mtry)
    spec = _tuned_spec(ds, spec, args.seed)
    try:
        dg_cfg = DgConfig(args.dg_points, args.dg_holdout, args.seed, spec)
        grouping = None if args.group is None else DggConfig(args.group)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    pts = dg_generate(ds, dg_cfg)
    if grouping is not None:
        pts = dgg_group(pts, grouping)
    pts.to_csv(args.out)
    return 0


def _add_synthetic(sub) -> None:
    p = sub.add_parser("synthetic", help="write a synthetic dataset CSV and its truth CSV")
    p.add_argument("--n-per-class", type=int, default=100)
    p.add_argument("--variant", choices=sorted(SYNTHETIC_VARIANTS), default="shared")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="dataset CSV")
    p.add_argument("--truth", type=Path, default=None, help="truth CSV (row_id,true_prob)")
    p.set_defaults(func=cmd_synthetic)


def cmd_synthetic(args) -> int:
    try:
        ds, truth = make_synthetic(args.n_per_class, args.seed, SYNTHETIC_VARIANTS[args.variant])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_csv(ds, args.out)
    if args.truth is not None:
        write_truth_csv(truth, args.truth)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="calib", description="Classifier calibration toolkit and benchmark harness.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for add in (_add_run, _add_summarize, _add_fit, _add_apply, _add_generate, _add_synthetic):
        add(sub)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, DatasetError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures map to exit code 2
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
