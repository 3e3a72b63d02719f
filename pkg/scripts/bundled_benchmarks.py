"""Logloss of every scenario on the four bundled datasets, NB and RF.

The datasets are the two synthetic variants (100 per class) and the two
public CSVs under data/. Prints one summary table per (dataset, classifier)
and writes the reports under --out.

    python3 scripts/bundled_benchmarks.py --out runs/bundled
"""

from __future__ import annotations

import argparse
from dataclasses import replace
from pathlib import Path

from calib.classifiers import ClassifierSpec
from calib.dataset import load_csv
from calib.harness.config import ExperimentConfig
from calib.harness.reports import emit_reports
from calib.harness.runner import run_experiment
from calib.harness.summary import summarize
from calib.synthetic import SYNTHETIC_VARIANTS, make_synthetic

DATA = Path(__file__).resolve().parent.parent / "data"
SCENARIOS = ("raw", "enir", "enir_full", "dg_enir", "dgg_enir", "platt", "platt_full")


def datasets(seed: int):
    for variant, spec in sorted(SYNTHETIC_VARIANTS.items()):
        ds, _ = make_synthetic(100, seed, spec)
        yield replace(ds, name=f"synthetic-{variant}")
    yield load_csv(DATA / "breast_cancer.csv", "diagnosis", "malignant")
    yield load_csv(DATA / "anes96.csv", "vote", "1")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--ntree", type=int, default=500)
    ap.add_argument("--out", type=Path, required=True)
    args = ap.parse_args()

    records = []
    for ds in datasets(args.seed):
        for kind in ("naive_bayes", "random_forest"):
            cfg = ExperimentConfig(
                classifier=ClassifierSpec(kind, rf_ntree=args.ntree), scenarios=SCENARIOS, seed=args.seed
            )
            records += run_experiment(cfg, ds)
            print(f"done {ds.name} / {kind}", flush=True)
    # mse_vs_truth exists only for the synthetic rows, so it drops out of the joint table
    paths = emit_reports(summarize(records), records, args.out)
    print(paths["summary.md"].read_text(encoding="utf-8"))


if __name__ == "__main__":
    main()
