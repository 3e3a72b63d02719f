"""Class-imbalance study: downsample each class in turn to 100, 50 and 25 rows.

The base is the synthetic two-Gaussian data (800 per class by default) or a
CSV. Each of the six derived datasets gets the full scenario grid; reports
and the positive share of every dataset go to --out.

    python3 scripts/imbalance_study.py --classifier random_forest --out runs/imbalance
    python3 scripts/imbalance_study.py --csv data/anes96.csv --label-col vote --positive 1 --out runs/anes
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

from calib.classifiers import ClassifierSpec
from calib.dataset import load_csv
from calib.harness.config import ExperimentConfig
from calib.harness.reports import emit_reports
from calib.harness.runner import IMBALANCE_LEVELS, run_imbalance_study
from calib.harness.summary import summarize
from calib.synthetic import make_synthetic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--csv", type=Path, default=None)
    ap.add_argument("--label-col")
    ap.add_argument("--positive")
    ap.add_argument("--n-per-class", type=int, default=800, help="synthetic base size per class")
    ap.add_argument("--classifier", choices=("naive_bayes", "random_forest"), default="random_forest")
    ap.add_argument("--ntree", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, required=True)
    args = ap.parse_args()

    if args.csv is not None:
        base = load_csv(args.csv, args.label_col, args.positive)
    else:
        base, _ = make_synthetic(args.n_per_class, args.seed)
    cfg = ExperimentConfig(
        classifier=ClassifierSpec(args.classifier, rf_ntree=args.ntree),
        scenarios=("raw", "enir", "enir_full", "dg_enir", "dgg_enir"),
        seed=args.seed,
    )
    records, shares = run_imbalance_study(base, IMBALANCE_LEVELS, cfg)
    paths = emit_reports(summarize(records), records, args.out, cfg.describe())
    with (args.out / "positive_shares.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "positive_share"])
        w.writerows([k, f"{v:.6f}"] for k, v in shares.items())
    print(paths["summary.md"].read_text(encoding="utf-8"))
    for name, share in shares.items():
        print(f"{name}: {100 * share:.1f}% positives")


if __name__ == "__main__":
    main()
