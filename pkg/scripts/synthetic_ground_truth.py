"""Distance to the true posterior on the two-Gaussian synthetic data.

Runs every scenario for naive Bayes and random forest over several master
seeds (10-fold CV each) and prints the mean MSE against the exact posterior,
pooled over seeds and folds, with Welch p-values against Raw.

    python3 scripts/synthetic_ground_truth.py --seeds 5 --out runs/synthetic
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from calib.classifiers import ClassifierSpec
from calib.harness.config import SCENARIO_LABELS, ExperimentConfig, SyntheticSource
from calib.harness.reports import emit_reports
from calib.harness.runner import run_experiment
from calib.harness.summary import summarize
from calib.stats import welch_t_test
from calib.synthetic import SYNTHETIC_VARIANTS

SCENARIOS = {
    "naive_bayes": ("raw", "enir", "enir_full", "dg_enir", "dgg_enir", "platt", "platt_full"),
    "random_forest": ("raw", "enir", "enir_full", "dg_enir", "dgg_enir", "enir_oob", "platt"),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--n-per-class", type=int, default=100)
    ap.add_argument("--variant", choices=sorted(SYNTHETIC_VARIANTS), default="shared")
    ap.add_argument("--ntree", type=int, default=500)
    ap.add_argument("--out", type=Path, default=None, help="write per-seed reports here")
    args = ap.parse_args()

    source = SyntheticSource(args.n_per_class, SYNTHETIC_VARIANTS[args.variant])
    for kind, scenarios in SCENARIOS.items():
        pooled: dict[str, list[float]] = {s: [] for s in scenarios}
        for seed in range(args.seeds):
            cfg = ExperimentConfig(
                source=source,
                classifier=ClassifierSpec(kind, rf_ntree=args.ntree),
                scenarios=scenarios,
                seed=seed,
            )
            records = run_experiment(cfg)
            for r in records:
                pooled[r.scenario].append(r.metrics.mse_vs_truth)
            if args.out is not None:
                emit_reports(summarize(records), records, args.out / kind / f"seed{seed}", cfg.describe())
        raw = np.array(pooled["raw"])
        print(f"\n{kind}: mean MSE vs truth over {args.seeds} seeds x 10 folds")
        for s in scenarios:
            v = np.array(pooled[s])
            p = "" if s == "raw" else f"  p vs Raw {welch_t_test(v, raw).p_value:.3g}"
            print(f"  {SCENARIO_LABELS[s]:<12} {v.mean():.4f} ± {v.std(ddof=1):.4f}{p}")


if __name__ == "__main__":
    main()
