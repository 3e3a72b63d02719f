"""Result files: results.json, summary.csv, summary.md and timings.csv."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import SCENARIO_LABELS, SCENARIOS
from .runner import ResultRecord
from .summary import BASELINES, SummaryTable

RESULTS_FILE = "results.json"
SUMMARY_CSV = "summary.csv"
SUMMARY_MD = "summary.md"
TIMINGS_CSV = "timings.csv"

MD_COLUMNS = (
    ("classification_rate", "CR"),
    ("mse", "MSE"),
    ("logloss", "Logloss"),
    ("mse_vs_truth", "MSE (truth)"),
)
# significance markers per baseline
MARKERS = {"raw": "*", "enir_full": "†", "cs": "‡"}


class ReportError(OSError):
    pass


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc


def results_json(records: Sequence[ResultRecord], config: dict | None = None) -> str:
    """Canonical JSON of the records; timings are left out so reruns are byte-identical."""
    doc = {
        "config": config,
        "records": [r.to_dict(with_timing=False) for r in sorted(records, key=ResultRecord.key)],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_results(path: str | Path) -> list[ResultRecord]:
    path = Path(path)
    if path.is_dir():
        path = path / RESULTS_FILE
    if not path.exists():
        raise FileNotFoundError(f"no results file at {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ReportError(f"cannot read {path}: {exc}") from exc
    return [ResultRecord.from_dict(d) for d in doc["records"]]


def _summary_rows(table: SummaryTable) -> tuple[list[str], list[list]]:
    header = ["dataset", "classifier", "scenario"]
    for m in table.metrics:
        header += [f"{m}_mean", f"{m}_sd"]
    for b in BASELINES:
        for m in table.metrics:
            header += [f"p_{m}_vs_{b}", f"sig_{m}_vs_{b}"]
    rows = []
    for r in table.rows:
        row: list = [r.dataset, r.classifier, r.scenario]
        for m in table.metrics:
            row += [repr(r.metrics[m].mean), repr(r.metrics[m].sd)]
        for b in BASELINES:
            for m in table.metrics:
                t = r.tests.get(b, {}).get(m)
                row += ["", ""] if t is None else [repr(t.p_value), int(t.significant)]
        rows.append(row)
    return header, rows


def _markdown(table: SummaryTable) -> str:
    cols = [(m, label) for m, label in MD_COLUMNS if m in table.metrics]
    lines = [
        f"Mean ± SD over folds. Markers: p < 0.05 ({table.test} t-test) vs "
        "Raw (*), ENIR full (†), classifier-specific baseline (‡).",
        "",
    ]
    for ds, clf in table.groups():
        lines += [f"## {ds} / {clf}", ""]
        lines.append("| Scenario | " + " | ".join(label for _, label in cols) + " |")
        lines.append("|" + "---|" * (len(cols) + 1))
        rows = [r for r in table.rows if (r.dataset, r.classifier) == (ds, clf)]
        for r in rows:
            cells = []
            for m, _ in cols:
                s = r.metrics[m]
                marks = "".join(MARKERS[b] for b in BASELINES if r.flag(b, m))
                cells.append(f"{s.mean:.3f} ± {s.sd:.3f}{marks}")
            lines.append(f"| {SCENARIO_LABELS[r.scenario]} | " + " | ".join(cells) + " |")
        lines.append("")
    return "\n".join(lines)


def _timing_rows(records: Sequence[ResultRecord]) -> list[list]:
    groups: dict[tuple, list[float]] = {}
    for r in records:
        if r.seconds is not None:
            groups.setdefault((r.dataset, r.classifier, SCENARIOS.index(r.scenario)), []).append(r.seconds)
    rows = []
    for (ds, clf, si), secs in sorted(groups.items()):
        a = np.asarray(secs)
        rows.append([ds, clf, SCENARIOS[si], len(a), f"{a.mean():.6f}", f"{a.sum():.6f}"])
    return rows


def emit_reports(
    table: SummaryTable,
    records: Sequence[ResultRecord],
    out_dir: str | Path,
    config: dict | None = None,
) -> dict[str, Path]:
    """Write the four report files into ``out_dir`` and return their paths."""
    if not records:
        raise ValueError("no records to report; nothing written")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"cannot create {out}: {exc}") from exc
    paths = {name: out / name for name in (RESULTS_FILE, SUMMARY_CSV, SUMMARY_MD, TIMINGS_CSV)}

    _write(paths[RESULTS_FILE], results_json(records, config))

    header, rows = _summary_rows(table)
    _write(paths[SUMMARY_CSV], _csv_text([header, *rows]))
    _write(paths[SUMMARY_MD], _markdown(table))
    timing_header = ["dataset", "classifier", "scenario", "folds", "mean_seconds", "total_seconds"]
    _write(paths[TIMINGS_CSV], _csv_text([timing_header, *_timing_rows(records)]))
    return paths


def _csv_text(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()
