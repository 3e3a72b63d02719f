"""Write the two public CSV datasets bundled under data/.

breast_cancer.csv: Wisconsin diagnostic breast cancer (569 rows, 30 features),
label column ``diagnosis`` with values malignant/benign.
anes96.csv: 1996 American National Election Study extract (944 rows),
label column ``vote`` (1 = Dole, 0 = Clinton).

Needs scikit-learn and statsmodels, which the package itself does not use.
"""

from __future__ import annotations

import csv
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"


def _write(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path}")


def breast_cancer() -> None:
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()
    names = [n.replace(" ", "_") for n in bunch.feature_names]
    rows = (
        [*(repr(float(v)) for v in x), bunch.target_names[t]]
        for x, t in zip(bunch.data, bunch.target)
    )
    _write(DATA / "breast_cancer.csv", [*names, "diagnosis"], rows)


def anes96() -> None:
    import statsmodels.api as sm

    df = sm.datasets.anes96.load_pandas().data
    features = [c for c in df.columns if c != "vote"]
    rows = ([*(repr(float(v)) for v in r[features]), int(r["vote"])] for _, r in df.iterrows())
    _write(DATA / "anes96.csv", [*features, "vote"], rows)


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    breast_cancer()
    anes96()
