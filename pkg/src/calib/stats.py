"""Two-sided t-tests for comparing scenarios across folds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.special import betainc

ALPHA = 0.05


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    variant: Literal["welch_unpaired", "paired"]
    degenerate: bool = False

    @property
    def significant(self) -> bool:
        return self.p_value < ALPHA


def t_cdf(t: float, df: float) -> float:
    """Student-t CDF through the regularised incomplete beta function."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if t == 0:
        return 0.5
    tail = 0.5 * float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return tail if t < 0 else 1.0 - tail


def two_sided_p(t: float, df: float) -> float:
    if math.isinf(t):
        return 0.0
    return float(min(1.0, betainc(df / 2.0, 0.5, df / (df + t * t))))


def _negligible(spread: float, *samples: np.ndarray) -> bool:
    """True when a standard deviation is pure rounding noise relative to the data."""
    scale = max(float(np.max(np.abs(x))) for x in samples)
    return spread <= 64 * np.finfo(float).eps * scale


def _as_sample(x: Sequence[float], name: str) -> np.ndarray:
    a = np.asarray(x, dtype=float).ravel()
    if a.size < 2:
        raise ValueError(f"{name} needs at least 2 values, got {a.size}")
    return a


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Unequal-variance two-sample t-test with Welch-Satterthwaite df."""
    a = _as_sample(a, "a")
    b = _as_sample(b, "b")
    na, nb = a.size, b.size
    va, vb = a.var(ddof=1) / na, b.var(ddof=1) / nb
    diff = a.mean() - b.mean()
    se2 = va + vb
    if _negligible(math.sqrt(se2), a, b):
        if _negligible(abs(diff), a, b):
            return TTestResult(0.0, float(na + nb - 2), 1.0, "welch_unpaired", degenerate=True)
        t = math.copysign(math.inf, diff)
        return TTestResult(t, float(na + nb - 2), 0.0, "welch_unpaired", degenerate=True)
    t = diff / math.sqrt(se2)
    df = se2**2 / (va**2 / (na - 1) + vb**2 / (nb - 1))
    return TTestResult(float(t), float(df), two_sided_p(t, df), "welch_unpaired")


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """One-sample t-test on the differences a - b.

    Constant differences (up to rounding) are flagged ``degenerate``:
    identical inputs give t = 0, p = 1; a constant nonzero shift gives
    t = +/-inf, p = 0.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size:
        raise ValueError(f"paired samples differ in length: {a.size} vs {b.size}")
    d = _as_sample(a - b, "differences")
    n = d.size
    sd = d.std(ddof=1)
    mean = d.mean()
    if _negligible(sd, a, b):
        if _negligible(abs(mean), a, b):
            return TTestResult(0.0, float(n - 1), 1.0, "paired", degenerate=True)
        return TTestResult(math.copysign(math.inf, mean), float(n - 1), 0.0, "paired", degenerate=True)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(float(t), float(n - 1), two_sided_p(t, n - 1), "paired")
