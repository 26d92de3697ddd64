"""Paired t-test and rank correlation for comparing solver runs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

# two-sided alpha = 0.05 critical values of Student's t, df 1..200
T_CRIT_975 = (
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,  # df 1-10
    2.201, 2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,  # df 11-20
    2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,  # df 21-30
    2.040, 2.037, 2.035, 2.032, 2.030, 2.028, 2.026, 2.024, 2.023, 2.021,  # df 31-40
    2.020, 2.018, 2.017, 2.015, 2.014, 2.013, 2.012, 2.011, 2.010, 2.009,  # df 41-50
    2.008, 2.007, 2.006, 2.005, 2.004, 2.003, 2.002, 2.002, 2.001, 2.000,  # df 51-60
    2.000, 1.999, 1.998, 1.998, 1.997, 1.997, 1.996, 1.995, 1.995, 1.994,  # df 61-70
    1.994, 1.993, 1.993, 1.993, 1.992, 1.992, 1.991, 1.991, 1.990, 1.990,  # df 71-80
    1.990, 1.989, 1.989, 1.989, 1.988, 1.988, 1.988, 1.987, 1.987, 1.987,  # df 81-90
    1.986, 1.986, 1.986, 1.986, 1.985, 1.985, 1.985, 1.984, 1.984, 1.984,  # df 91-100
    1.984, 1.983, 1.983, 1.983, 1.983, 1.983, 1.982, 1.982, 1.982, 1.982,  # df 101-110
    1.982, 1.981, 1.981, 1.981, 1.981, 1.981, 1.980, 1.980, 1.980, 1.980,  # df 111-120
    1.980, 1.980, 1.979, 1.979, 1.979, 1.979, 1.979, 1.979, 1.979, 1.978,  # df 121-130
    1.978, 1.978, 1.978, 1.978, 1.978, 1.978, 1.977, 1.977, 1.977, 1.977,  # df 131-140
    1.977, 1.977, 1.977, 1.977, 1.976, 1.976, 1.976, 1.976, 1.976, 1.976,  # df 141-150
    1.976, 1.976, 1.976, 1.975, 1.975, 1.975, 1.975, 1.975, 1.975, 1.975,  # df 151-160
    1.975, 1.975, 1.975, 1.975, 1.974, 1.974, 1.974, 1.974, 1.974, 1.974,  # df 161-170
    1.974, 1.974, 1.974, 1.974, 1.974, 1.974, 1.973, 1.973, 1.973, 1.973,  # df 171-180
    1.973, 1.973, 1.973, 1.973, 1.973, 1.973, 1.973, 1.973, 1.973, 1.973,  # df 181-190
    1.972, 1.972, 1.972, 1.972, 1.972, 1.972, 1.972, 1.972, 1.972, 1.972,  # df 191-200

)
NORMAL_975 = 1.960


def t_critical(df: int) -> float:
    if df < 1:
        raise ValueError("degrees of freedom must be at least 1")
    if df > len(T_CRIT_975):
        return NORMAL_975
    return T_CRIT_975[df - 1]


@dataclass(frozen=True)
class TTestResult:
    n_pairs: int
    mean: float
    sd: float
    t_value: float
    ci_low: float
    ci_high: float


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Paired t-test on the differences ``a[i] - b[i]`` with a 95% confidence interval.

    When every difference is equal the standard deviation is zero: t is +-inf
    for a nonzero mean and nan for a zero mean, and the interval collapses
    onto the mean.
    """
    if len(a) != len(b):
        raise ValueError("samples must be paired (equal lengths)")
    n = len(a)
    if n < 2:
        raise ValueError("a paired t-test needs at least two pairs")
    diffs = [x - y for x, y in zip(a, b)]
    mean = math.fsum(diffs) / n
    sd = math.sqrt(math.fsum((d - mean) ** 2 for d in diffs) / (n - 1))
    if sd == 0.0:
        t = math.copysign(math.inf, mean) if mean != 0 else math.nan
        return TTestResult(n, mean, 0.0, t, mean, mean)
    se = sd / math.sqrt(n)
    half = t_critical(n - 1) * se
    return TTestResult(n, mean, sd, mean / se, mean - half, mean + half)


def _average_ranks(xs: Sequence[float]) -> list[float]:
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman_trend(es: Sequence[float], vcs: Sequence[float]) -> float:
    """Spearman's rho with average ranks for ties; 0 when either series is constant."""
    if len(es) != len(vcs):
        raise ValueError("series must have equal lengths")
    if len(es) < 3:
        raise ValueError("need at least three points")
    rx, ry = _average_ranks(es), _average_ranks(vcs)
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    sxy = sum((u - mx) * (v - my) for u, v in zip(rx, ry))
    sxx = sum((u - mx) ** 2 for u in rx)
    syy = sum((v - my) ** 2 for v in ry)
    if sxx == 0 or syy == 0:
        return 0.0
    return max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
