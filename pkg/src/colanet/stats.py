"""Paired t-test on per-task accuracy differences."""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import betainc

from colanet.errors import StatisticsError


class TTestResult(NamedTuple):
    mean: float
    sd: float
    t: float
    p: float
    df: int


def student_t_two_sided_p(t: float, df: int) -> float:
    """Two-sided tail probability ``P(|T| >= |t|)`` for Student's t.

    Uses ``P = I_x(df/2, 1/2)`` with ``x = df / (df + t^2)``. For small
    ``|t|`` the equivalent ``1 - I_{1-x}(1/2, df/2)`` keeps precision where
    ``x`` rounds towards 1.
    """
    if df < 1:
        raise StatisticsError(f"degrees of freedom must be >= 1, got {df}")
    if math.isinf(t):
        return 0.0
    t2 = t * t
    if t2 < df:
        return float(1.0 - betainc(0.5, df / 2.0, t2 / (df + t2)))
    return float(betainc(df / 2.0, 0.5, df / (df + t2)))


def paired_t_test(diffs: Sequence[float]) -> TTestResult:
    """One-sample t-test of ``mean(diffs) == 0``."""
    d = np.asarray(diffs, dtype=float)
    n = d.size
    if n < 2:
        raise StatisticsError(f"need at least 2 differences, got {n}")
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        t = 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
    else:
        t = mean / (sd / math.sqrt(n))
    return TTestResult(mean, sd, t, student_t_two_sided_p(t, n - 1), n - 1)
