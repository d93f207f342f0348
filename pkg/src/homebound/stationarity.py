"""KPSS test for level stationarity.

The null hypothesis is stationarity around a constant; rejection is the
signal to difference a series before running lagged-regression causality
tests. Only the level variant is implemented (no deterministic trend
regressor), since the pipeline differences both series rather than
detrending them.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .errors import DataError, DomainError, ZeroVarianceError

#: Asymptotic critical values for the level-stationarity statistic.
KPSS_CRITICAL_VALUES = MappingProxyType(
    {0.10: 0.347, 0.05: 0.463, 0.025: 0.574, 0.01: 0.739}
)

MIN_OBSERVATIONS = 8


@dataclass(frozen=True)
class KpssResult:
    statistic: float
    truncation_lag: int
    critical_values: MappingProxyType
    reject_at_5pct: bool


def default_truncation_lag(n_obs: int) -> int:
    """Short automatic truncation lag, floor(4 * (T/100)^(1/4))."""
    return int(np.floor(4.0 * (n_obs / 100.0) ** 0.25))


def kpss_test(series, truncation_lag: int | None = None) -> KpssResult:
    """Level-stationarity KPSS test.

    The statistic is T^-2 * sum(S_t^2) / s2(l), where S_t are partial sums
    of the demeaned series and s2(l) is the Bartlett-kernel long-run
    variance with truncation lag l.

    Parameters
    ----------
    series : array_like
        Observed series, at least 8 points, not constant.
    truncation_lag : int, optional
        Bartlett truncation lag; defaults to the automatic rule above.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise DomainError("series must be one-dimensional")
    n = x.shape[0]
    if n < MIN_OBSERVATIONS:
        raise DataError(f"KPSS needs at least {MIN_OBSERVATIONS} observations, got {n}")
    if np.ptp(x) == 0.0:
        raise ZeroVarianceError("KPSS statistic is undefined for a constant series")

    if truncation_lag is None:
        truncation_lag = default_truncation_lag(n)
    if truncation_lag < 0 or truncation_lag >= n:
        raise DomainError(f"truncation lag must lie in [0, {n - 1}], got {truncation_lag}")

    residuals = x - x.mean()
    partial_sums = np.cumsum(residuals)
    long_run_variance = residuals @ residuals / n
    for s in range(1, truncation_lag + 1):
        weight = 1.0 - s / (truncation_lag + 1.0)
        long_run_variance += 2.0 * weight * (residuals[s:] @ residuals[:-s]) / n

    statistic = float(partial_sums @ partial_sums / (n * n * long_run_variance))
    return KpssResult(
        statistic=statistic,
        truncation_lag=truncation_lag,
        critical_values=KPSS_CRITICAL_VALUES,
        reject_at_5pct=statistic > KPSS_CRITICAL_VALUES[0.05],
    )
