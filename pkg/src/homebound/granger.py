"""Lagged-regression predictive-causality tests on the weekly series.

For lag m, the restricted model regresses y(t) on an intercept and its own
lags y(t-1..t-m); the unrestricted model adds x(t-1..t-m). The joint F-test
of the added lags decides whether x improves the prediction of y beyond y's
own history. Before testing, both series are differenced together (0, 1, or
2 times) until both pass the KPSS 5% level; differencing both keeps the two
models on one transformed scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientObservationsError, NonstationaryError
from .ingest import WeeklyPair
from .special import t_cdf
from .stationarity import kpss_test
from .stats_core import nested_f_test, ols_fit, significance_stars

MAX_DIFFERENCING_ORDER = 2

FORWARD = "forward"  # mobility -> deaths
REVERSE = "reverse"  # deaths -> mobility


@dataclass(frozen=True)
class GrangerLagResult:
    """One lag depth of the scan: added-lag coefficients with their
    t-statistics and stars, plus the joint F verdict."""

    lag: int
    b_coefficients: tuple[float, ...]
    t_statistics: tuple[float, ...] | None
    coefficient_p_values: tuple[float, ...] | None
    stars: tuple[str, ...]
    adjusted_r2: float
    f_statistic: float
    p_value: float

    def __post_init__(self):
        if len(self.b_coefficients) != self.lag:
            raise DomainError(
                f"expected {self.lag} coefficients, got {len(self.b_coefficients)}"
            )
        if not 0.0 <= self.p_value <= 1.0:
            raise DomainError(f"p_value outside [0, 1]: {self.p_value}")


@dataclass(frozen=True)
class GrangerScan:
    """All lag depths for one direction, after joint differencing."""

    direction: str
    differencing_order: int
    results: tuple[GrangerLagResult, ...]

    def __post_init__(self):
        lags = [r.lag for r in self.results]
        if lags != list(range(1, len(lags) + 1)):
            raise DomainError(f"results must cover lags 1..L without gaps, got {lags}")


def _lag_columns(series: np.ndarray, lag: int) -> list[np.ndarray]:
    n = series.shape[0]
    return [series[lag - i : n - i] for i in range(1, lag + 1)]


def granger_test(x, y, lag: int) -> GrangerLagResult:
    """Test whether lags 1..lag of ``x`` jointly improve the prediction of ``y``.

    Requires ``len(y) - lag > 2*lag + 1`` so the unrestricted model keeps
    residual degrees of freedom.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be one-dimensional series of equal length")
    if lag < 1:
        raise DomainError(f"lag must be at least 1, got {lag}")
    n = y.shape[0]
    minimum = 3 * lag + 2
    if n < minimum:
        raise InsufficientObservationsError(
            f"lag {lag} needs at least {minimum} observations, got {n}"
        )

    rows = n - lag
    intercept = np.ones(rows)
    y_lags = _lag_columns(y, lag)
    x_lags = _lag_columns(x, lag)
    response = y[lag:]

    restricted = ols_fit(np.column_stack([intercept, *y_lags]), response)
    unrestricted = ols_fit(np.column_stack([intercept, *y_lags, *x_lags]), response)
    joint = nested_f_test(restricted, unrestricted)

    b = unrestricted.coefficients[1 + lag :]
    t_stats = unrestricted.t_statistics[1 + lag :]
    df = unrestricted.df_residual
    p_values = []
    for t in t_stats:
        if not np.isfinite(t):
            p_values.append(0.0)
        else:
            p_values.append(2.0 * (1.0 - t_cdf(abs(float(t)), df)))
    stars = tuple(significance_stars(p) for p in p_values)

    return GrangerLagResult(
        lag=lag,
        b_coefficients=tuple(float(v) for v in b),
        t_statistics=tuple(float(v) for v in t_stats),
        coefficient_p_values=tuple(p_values),
        stars=stars,
        adjusted_r2=float(unrestricted.adjusted_r2),
        f_statistic=joint.f_statistic,
        p_value=joint.p_value,
    )


def _is_level_stationary(series: np.ndarray) -> bool:
    # A constant series is trivially stationary; KPSS itself cannot run on it.
    if np.ptp(series) == 0.0:
        return True
    return not kpss_test(series).reject_at_5pct


def joint_differencing_order(x, y, max_order: int = MAX_DIFFERENCING_ORDER) -> int:
    """Smallest order d <= max_order at which both series pass KPSS at 5%."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for order in range(max_order + 1):
        dx = np.diff(x, n=order) if order else x
        dy = np.diff(y, n=order) if order else y
        if _is_level_stationary(dx) and _is_level_stationary(dy):
            return order
    raise NonstationaryError(
        f"series remain nonstationary after {max_order} differences"
    )


def granger_scan(weekly: WeeklyPair, max_lag: int = 6, direction: str = "both") -> list[GrangerScan]:
    """Run the full per-lag scan in the requested direction(s).

    Both series are differenced the same number of times before testing;
    the order is recorded on each returned scan.
    """
    if max_lag < 1:
        raise DomainError(f"max_lag must be at least 1, got {max_lag}")
    if direction not in ("both", FORWARD, REVERSE):
        raise DomainError(f"direction must be both|{FORWARD}|{REVERSE}, got {direction!r}")

    order = joint_differencing_order(weekly.h_us, weekly.deaths)
    h = np.diff(weekly.h_us, n=order) if order else weekly.h_us.copy()
    deaths = np.diff(weekly.deaths, n=order) if order else weekly.deaths.copy()

    wanted = [FORWARD, REVERSE] if direction == "both" else [direction]
    scans = []
    for label in wanted:
        x, y = (h, deaths) if label == FORWARD else (deaths, h)
        results = tuple(granger_test(x, y, lag) for lag in range(1, max_lag + 1))
        scans.append(GrangerScan(direction=label, differencing_order=order, results=results))
    return scans


def scan_to_dict(scan: GrangerScan) -> dict:
    return {
        "direction": scan.direction,
        "differencing_order": scan.differencing_order,
        "results": [
            {
                "lag": r.lag,
                "b_coefficients": list(r.b_coefficients),
                "t_statistics": list(r.t_statistics) if r.t_statistics else None,
                "coefficient_p_values": (
                    list(r.coefficient_p_values) if r.coefficient_p_values else None
                ),
                "stars": list(r.stars),
                "adjusted_r2": r.adjusted_r2,
                "f_statistic": r.f_statistic,
                "p_value": r.p_value,
            }
            for r in scan.results
        ],
    }


def scan_from_dict(payload: dict) -> GrangerScan:
    results = tuple(
        GrangerLagResult(
            lag=entry["lag"],
            b_coefficients=tuple(entry["b_coefficients"]),
            t_statistics=tuple(entry["t_statistics"]) if entry.get("t_statistics") else None,
            coefficient_p_values=(
                tuple(entry["coefficient_p_values"])
                if entry.get("coefficient_p_values")
                else None
            ),
            stars=tuple(entry["stars"]),
            adjusted_r2=entry["adjusted_r2"],
            f_statistic=entry["f_statistic"],
            p_value=entry["p_value"],
        )
        for entry in payload["results"]
    )
    return GrangerScan(
        direction=payload["direction"],
        differencing_order=payload["differencing_order"],
        results=results,
    )


def scans_to_json(scans) -> str:
    return json.dumps([scan_to_dict(s) for s in scans], indent=2, sort_keys=True)


def format_scan_table(scan: GrangerScan) -> str:
    """Aligned text table: one column per lag, coefficient rows b1..bL,
    then adjusted R-squared and the joint F with its p-value."""
    max_lag = len(scan.results)
    width = 11
    label_width = 12

    def cell(text: str) -> str:
        return text.rjust(width)

    header_lags = "".join(cell(str(r.lag)) for r in scan.results)
    lines = [
        f"direction: {scan.direction} (differencing order {scan.differencing_order})",
        " " * label_width + "Lag".center(max_lag * width),
        " " * label_width + header_lags,
    ]
    for row in range(max_lag):
        cells = []
        for r in scan.results:
            if row < r.lag:
                cells.append(cell(f"{r.b_coefficients[row]:.1f}{r.stars[row]}"))
            else:
                cells.append(cell("-"))
        lines.append(f"b{row + 1}".ljust(label_width) + "".join(cells))
    lines.append(
        "Adj R2".ljust(label_width)
        + "".join(cell(f"{r.adjusted_r2:.2f}") for r in scan.results)
    )
    lines.append(
        "F".ljust(label_width)
        + "".join(cell(f"{r.f_statistic:.2f}") for r in scan.results)
    )
    lines.append(
        "(p-val)".ljust(label_width)
        + "".join(
            cell(f"({r.p_value:.2f})" if r.p_value >= 0.01 else "(<0.01)")
            for r in scan.results
        )
    )
    lines.append("*** p<0.01, ** p<0.05, * p<0.1")
    return "\n".join(lines)
