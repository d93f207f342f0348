"""One-week-ahead fatality forecaster.

The model is the unrestricted lag regression with three lags of each series,
fitted on levels: y(t) on an intercept, y(t-1..3), and h(t-1..3). The
backtest refits on all strictly prior weeks for each holdout week, so no
future data ever enters a prediction.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientObservationsError
from .ingest import WeeklyPair
from .special import t_cdf
from .stats_core import ols_fit

LAGS = 3
# 3 lags consume 3 weeks and the model has 7 parameters, so 11 weeks is the
# smallest span leaving a residual degree of freedom (8 rows, 7 parameters).
MIN_TRAINING_WEEKS = 11


@dataclass(frozen=True)
class VarModel:
    """Fitted one-step forecaster.

    ``death_coefficients`` multiply y(t-1..3) and ``mobility_coefficients``
    multiply h(t-1..3), both ordered by increasing lag. ``standard_errors``
    and ``p_values`` align with (intercept, y lags, h lags). ``r2`` is the
    plain in-sample R-squared and ``residual_se`` the residual standard
    error sqrt(RSS / (n - k)).
    """

    intercept: float
    death_coefficients: tuple[float, float, float]
    mobility_coefficients: tuple[float, float, float]
    r2: float
    residual_se: float
    standard_errors: tuple[float, ...]
    p_values: tuple[float, ...]

    def __post_init__(self):
        if len(self.death_coefficients) != LAGS or len(self.mobility_coefficients) != LAGS:
            raise DomainError(f"exactly {LAGS} + {LAGS} lag coefficients are required")


@dataclass(frozen=True)
class BacktestPoint:
    week_start: object
    actual: float
    predicted: float


def _lag_design(weekly: WeeklyPair) -> tuple[np.ndarray, np.ndarray]:
    y = weekly.deaths
    h = weekly.h_us
    n = len(weekly)
    rows = n - LAGS
    columns = [np.ones(rows)]
    columns += [y[LAGS - i : n - i] for i in range(1, LAGS + 1)]
    columns += [h[LAGS - i : n - i] for i in range(1, LAGS + 1)]
    return np.column_stack(columns), y[LAGS:]


def var_fit(weekly: WeeklyPair) -> VarModel:
    """Fit the forecaster on a weekly pair of at least 10 complete weeks."""
    if len(weekly) < MIN_TRAINING_WEEKS:
        raise InsufficientObservationsError(
            f"fit needs at least {MIN_TRAINING_WEEKS} complete weeks, got {len(weekly)}"
        )
    design, response = _lag_design(weekly)
    fit = ols_fit(design, response)
    df = fit.df_residual
    p_values = []
    for t in fit.t_statistics:
        if not np.isfinite(t):
            p_values.append(0.0)
        else:
            p_values.append(2.0 * (1.0 - t_cdf(abs(float(t)), df)))
    coef = fit.coefficients
    return VarModel(
        intercept=float(coef[0]),
        death_coefficients=tuple(float(v) for v in coef[1 : 1 + LAGS]),
        mobility_coefficients=tuple(float(v) for v in coef[1 + LAGS :]),
        r2=float(fit.r_squared),
        residual_se=float(np.sqrt(fit.rss / df)),
        standard_errors=tuple(float(v) for v in fit.coefficient_standard_errors),
        p_values=tuple(p_values),
    )


def var_predict_one(model: VarModel, last3_h, last3_y) -> float:
    """One-step prediction from the three most recent values of each series,
    ordered most-recent-first."""
    h = [float(v) for v in last3_h]
    y = [float(v) for v in last3_y]
    if len(h) != LAGS or len(y) != LAGS:
        raise DomainError(f"exactly {LAGS} trailing values of each series are required")
    prediction = model.intercept
    prediction += sum(c * v for c, v in zip(model.death_coefficients, y))
    prediction += sum(c * v for c, v in zip(model.mobility_coefficients, h))
    return float(prediction)


def rolling_backtest(weekly: WeeklyPair, holdout_weeks: int) -> list[BacktestPoint]:
    """Refit on all strictly prior weeks for each of the last ``holdout_weeks``
    weeks and predict one step ahead."""
    if holdout_weeks < 1:
        raise DomainError("holdout_weeks must be at least 1")
    n = len(weekly)
    if n - holdout_weeks < MIN_TRAINING_WEEKS:
        raise InsufficientObservationsError(
            f"backtest needs at least {MIN_TRAINING_WEEKS + holdout_weeks} weeks "
            f"({MIN_TRAINING_WEEKS} training + {holdout_weeks} holdout), got {n}"
        )
    points = []
    for target in range(n - holdout_weeks, n):
        training = weekly.head(target)
        model = var_fit(training)
        last3_h = training.h_us[-1 : -LAGS - 1 : -1]
        last3_y = training.deaths[-1 : -LAGS - 1 : -1]
        predicted = var_predict_one(model, last3_h, last3_y)
        points.append(
            BacktestPoint(
                week_start=weekly.week_starts[target],
                actual=float(weekly.deaths[target]),
                predicted=predicted,
            )
        )
    return points


def write_backtest_csv(points, path) -> None:
    """Write ``week_start,actual,predicted`` rows for external plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["week_start", "actual", "predicted"])
        for point in points:
            writer.writerow(
                [point.week_start.isoformat(), repr(point.actual), repr(point.predicted)]
            )
