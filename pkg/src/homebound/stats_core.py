"""Shared regression kernels: OLS with inference, nested F-tests, differencing,
and the logit link.

OLS is solved through a pivoted QR decomposition rather than the normal
equations; rank deficiency is detected against a tolerance of 1e-10 relative
to the largest column norm, and the offending column is named in the error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DataError,
    DomainError,
    InsufficientObservationsError,
    SingularDesignError,
)
from .special import f_cdf

RANK_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class OlsFit:
    """Least-squares fit with classical (homoskedastic) inference.

    ``coefficients`` follow the design's column order, intercept first when
    the design carries one. ``adjusted_r2`` uses the intercept-inclusive
    total sum of squares.
    """

    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float
    tss: float
    n_obs: int
    n_params: int
    coefficient_standard_errors: np.ndarray
    t_statistics: np.ndarray
    adjusted_r2: float

    @property
    def df_residual(self) -> int:
        return self.n_obs - self.n_params

    @property
    def r_squared(self) -> float:
        if self.tss <= 0.0:
            return float("nan")
        return 1.0 - self.rss / self.tss


@dataclass(frozen=True)
class NestedFTest:
    """Joint F-test that the regressors added by the larger model are zero."""

    f_statistic: float
    df_num: int
    df_den: int
    p_value: float


def ols_fit(design, response) -> OlsFit:
    """Fit ``response`` on the columns of ``design`` by least squares.

    Parameters
    ----------
    design : (n, k) array_like
        Design matrix, including the intercept column if one is wanted.
    response : (n,) array_like
        Dependent variable.

    Raises
    ------
    InsufficientObservationsError
        If ``n <= k``.
    SingularDesignError
        If the design is rank deficient; the message names the offending
        column index.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim != 2:
        raise DomainError("design must be a 2-D matrix")
    n, k = X.shape
    if y.shape != (n,):
        raise DomainError(f"response length {y.shape} does not match design rows {n}")
    if n <= k:
        raise InsufficientObservationsError(
            f"need more observations than parameters: n={n}, k={k}"
        )

    col_norms = np.linalg.norm(X, axis=0)
    q, r, pivot = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    threshold = RANK_TOLERANCE * max(col_norms.max(), np.finfo(float).tiny)
    small = diag < threshold
    if small.any():
        offender = int(pivot[int(np.argmax(small))])
        raise SingularDesignError(
            f"design matrix is rank deficient; column {offender} is linearly "
            "dependent on the others"
        )

    coef_pivoted = scipy.linalg.solve_triangular(r, q.T @ y)
    coefficients = np.empty(k)
    coefficients[pivot] = coef_pivoted

    residuals = y - X @ coefficients
    rss = float(residuals @ residuals)
    sigma2 = rss / (n - k)

    r_inv = scipy.linalg.solve_triangular(r, np.eye(k))
    xtx_inv_diag_pivoted = np.einsum("ij,ij->i", r_inv, r_inv)
    variance = np.empty(k)
    variance[pivot] = sigma2 * xtx_inv_diag_pivoted
    standard_errors = np.sqrt(np.maximum(variance, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_statistics = coefficients / standard_errors

    tss = float(((y - y.mean()) ** 2).sum())
    if tss > 0.0:
        adjusted_r2 = 1.0 - (rss / (n - k)) / (tss / (n - 1))
    else:
        adjusted_r2 = float("nan")

    return OlsFit(
        coefficients=coefficients,
        residuals=residuals,
        rss=rss,
        tss=tss,
        n_obs=n,
        n_params=k,
        coefficient_standard_errors=standard_errors,
        t_statistics=t_statistics,
        adjusted_r2=adjusted_r2,
    )


def nested_f_test(restricted: OlsFit, unrestricted: OlsFit) -> NestedFTest:
    """F-test of the restricted model against a strictly larger one.

    F = ((RSS_r - RSS_u) / p) / (RSS_u / (n - k_u)) with p the number of
    added regressors; the p-value is the upper tail of F(p, n - k_u).
    """
    if restricted.n_obs != unrestricted.n_obs:
        raise DataError(
            "nested models must be fitted on the same response "
            f"(n={restricted.n_obs} vs n={unrestricted.n_obs})"
        )
    df_num = unrestricted.n_params - restricted.n_params
    if df_num <= 0:
        raise DataError("unrestricted model must add at least one regressor")
    slack = 1e-12 * max(1.0, unrestricted.rss)
    if restricted.rss < unrestricted.rss - slack:
        raise DataError(
            "restricted RSS is below unrestricted RSS; the models are not nested"
        )
    df_den = unrestricted.n_obs - unrestricted.n_params
    if df_den <= 0:
        raise InsufficientObservationsError(
            "no residual degrees of freedom in the unrestricted model"
        )
    numerator = max(restricted.rss - unrestricted.rss, 0.0) / df_num
    if unrestricted.rss <= 0.0:
        if numerator <= 0.0:
            return NestedFTest(0.0, df_num, df_den, 1.0)
        return NestedFTest(float("inf"), df_num, df_den, 0.0)
    f_statistic = numerator / (unrestricted.rss / df_den)
    p_value = 1.0 - f_cdf(f_statistic, df_num, df_den)
    return NestedFTest(f_statistic, df_num, df_den, min(max(p_value, 0.0), 1.0))


def difference(series, order: int = 1) -> np.ndarray:
    """First (or higher-order) difference: out[i] = in[i+1] - in[i]."""
    values = np.asarray(series, dtype=float)
    if order < 0:
        raise DomainError("differencing order must be nonnegative")
    if values.ndim != 1:
        raise DomainError("series must be one-dimensional")
    if values.shape[0] < order + 1:
        raise DataError(
            f"series of length {values.shape[0]} cannot be differenced {order} time(s)"
        )
    if order == 0:
        return values.copy()
    return np.diff(values, n=order)


def logit(value: float) -> float:
    """Forward logit link: ln(v / (1 - v)) for v in the open unit interval."""
    if not 0.0 < value < 1.0:
        raise DomainError(f"logit is defined on (0, 1), got {value}")
    return float(np.log(value) - np.log1p(-value))


def inv_logit(value: float) -> float:
    """Inverse logit link 1 / (1 + exp(-v)), overflow safe."""
    if value >= 0.0:
        return float(1.0 / (1.0 + np.exp(-value)))
    e = np.exp(value)
    return float(e / (1.0 + e))


def significance_stars(p_value: float) -> str:
    """Conventional star markers: *** p<0.01, ** p<0.05, * p<0.1."""
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.1:
        return "*"
    return ""
