"""Beta regression with mean/precision parametrization, fitted by maximum
likelihood.

The response y_i in (0, 1) is modeled as Beta(mu_i * phi, (1 - mu_i) * phi)
with logit(mu_i) = x_i' b and one precision phi shared by all observations,
so the variance at fixed mean is mu(1 - mu)/(1 + phi). The log-likelihood

    l = sum_i [ lnG(phi) - lnG(mu_i phi) - lnG((1-mu_i) phi)
                + (mu_i phi - 1) ln y_i + ((1-mu_i) phi - 1) ln(1-y_i) ]

is maximized by Newton ascent on (b, ln phi) with analytic gradient and
Hessian and step halving; ln phi keeps the precision positive without
constraints. Standard errors come from the observed information matrix in
the (b, phi) parametrization.

Race-share designs that include all five fractions next to an intercept are
exactly collinear; the Newton step and the information inverse fall back to
the Moore-Penrose pseudo-inverse in that case, which picks the minimum-norm
solution (fitted means stay identified).
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma, gammaln, polygamma

from .errors import (
    BoundaryResponseError,
    ConvergenceError,
    DataError,
    DomainError,
)
from .stats_core import significance_stars

GRADIENT_TOLERANCE = 1e-8
MAX_ITERATIONS = 200

RACE_COVARIATES = ("white", "black", "hispanic", "asian", "natives_others")


@dataclass(frozen=True, eq=False)
class CovariateDesign:
    """Per-unit covariates (without intercept) and a (0,1)-valued response."""

    covariates: np.ndarray
    response: np.ndarray
    covariate_names: tuple[str, ...] = ()

    def __post_init__(self):
        x = np.asarray(self.covariates, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.asarray(self.response, dtype=float)
        if x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DomainError("covariate rows and response length differ")
        if y.size and (y.min() <= 0.0 or y.max() >= 1.0):
            raise BoundaryResponseError(
                "responses must lie strictly inside (0, 1); apply "
                "adjust_boundary_responses() to squeeze exact 0/1 values"
            )
        object.__setattr__(self, "covariates", x)
        object.__setattr__(self, "response", y)
        if self.covariate_names and len(self.covariate_names) != x.shape[1]:
            raise DomainError("covariate_names length does not match columns")


@dataclass(frozen=True, eq=False)
class BetaRegFit:
    """MLE result. ``coefficients`` start with the intercept; standard errors
    align with them, and ``phi_standard_error`` covers the precision."""

    coefficients: np.ndarray
    precision_phi: float
    standard_errors: np.ndarray
    phi_standard_error: float
    log_likelihood: float
    n_obs: int
    converged: bool
    iterations: int
    covariate_names: tuple[str, ...] = ()
    loglik_path: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.precision_phi <= 0.0:
            raise DomainError("precision must be positive")

    @classmethod
    def from_parameters(cls, coefficients, phi: float, covariate_names=()) -> "BetaRegFit":
        """Wrap externally known coefficients (e.g. reference fixtures) so
        they can be fed to prediction and resampling routines."""
        coefficients = np.asarray(coefficients, dtype=float)
        nan = float("nan")
        return cls(
            coefficients=coefficients,
            precision_phi=float(phi),
            standard_errors=np.full(coefficients.shape, nan),
            phi_standard_error=nan,
            log_likelihood=nan,
            n_obs=0,
            converged=True,
            iterations=0,
            covariate_names=tuple(covariate_names),
        )


def adjust_boundary_responses(values) -> np.ndarray:
    """Squeeze exact 0/1 responses to y' = (y (N - 1) + 0.5) / N.

    Interior values are returned unchanged; the adjustment applies only to
    the boundary points.
    """
    y = np.asarray(values, dtype=float).copy()
    n = y.shape[0]
    if n == 0:
        return y
    boundary = (y == 0.0) | (y == 1.0)
    y[boundary] = (y[boundary] * (n - 1) + 0.5) / n
    return y


def beta_density_params(mean: float, phi: float) -> tuple[float, float]:
    """Shape pair (mean * phi, (1 - mean) * phi); the resulting distribution
    has the given mean and variance mean (1 - mean) / (1 + phi)."""
    if not 0.0 < mean < 1.0:
        raise DomainError(f"mean must lie in (0, 1), got {mean}")
    if phi <= 0.0:
        raise DomainError(f"phi must be positive, got {phi}")
    return mean * phi, (1.0 - mean) * phi


def beta_log_density(y, mean: float, phi: float):
    """Pointwise log density of the mean/precision beta parametrization."""
    alpha, beta = beta_density_params(mean, phi)
    y = np.asarray(y, dtype=float)
    return (
        gammaln(phi)
        - gammaln(alpha)
        - gammaln(beta)
        + (alpha - 1.0) * np.log(y)
        + (beta - 1.0) * np.log1p(-y)
    )


def _mu(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    expv = np.exp(eta[~pos])
    out[~pos] = expv / (1.0 + expv)
    return np.clip(out, 1e-12, 1.0 - 1e-12)


def log_likelihood(design: CovariateDesign, coefficients, phi: float) -> float:
    """Sum log-likelihood at (coefficients, phi)."""
    X = _with_intercept(design.covariates)
    mu = _mu(X @ np.asarray(coefficients, dtype=float))
    y = design.response
    alpha = mu * phi
    beta = (1.0 - mu) * phi
    ll = (
        gammaln(phi)
        - gammaln(alpha)
        - gammaln(beta)
        + (alpha - 1.0) * np.log(y)
        + (beta - 1.0) * np.log1p(-y)
    )
    return float(ll.sum())


def log_likelihood_gradient(design: CovariateDesign, coefficients, phi: float) -> np.ndarray:
    """Analytic gradient in (coefficients, ln phi), matching the optimizer's
    parametrization; used directly by the finite-difference cross-check."""
    X = _with_intercept(design.covariates)
    grad_b, grad_lnphi, _, _, _ = _derivatives(X, design.response, coefficients, phi)
    return np.concatenate([grad_b, [grad_lnphi]])


def _with_intercept(covariates: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(covariates.shape[0]), covariates])


def _derivatives(X, y, coefficients, phi):
    """Gradient and Hessian blocks; Hessian returned in (b, ln phi) space
    plus the (b, phi)-space blocks needed for the information matrix."""
    b = np.asarray(coefficients, dtype=float)
    mu = _mu(X @ b)
    dmu = mu * (1.0 - mu)
    alpha = mu * phi
    beta = (1.0 - mu) * phi
    ystar = np.log(y) - np.log1p(-y)
    mustar = digamma(alpha) - digamma(beta)
    r = ystar - mustar

    grad_b = X.T @ (phi * r * dmu)
    grad_phi = float(
        np.sum(
            digamma(phi)
            - mu * digamma(alpha)
            - (1.0 - mu) * digamma(beta)
            + mu * np.log(y)
            + (1.0 - mu) * np.log1p(-y)
        )
    )

    psi1_alpha = polygamma(1, alpha)
    psi1_beta = polygamma(1, beta)
    h_eta = phi * (-phi * (psi1_alpha + psi1_beta) * dmu**2 + r * (1.0 - 2.0 * mu) * dmu)
    H_bb = X.T @ (h_eta[:, None] * X)
    cross = dmu * (r - phi * (psi1_alpha * mu - psi1_beta * (1.0 - mu)))
    H_bphi = X.T @ cross
    H_phiphi = float(
        np.sum(polygamma(1, phi) - mu**2 * psi1_alpha - (1.0 - mu) ** 2 * psi1_beta)
    )

    grad_lnphi = phi * grad_phi
    k = X.shape[1]
    H = np.empty((k + 1, k + 1))
    H[:k, :k] = H_bb
    H[:k, k] = phi * H_bphi
    H[k, :k] = phi * H_bphi
    H[k, k] = phi * phi * H_phiphi + grad_lnphi
    return grad_b, grad_lnphi, H, H_bphi, H_phiphi


def _initial_values(X, y):
    ylogit = np.log(y) - np.log1p(-y)
    b0, *_ = np.linalg.lstsq(X, ylogit, rcond=None)
    fitted = X @ b0
    mu0 = _mu(fitted)
    residuals = ylogit - fitted
    rank = np.linalg.matrix_rank(X)
    df = max(X.shape[0] - rank, 1)
    sigma2 = float(residuals @ residuals) / df
    if sigma2 <= 0.0:
        phi0 = 100.0
    else:
        phi0 = float(np.mean(1.0 / (sigma2 * mu0 * (1.0 - mu0)))) - 1.0
    return b0, float(np.clip(phi0, 0.5, 1e6))


def betareg_fit(
    design: CovariateDesign,
    tolerance: float = GRADIENT_TOLERANCE,
    max_iterations: int = MAX_ITERATIONS,
    require_convergence: bool = True,
) -> BetaRegFit:
    """Maximize the beta log-likelihood over (coefficients, phi).

    Newton ascent on (b, ln phi) with step halving; the warm start takes b
    from OLS on the logit-transformed responses and phi from the method of
    moments on those residuals. Covariates are centered and scaled
    internally (coefficients and standard errors are reported in original
    units), so the gradient tolerance is meaningful regardless of covariate
    scale -- a raw-dollar income column would otherwise put the gradient's
    natural size orders of magnitude above any fixed tolerance. Convergence
    means the standardized-scale gradient max-norm drops below
    ``tolerance``.
    """
    raw = design.covariates
    y = design.response
    n = raw.shape[0]
    if n <= raw.shape[1] + 2:
        raise DataError(f"need more than {raw.shape[1] + 2} observations, got {n}")

    means = raw.mean(axis=0) if raw.size else np.zeros(raw.shape[1])
    scales = raw.std(axis=0) if raw.size else np.ones(raw.shape[1])
    scales = np.where(np.isfinite(scales) & (scales > 0.0), scales, 1.0)
    X = _with_intercept((raw - means) / scales)
    k = X.shape[1]

    b, phi = _initial_values(X, y)
    ll = _loglik(X, y, b, phi)
    path = [ll]
    converged = False
    iterations = 0
    grad_norm = float("inf")

    for iterations in range(1, max_iterations + 1):
        grad_b, grad_lnphi, H, _, _ = _derivatives(X, y, b, phi)
        gradient = np.concatenate([grad_b, [grad_lnphi]])
        grad_norm = float(np.max(np.abs(gradient)))
        if grad_norm < tolerance:
            converged = True
            iterations -= 1
            break

        step = _ascent_step(H, gradient)
        scale = 1.0
        improved = False
        for _ in range(60):
            b_new = b + scale * step[:k]
            phi_new = float(phi * np.exp(np.clip(scale * step[k], -20.0, 20.0)))
            ll_new = _loglik(X, y, b_new, phi_new)
            if np.isfinite(ll_new) and ll_new >= ll - 1e-10:
                b, phi, ll = b_new, phi_new, ll_new
                improved = True
                break
            scale *= 0.5
        path.append(ll)
        if not improved:
            break

    if not converged:
        grad_b, grad_lnphi, _, _, _ = _derivatives(X, y, b, phi)
        grad_norm = float(np.max(np.abs(np.concatenate([grad_b, [grad_lnphi]]))))
        converged = grad_norm < tolerance
    if not converged and require_convergence:
        raise ConvergenceError(
            f"no convergence in {max_iterations} iterations; "
            f"final gradient max-norm {grad_norm:.3e}"
        )

    se_std, se_phi = _standard_errors(X, y, b, phi, means, scales)
    coefficients = _destandardize_coefficients(b, means, scales)
    return BetaRegFit(
        coefficients=coefficients,
        precision_phi=phi,
        standard_errors=se_std,
        phi_standard_error=se_phi,
        log_likelihood=_loglik(X, y, b, phi),
        n_obs=n,
        converged=converged,
        iterations=iterations,
        covariate_names=design.covariate_names,
        loglik_path=tuple(path),
    )


def _destandardize_coefficients(b_std, means, scales):
    # eta = c0 + sum c_j (x_j - m_j)/s_j  ==>  b_j = c_j/s_j,
    # b0 = c0 - sum c_j m_j / s_j
    slopes = b_std[1:] / scales
    intercept = b_std[0] - float(slopes @ means)
    return np.concatenate([[intercept], slopes])


def _loglik(X, y, b, phi):
    if phi <= 0.0:
        return float("-inf")
    mu = _mu(X @ b)
    alpha = mu * phi
    beta = (1.0 - mu) * phi
    ll = (
        gammaln(phi)
        - gammaln(alpha)
        - gammaln(beta)
        + (alpha - 1.0) * np.log(y)
        + (beta - 1.0) * np.log1p(-y)
    )
    return float(ll.sum())


def _ascent_step(H, gradient):
    try:
        step = np.linalg.solve(H, -gradient)
    except np.linalg.LinAlgError:
        step = -np.linalg.pinv(H, hermitian=True) @ gradient
    if not np.all(np.isfinite(step)) or gradient @ step <= 0.0:
        # Hessian solve did not give an ascent direction (collinear design or
        # far from the optimum); fall back to a pseudo-inverse, then gradient.
        step = -np.linalg.pinv(H, hermitian=True) @ gradient
        if not np.all(np.isfinite(step)) or gradient @ step <= 0.0:
            step = gradient / max(float(np.max(np.abs(gradient))), 1.0)
    return step


def _standard_errors(X, y, b, phi, means, scales):
    # Observed information in the (b, phi) parametrization of the
    # standardized problem (where the matrix is well scaled), then the
    # covariance is mapped back to original units through the affine
    # coefficient transform. The pseudo-inverse with a loosened rank cutoff
    # covers the race-share design, whose intercept column equals the sum
    # of the five fractions: directions the data cannot identify are zeroed
    # instead of exploding the variances.
    _, _, H_lnphi, H_bphi, H_phiphi = _derivatives(X, y, b, phi)
    k = X.shape[1]
    info = np.empty((k + 1, k + 1))
    info[:k, :k] = -H_lnphi[:k, :k]
    info[:k, k] = -H_bphi
    info[k, :k] = -H_bphi
    info[k, k] = -H_phiphi
    covariance_std = np.linalg.pinv(info, rcond=1e-10, hermitian=True)

    # Jacobian of (b0, b_1..b_m, phi) w.r.t. (c0, c_1..c_m, phi)
    jac = np.eye(k + 1)
    jac[0, 1:k] = -means / scales
    jac[np.arange(1, k), np.arange(1, k)] = 1.0 / scales
    covariance = jac @ covariance_std @ jac.T
    diagonal = np.diag(covariance)
    se_b = np.sqrt(np.maximum(diagonal[:k], 0.0))
    se_phi = float(np.sqrt(max(diagonal[k], 0.0)))
    return se_b, se_phi


def _coefficients_of(fit_or_coefficients) -> np.ndarray:
    if isinstance(fit_or_coefficients, BetaRegFit):
        return np.asarray(fit_or_coefficients.coefficients, dtype=float)
    return np.asarray(fit_or_coefficients, dtype=float)


def predict_mean(fit_or_coefficients, covariates) -> float:
    """Mean response logit^-1(b0 + b . x) for one covariate vector."""
    coefficients = _coefficients_of(fit_or_coefficients)
    x = np.asarray(covariates, dtype=float)
    if x.ndim != 1 or x.shape[0] != coefficients.shape[0] - 1:
        raise DataError(
            f"expected {coefficients.shape[0] - 1} covariates, got {x.shape}"
        )
    eta = float(coefficients[0] + coefficients[1:] @ x)
    return float(_mu(np.array([eta]))[0])


def covariate_design_from_records(
    mobility,
    demographics,
    window_start: dt.date,
    window_end: dt.date,
    covariates: str = "race",
    income_unit: str = "dollars",
) -> CovariateDesign:
    """Assemble a design from daily records and demographics.

    The response per CBG is the mean of ``median_pct_time_home`` over the
    window (inclusive); exact-boundary responses are squeezed with
    :func:`adjust_boundary_responses`. ``covariates`` selects the model:
    ``race`` (five shares), ``race+income`` (shares plus median income), or
    ``age`` (share older than 50). Income defaults to raw dollars; pass
    ``income_unit="thousands"`` to rescale.
    """
    if covariates not in ("race", "race+income", "age"):
        raise DataError(f"unknown covariate set {covariates!r}")
    if income_unit not in ("dollars", "thousands"):
        raise DataError(f"income_unit must be dollars|thousands, got {income_unit!r}")
    if window_end < window_start:
        raise DataError("window_end precedes window_start")

    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for record in mobility:
        if window_start <= record.date <= window_end:
            sums[record.cbg_id] = sums.get(record.cbg_id, 0.0) + record.median_pct_time_home
            counts[record.cbg_id] = counts.get(record.cbg_id, 0) + 1

    rows = []
    responses = []
    income_scale = 1.0 if income_unit == "dollars" else 1e-3
    for demo in demographics:
        if demo.cbg_id not in counts:
            continue
        if covariates == "age":
            row = [demo.older50_fraction]
        else:
            row = [demo.race_fractions[k] for k in RACE_COVARIATES]
            if covariates == "race+income":
                row.append(demo.median_income * income_scale)
        rows.append(row)
        responses.append(sums[demo.cbg_id] / counts[demo.cbg_id])
    if not rows:
        raise DataError("no CBGs with mobility data inside the window")

    names = {
        "race": RACE_COVARIATES,
        "race+income": (*RACE_COVARIATES, "median_income"),
        "age": ("older50",),
    }[covariates]
    return CovariateDesign(
        covariates=np.array(rows, dtype=float),
        response=adjust_boundary_responses(np.array(responses)),
        covariate_names=tuple(names),
    )


def fit_to_dict(fit: BetaRegFit) -> dict:
    return {
        "coefficients": [float(v) for v in fit.coefficients],
        "precision_phi": fit.precision_phi,
        "standard_errors": [float(v) for v in fit.standard_errors],
        "phi_standard_error": fit.phi_standard_error,
        "log_likelihood": fit.log_likelihood,
        "n_obs": fit.n_obs,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "covariate_names": list(fit.covariate_names),
    }


def fit_from_dict(payload: dict) -> BetaRegFit:
    return BetaRegFit(
        coefficients=np.asarray(payload["coefficients"], dtype=float),
        precision_phi=float(payload["precision_phi"]),
        standard_errors=np.asarray(payload["standard_errors"], dtype=float),
        phi_standard_error=float(payload["phi_standard_error"]),
        log_likelihood=float(payload["log_likelihood"]),
        n_obs=int(payload["n_obs"]),
        converged=bool(payload["converged"]),
        iterations=int(payload["iterations"]),
        covariate_names=tuple(payload.get("covariate_names", ())),
    )


def fit_to_json(fit: BetaRegFit) -> str:
    return json.dumps(fit_to_dict(fit), indent=2, sort_keys=True)


def format_fit_table(fit: BetaRegFit) -> str:
    """Coefficient table with normal-approximation stars."""
    names = list(fit.covariate_names) or [
        f"x{i}" for i in range(1, fit.coefficients.shape[0])
    ]
    rows = list(zip(names, fit.coefficients[1:], fit.standard_errors[1:]))
    rows.append(("constant", fit.coefficients[0], fit.standard_errors[0]))
    width = max(len(n) for n, _, _ in rows) + 2
    lines = [f"{'Variable'.ljust(width)}{'Coefficient':>14}{'Std err':>12}"]
    for name, coefficient, se in rows:
        if np.isfinite(se) and se > 0:
            z = coefficient / se
            p = 2.0 * (1.0 - _normal_cdf(abs(z)))
            marker = significance_stars(p)
            lines.append(
                f"{name.ljust(width)}{coefficient:>11.4g}{marker:<3}{se:>12.3g}"
            )
        else:
            lines.append(f"{name.ljust(width)}{coefficient:>11.4g}{'':<3}{'-':>12}")
    lines.append(f"{'phi'.ljust(width)}{fit.precision_phi:>11.4g}")
    lines.append(f"{'N'.ljust(width)}{fit.n_obs:>11d}")
    lines.append("*** p<0.01, ** p<0.05, * p<0.1")
    return "\n".join(lines)


def _normal_cdf(z: float) -> float:
    import math

    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
