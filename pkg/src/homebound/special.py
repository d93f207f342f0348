"""F and Student-t tail probabilities via the regularized incomplete beta.

The single special function needed by the test statistics in this package is
``I_x(a, b)``, evaluated here with the continued-fraction expansion (modified
Lentz recurrence) and the symmetric-argument switch at
``x = (a + 1)/(a + b + 2)`` that keeps the fraction rapidly convergent.
Quantiles are obtained by bisecting the CDFs, so inversion is consistent with
the forward evaluation by construction.
"""

from __future__ import annotations

import math

from .errors import ConvergenceError, DomainError

_TINY = 1e-300
_EPS = 1e-14
_MAX_ITER = 500


def log_beta(a: float, b: float) -> float:
    """Natural log of the complete beta function B(a, b)."""
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"log_beta requires positive arguments, got ({a}, {b})")
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the continued fraction for I_x(a, b).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        # even step
        coeff = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coeff * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + coeff / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coeff * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + coeff / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Parameters
    ----------
    a, b : float
        Positive shape parameters.
    x : float
        Evaluation point in [0, 1].

    Returns
    -------
    float
        P(X <= x) for X ~ Beta(a, b).
    """
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"shape parameters must be positive, got ({a}, {b})")
    if x < 0.0 or x > 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def f_cdf(x: float, df_num: float, df_den: float) -> float:
    """CDF of the F distribution with ``df_num`` and ``df_den`` degrees of freedom."""
    if df_num <= 0.0 or df_den <= 0.0:
        raise DomainError(
            f"degrees of freedom must be positive, got ({df_num}, {df_den})"
        )
    if math.isnan(x):
        raise DomainError("x must be a number")
    if x <= 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    u = df_num * x / (df_num * x + df_den)
    return regularized_incomplete_beta(df_num / 2.0, df_den / 2.0, u)


def t_cdf(x: float, df: float) -> float:
    """CDF of Student's t distribution with ``df`` degrees of freedom."""
    if df <= 0.0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(x):
        raise DomainError("x must be a number")
    if x == 0.0:
        return 0.5
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    u = df / (df + x * x)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, u)
    return 1.0 - tail if x > 0.0 else tail


def _bisect_quantile(cdf, q: float, lo: float, hi: float) -> float:
    # Expand the upper bracket until it covers q, then bisect.
    for _ in range(200):
        if cdf(hi) >= q:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise ConvergenceError(f"could not bracket quantile {q}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def f_quantile(q: float, df_num: float, df_den: float) -> float:
    """Inverse of :func:`f_cdf` in its q argument."""
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0, 1), got {q}")
    if q == 0.0:
        return 0.0
    return _bisect_quantile(lambda x: f_cdf(x, df_num, df_den), q, 0.0, 1.0)


def t_quantile(q: float, df: float) -> float:
    """Inverse of :func:`t_cdf` in its q argument."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    if q == 0.5:
        return 0.0
    if q > 0.5:
        return _bisect_quantile(lambda x: t_cdf(x, df), q, 0.0, 1.0)
    return -_bisect_quantile(lambda x: t_cdf(x, df), 1.0 - q, 0.0, 1.0)
