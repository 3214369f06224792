"""Scalar special functions: gamma, log-gamma, Mittag-Leffler, Caputo of monomials."""

from __future__ import annotations

import math
import warnings

import numpy as np

__all__ = [
    "gamma_fn",
    "log_gamma",
    "mittag_leffler",
    "log_mittag_leffler",
    "monomial_caputo",
    "MittagLefflerConvergenceError",
    "ML_MAX_ABS_ARG",
]

# Godfrey's Lanczos coefficients, g = 607/128, 15 terms (~1e-15 relative).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

ML_MAX_ABS_ARG = 50.0


class MittagLefflerConvergenceError(ArithmeticError):
    """Series for E_nu(z) did not meet its stopping rule within the term cap."""


def _lanczos_sum(z: float) -> float:
    a = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        a += _LANCZOS_C[k] / (z + k)
    return a


def _check_positive(x: float) -> float:
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise ValueError(f"gamma function requires x > 0, got {x!r}")
    return x


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    x = _check_positive(x)
    if x < 0.5:
        # Gamma(x) = Gamma(x + 1) / x keeps the Lanczos argument >= 0.5
        return log_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def gamma_fn(x: float) -> float:
    """Euler's gamma function for real x > 0.

    Lanczos approximation; relative error stays below 1e-14 on [0.5, 10].
    Returns ``inf`` once the result overflows a double (x > ~171.6).
    """
    x = _check_positive(x)
    if x < 0.5:
        return gamma_fn(x + 1.0) / x
    if x > 171.7:
        return math.inf
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    # split the power so t**(z + 0.5) cannot overflow before exp(-t) damps it
    half = t ** (0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * _lanczos_sum(z)


def mittag_leffler(nu: float, z: float, tol: float = 1e-16, max_terms: int = 10_000) -> float:
    """One-parameter Mittag-Leffler function E_nu(z) = sum_k z^k / Gamma(1 + k nu).

    Direct summation. The loop stops once the terms are past their peak and
    ``|term| <= tol * |partial sum|``. Supported domain is ``0 < nu <= 1`` and
    ``|z| <= 50``; for negative ``z`` the alternating series loses up to about
    ``64 eps max|term|`` to cancellation, and a ``RuntimeWarning`` is emitted
    when that estimate exceeds 1e-12.
    """
    nu = float(nu)
    z = float(z)
    if not 0.0 < nu <= 1.0:
        raise ValueError(f"Mittag-Leffler order must lie in (0, 1], got {nu!r}")
    if not math.isfinite(z) or abs(z) > ML_MAX_ABS_ARG:
        raise ValueError(f"|z| must be <= {ML_MAX_ABS_ARG}, got {z!r}")
    if z == 0.0:
        return 1.0

    log_abs_z = math.log(abs(z))
    negative = z < 0.0
    terms = [1.0]
    partial = 1.0
    biggest = 1.0
    previous = 1.0
    for k in range(1, max_terms + 1):
        g = gamma_fn(1.0 + k * nu)
        try:
            mag = abs(z) ** k / g if math.isfinite(g) else 0.0
        except OverflowError:
            mag = 0.0
        if mag == 0.0:
            # direct form is more accurate; fall back to logs only when it over/underflows
            mag = math.exp(k * log_abs_z - log_gamma(1.0 + k * nu))  # OverflowError: not representable
        term = -mag if (negative and k % 2) else mag
        terms.append(term)
        partial += term
        biggest = max(biggest, mag)
        if mag <= previous and mag <= tol * abs(partial):
            break
        previous = mag
    else:
        raise MittagLefflerConvergenceError(
            f"E_{nu}({z}) not converged after {max_terms} terms (last term {terms[-1]:.3e})"
        )
    value = math.fsum(terms)
    # each term carries a few ulps from gamma_fn; 64 ulps of the largest term bounds what was observed
    estimate = 64.0 * 2.2e-16 * biggest
    if negative and estimate > 1e-12:
        warnings.warn(
            f"E_{nu}({z}): cancellation error estimate {estimate:.1e} exceeds 1e-12",
            RuntimeWarning,
            stacklevel=2,
        )
    return value


def log_mittag_leffler(nu: float, z: float, tol: float = 1e-16) -> float:
    """log E_nu(z) for z >= 0, usable where E_nu(z) itself overflows.

    The series is summed in log space. Once z**(1/nu) >= 700 the leading
    asymptotic term exp(z**(1/nu)) / nu is used; the neglected part is
    smaller by a factor below exp(-700).
    """
    nu = float(nu)
    z = float(z)
    if not 0.0 < nu <= 1.0:
        raise ValueError(f"Mittag-Leffler order must lie in (0, 1], got {nu!r}")
    if not (math.isfinite(z) and z >= 0.0):
        raise ValueError(f"log_mittag_leffler needs finite z >= 0, got {z!r}")
    if z == 0.0:
        return 0.0
    log_z = math.log(z)
    if log_z / nu >= math.log(700.0):
        lead = math.exp(log_z / nu) if log_z / nu < 709.0 else math.inf
        return lead - math.log(nu)
    logs = [0.0]
    peak = 0.0
    k = 0
    while True:
        k += 1
        lt = k * log_z - log_gamma(1.0 + k * nu)
        logs.append(lt)
        if lt > peak:
            peak = lt
        elif lt < peak + math.log(tol) - math.log(k + 1.0):
            break
    return peak + math.log(math.fsum(math.exp(v - peak) for v in logs))


def monomial_caputo(nu: float, sigma: float, x):
    """Exact Caputo derivative of order ``nu`` of x**sigma.

    Gamma(1 + sigma) / Gamma(1 - nu + sigma) * x**(sigma - nu). Accepts a
    scalar or an array for ``x``. At x = 0 the value is 0 for sigma > nu and
    Gamma(1 + nu) for sigma == nu.
    """
    if not sigma > 0.0:
        raise ValueError(f"monomial exponent must be positive, got {sigma!r}")
    if not 0.0 < nu <= 1.0:
        raise ValueError(f"order must lie in (0, 1], got {nu!r}")
    coef = gamma_fn(1.0 + sigma) / gamma_fn(1.0 - nu + sigma)
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0.0):
        raise ValueError("monomial_caputo requires x >= 0")
    p = sigma - nu
    if p == 0.0:
        out = np.full_like(xs, coef)
    else:
        with np.errstate(divide="ignore"):
            out = coef * np.power(xs, p)
    if out.ndim == 0:
        return float(out)
    return out
