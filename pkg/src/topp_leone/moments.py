"""Exact moments and mean squared errors of the MLE and UMVUE curve estimators.

MLE curves: with ``S = n / T`` and ``T ~ Gamma(n, alpha)``, the moments
``E[f_hat(x)^r]`` and ``E[F_hat(x)^r]`` reduce to Bessel-K closed forms.
UMVUE curves are unbiased, so their MSE is ``E[.^2] - target^2``; the second
moment is available as a finite binomial series in incomplete gamma
functions and as a one-dimensional integral over ``t``.

Every closed form has a quadrature twin (``*_quad``) used as an oracle.
Prefactors are assembled in log space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import distribution as dist
from .errors import DomainError
from .special import ln_binomial, log_bessel_k, upper_inc_gamma_status

__all__ = [
    "mle_pdf_moment",
    "mle_cdf_moment",
    "mle_pdf_moment_quad",
    "mle_cdf_moment_quad",
    "mle_pdf_mse",
    "mle_cdf_mse",
    "SecondMoment",
    "umvue_pdf_second_moment",
    "umvue_cdf_second_moment",
    "umvue_pdf_mse",
    "umvue_cdf_mse",
    "SERIES_AGREEMENT",
]

_LOG_MAX = math.log(np.finfo(float).max)
_QUAD_RTOL = 1e-12
SERIES_AGREEMENT = 1e-6


def _check(n, alpha, x, r=1, n_min=1):
    if int(r) != r or r < 1:
        raise DomainError(f"moment order r must be a positive integer, got {r!r}")
    if int(n) != n or n < n_min:
        raise DomainError(f"n must be an integer >= {n_min}, got {n!r}")
    a = dist.check_alpha(alpha)
    xs = dist.check_unit(x)
    if xs.ndim != 0:
        raise DomainError("x must be a scalar")
    b = float(dist._log_g(xs))
    if b == 0.0:
        raise OverflowError(f"x={float(xs)!r} is too close to 1: ln(2x - x^2) rounds to 0")
    return int(r), int(n), a, float(xs), b


def _exp(logv: float, what: str) -> float:
    if logv > _LOG_MAX:
        raise OverflowError(f"{what} overflows (log value {logv:.6g})")
    return math.exp(logv)


# -- MLE curves --------------------------------------------------------------


def _log_mle_pdf_moment(r, n, a, x, b):
    na = n * a
    z = 2.0 * math.sqrt(-na * r * b)
    return (
        math.log(2.0)
        + 0.5 * (r + n) * math.log(na)
        + r * math.log(2.0 - 2.0 * x)
        - math.lgamma(n)
        - r * b
        - 0.5 * (r - n) * math.log(-r * b)
        + log_bessel_k(r - n, z)
    )


def _log_mle_cdf_moment(r, n, a, b):
    na = n * a
    z = 2.0 * math.sqrt(-na * r * b)
    return (
        math.log(2.0)
        + 0.5 * n * math.log(na)
        - math.lgamma(n)
        + 0.5 * n * math.log(-r * b)
        + log_bessel_k(-n, z)
    )


def mle_pdf_moment(r: int, n: int, alpha: float, x: float) -> float:
    """``E[f_hat(x)^r]`` for the MLE density estimate from a size-``n`` sample."""
    r, n, a, x, b = _check(n, alpha, x, r)
    return _exp(_log_mle_pdf_moment(r, n, a, x, b), "E[f_hat^r]")


def mle_cdf_moment(r: int, n: int, alpha: float, x: float) -> float:
    """``E[F_hat(x)^r]`` for the MLE CDF estimate from a size-``n`` sample."""
    r, n, a, x, b = _check(n, alpha, x, r)
    return _exp(_log_mle_cdf_moment(r, n, a, b), "E[F_hat^r]")


def _peak_split_quad(logf, lo, peak, hi=math.inf):
    """Integrate ``exp(logf)`` over ``[lo, hi]``, scaled by its value at ``peak``.

    Returns the log of the integral.
    """
    top = logf(peak)

    def f(s):
        return math.exp(logf(s) - top)

    kw = dict(epsabs=0.0, epsrel=_QUAD_RTOL, limit=500)
    left, _ = integrate.quad(f, lo, peak, **kw)
    # a finite middle piece keeps the infinite-range map from smearing the peak
    mid_hi = peak + 4.0 * max(peak - lo, 1.0)
    mid, _ = integrate.quad(f, peak, mid_hi, **kw)
    right, _ = integrate.quad(f, mid_hi, hi, **kw)
    return top + math.log(left + mid + right)


def _log_s_integral(k: float, c: float, C: float) -> float:
    # log int_0^inf s^k exp(c s - C / s) ds with c < 0, C > 0
    # stationary point: c s^2 + k s + C = 0
    disc = k * k - 4.0 * c * C
    peak = (k + math.sqrt(disc)) / (-2.0 * c)

    def logf(s):
        if s <= 0.0:
            return -math.inf
        return k * math.log(s) + c * s - C / s

    return _peak_split_quad(logf, 0.0, peak)


def mle_pdf_moment_quad(r: int, n: int, alpha: float, x: float) -> float:
    """``E[f_hat(x)^r]`` by direct quadrature against the density of ``alpha_hat``."""
    r, n, a, x, b = _check(n, alpha, x, r)
    na = n * a
    log_pref = n * math.log(na) - math.lgamma(n) + r * math.log(2.0 - 2.0 * x) - r * b
    return _exp(log_pref + _log_s_integral(r - n - 1.0, r * b, na), "E[f_hat^r]")


def mle_cdf_moment_quad(r: int, n: int, alpha: float, x: float) -> float:
    """``E[F_hat(x)^r]`` by direct quadrature against the density of ``alpha_hat``."""
    r, n, a, x, b = _check(n, alpha, x, r)
    na = n * a
    log_pref = n * math.log(na) - math.lgamma(n)
    return _exp(log_pref + _log_s_integral(-n - 1.0, r * b, na), "E[F_hat^r]")


def mle_pdf_mse(n: int, alpha: float, x: float) -> float:
    """MSE of the MLE density estimate at ``x``."""
    target = dist.pdf(x, alpha)
    m1 = mle_pdf_moment(1, n, alpha, x)
    m2 = mle_pdf_moment(2, n, alpha, x)
    return max(m2 - 2.0 * target * m1 + target * target, 0.0)


def mle_cdf_mse(n: int, alpha: float, x: float) -> float:
    """MSE of the MLE CDF estimate at ``x``."""
    target = dist.cdf(x, alpha)
    m1 = mle_cdf_moment(1, n, alpha, x)
    m2 = mle_cdf_moment(2, n, alpha, x)
    return max(m2 - 2.0 * target * m1 + target * target, 0.0)


# -- UMVUE curves ------------------------------------------------------------


@dataclass(frozen=True)
class SecondMoment:
    """Second moment of a UMVUE curve estimate computed two ways.

    ``quadrature`` is authoritative. ``series`` is the binomial expansion in
    incomplete gamma functions (None when it could not be evaluated);
    ``condition`` is the ratio of the sum of absolute terms to the absolute
    sum, a measure of cancellation.
    """

    quadrature: float
    series: float | None
    condition: float

    @property
    def value(self) -> float:
        return self.quadrature

    @property
    def rel_diff(self) -> float:
        if self.series is None:
            return math.inf
        return abs(self.series - self.quadrature) / abs(self.quadrature)

    @property
    def series_reliable(self) -> bool:
        return self.rel_diff <= SERIES_AGREEMENT


def _log_t_integral(p: int, q: int, a: float, b: float) -> float:
    # log int_{-b}^inf (1 + b/t)^p t^q e^{-a t} dt, b < 0
    # stationary point: a t^2 - (q - a b) t + (p - q) b = 0
    B = q - a * b
    peak = (B + math.sqrt(B * B - 4.0 * a * (p - q) * b)) / (2.0 * a)

    def logf(t):
        u = 1.0 + b / t
        if u <= 0.0:
            return -math.inf
        return p * math.log(u) + q * math.log(t) - a * t

    return _peak_split_quad(logf, -b, peak)


def _series(p: int, q: int, a: float, b: float, shift: int):
    # sum_{i=0}^p C(p,i) b^i a^(i+shift) Gamma(q+1-i, -a b)
    x = -a * b
    log_terms = []
    signs = []
    degraded = False
    for i in range(p + 1):
        ig = upper_inc_gamma_status(q + 1 - i, x)
        degraded |= ig.degraded
        if ig.value <= 0.0 or not math.isfinite(ig.value):
            return None, math.inf
        log_terms.append(
            ln_binomial(p, i) + i * math.log(-b) + (i + shift) * math.log(a) + math.log(ig.value)
        )
        signs.append(-1.0 if i % 2 else 1.0)
    top = max(log_terms)
    scaled = [s * math.exp(lt - top) for s, lt in zip(signs, log_terms)]
    total = math.fsum(scaled)
    if total <= 0.0:
        return None, math.inf
    condition = math.fsum(abs(v) for v in scaled) / total
    if degraded:
        condition = math.inf
    return top + math.log(total), condition


def _umvue_second_moment(p: int, q: int, shift: int, log_pref: float, n: int, a: float, b: float):
    log_quad = log_pref + n * math.log(a) + _log_t_integral(p, q, a, b)
    quad = _exp(log_quad, "UMVUE second moment")
    log_series, condition = _series(p, q, a, b, shift)
    series = None
    if log_series is not None and log_pref + log_series <= _LOG_MAX:
        series = math.exp(log_pref + log_series)
    return SecondMoment(quad, series, condition)


def umvue_pdf_second_moment(n: int, alpha: float, x: float) -> SecondMoment:
    """``E[f_tilde(x)^2]`` for the UMVUE density estimate, ``n >= 3``."""
    _, n, a, x, b = _check(n, alpha, x, n_min=3)
    log_A = math.log(n - 1.0) + math.log(2.0 - 2.0 * x) - b
    log_pref = 2.0 * log_A - math.lgamma(n)
    return _umvue_second_moment(2 * n - 4, n - 3, 2, log_pref, n, a, b)


def umvue_cdf_second_moment(n: int, alpha: float, x: float) -> SecondMoment:
    """``E[F_tilde(x)^2]`` for the UMVUE CDF estimate, ``n >= 3``."""
    _, n, a, x, b = _check(n, alpha, x, n_min=3)
    return _umvue_second_moment(2 * n - 2, n - 1, 0, -math.lgamma(n), n, a, b)


def umvue_pdf_mse(n: int, alpha: float, x: float) -> float:
    """MSE (= variance) of the UMVUE density estimate at ``x``."""
    m2 = umvue_pdf_second_moment(n, alpha, x).value
    target = dist.pdf(x, alpha)
    return max(m2 - target * target, 0.0)


def umvue_cdf_mse(n: int, alpha: float, x: float) -> float:
    """MSE (= variance) of the UMVUE CDF estimate at ``x``."""
    m2 = umvue_cdf_second_moment(n, alpha, x).value
    target = dist.cdf(x, alpha)
    return max(m2 - target * target, 0.0)
