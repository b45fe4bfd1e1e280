"""Estimators of the Topp-Leone shape and of its PDF/CDF curves.

Five methods are available:

``mle``
    maximum likelihood, ``alpha_hat = n / t`` with ``t = -sum ln(2x - x^2)``.
``umvue``
    minimum variance unbiased estimators of ``f(x)`` and ``F(x)``, functions
    of the sufficient statistic ``t`` (needs ``n >= 3``).
``pce``
    percentile estimator, least squares between ``p_i^(1/alpha)`` and
    ``2x_(i) - x_(i)^2``.
``lse`` / ``wlse``
    (weighted) least squares between ``F(x_(i))`` and ``p_i``.

Here ``p_i = i / (n + 1)`` are the plotting positions of the sorted sample.
Every fit has a batched twin (:func:`fit_batch`) working on a 2-D array of
samples, one per row, which the Monte Carlo harness uses.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .distribution import _log_g, check_alpha, check_unit
from .errors import ConvergenceError, DomainError
from .optimize import minimize_batch

__all__ = [
    "ESTIMATORS",
    "SHAPE_METHODS",
    "ShapeFit",
    "UmvueFit",
    "FittedCurve",
    "BatchFit",
    "as_sample",
    "plotting_positions",
    "wlse_weights",
    "sufficient_statistic",
    "mle",
    "umvue",
    "pce",
    "lse",
    "wlse",
    "fit",
    "fit_batch",
    "curve_pdf",
    "curve_cdf",
    "pce_objective",
    "lse_objective",
    "wlse_objective",
    "OPT_TOL",
]

ESTIMATORS = ("mle", "umvue", "pce", "lse", "wlse")
SHAPE_METHODS = ("mle", "pce", "lse", "wlse")

OPT_TOL = 1e-8
_BRACKET_FACTOR = 100.0
_MAX_EXPANSIONS = 60
_SCAN_POINTS = 41


@dataclass(frozen=True)
class ShapeFit:
    """A plug-in fit: the curves are the Topp-Leone PDF/CDF at ``alpha_hat``."""

    alpha_hat: float
    method: str

    def __post_init__(self):
        check_alpha(self.alpha_hat)
        if self.method not in SHAPE_METHODS:
            raise DomainError(f"unknown shape method {self.method!r}")

    def pdf(self, x):
        return curve_pdf(self, x)

    def cdf(self, x):
        return curve_cdf(self, x)


@dataclass(frozen=True)
class UmvueFit:
    """UMVUE curves, determined by the sufficient statistic ``t`` and ``n``."""

    t: float
    n: int

    def __post_init__(self):
        if not (self.t > 0.0 and np.isfinite(self.t)):
            raise DomainError(f"t must be finite and > 0, got {self.t!r}")
        if int(self.n) != self.n or self.n < 3:
            raise DomainError(f"UMVUE curves need n >= 3, got {self.n!r}")

    @property
    def method(self) -> str:
        return "umvue"

    def pdf(self, x):
        return curve_pdf(self, x)

    def cdf(self, x):
        return curve_cdf(self, x)


FittedCurve = Union[ShapeFit, UmvueFit]


def as_sample(values) -> np.ndarray:
    """Validate observations and return them as a 1-D float array."""
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise DomainError("sample is empty")
    return check_unit(arr, "sample values")


def plotting_positions(n: int) -> np.ndarray:
    """``i / (n + 1)`` for ``i = 1..n``."""
    return np.arange(1, n + 1) / (n + 1.0)


def wlse_weights(n: int) -> np.ndarray:
    """Inverse variances of ``F(X_(i))``: ``(n+2)(n+1)^2 / (i (n-i+1))``."""
    i = np.arange(1, n + 1, dtype=float)
    return (n + 2.0) * (n + 1.0) ** 2 / (i * (n - i + 1.0))


def sufficient_statistic(sample) -> float:
    """``t = -sum ln(2x_i - x_i^2)``, always positive."""
    x = as_sample(sample)
    return float(-np.sum(_log_g(x)))


def mle(sample) -> ShapeFit:
    x = as_sample(sample)
    t = float(-np.sum(_log_g(x)))
    return ShapeFit(x.size / t, "mle")


def umvue(sample) -> UmvueFit:
    x = as_sample(sample)
    if x.size < 3:
        raise DomainError(f"UMVUE curves need n >= 3, got n={x.size}")
    return UmvueFit(float(-np.sum(_log_g(x))), int(x.size))


# -- least-squares objectives ------------------------------------------------
#
# All take alpha of shape (m, 1) (or scalar) and sorted log g values of shape
# (m, n); powers go through exp/log so extreme alphas stay finite.


def _pce_obj(alpha, log_g_sorted):
    n = log_g_sorted.shape[-1]
    log_p = np.log(plotting_positions(n))
    resid = np.exp(log_p / alpha) - np.exp(log_g_sorted)
    return np.sum(resid * resid, axis=-1)


def _lse_obj(alpha, log_g_sorted):
    n = log_g_sorted.shape[-1]
    resid = np.exp(alpha * log_g_sorted) - plotting_positions(n)
    return np.sum(resid * resid, axis=-1)


def _wlse_obj(alpha, log_g_sorted):
    n = log_g_sorted.shape[-1]
    resid = np.exp(alpha * log_g_sorted) - plotting_positions(n)
    return np.sum(wlse_weights(n) * resid * resid, axis=-1)


_OBJECTIVES = {"pce": _pce_obj, "lse": _lse_obj, "wlse": _wlse_obj}


def _sorted_log_g(sample) -> np.ndarray:
    x = as_sample(sample)
    return _log_g(np.sort(x, kind="stable"))


def pce_objective(alpha, sample) -> float:
    """``sum_i (p_i^(1/alpha) - (2x_(i) - x_(i)^2))^2``."""
    return float(_pce_obj(check_alpha(alpha), _sorted_log_g(sample)))


def lse_objective(alpha, sample) -> float:
    """``sum_i ((2x_(i) - x_(i)^2)^alpha - p_i)^2``."""
    return float(_lse_obj(check_alpha(alpha), _sorted_log_g(sample)))


def wlse_objective(alpha, sample) -> float:
    """``sum_i w_i ((2x_(i) - x_(i)^2)^alpha - p_i)^2``."""
    return float(_wlse_obj(check_alpha(alpha), _sorted_log_g(sample)))


# -- batched fitting ---------------------------------------------------------


@dataclass(frozen=True)
class BatchFit:
    """Fits of many samples at once.

    ``value`` holds ``alpha_hat`` for shape methods and ``t`` for the UMVUE;
    ``failed`` marks rows whose optimizer did not converge (value is NaN).
    """

    method: str
    n: int
    value: np.ndarray
    failed: np.ndarray

    def pdf(self, x) -> np.ndarray:
        """Fitted densities, shape ``(rows, len(x))``."""
        return _batch_curve(self, x, "pdf")

    def cdf(self, x) -> np.ndarray:
        """Fitted CDFs, shape ``(rows, len(x))``."""
        return _batch_curve(self, x, "cdf")


def _minimize_rows(method: str, log_g_sorted: np.ndarray, start: np.ndarray, tol: float):
    objective = _OBJECTIVES[method]
    m = log_g_sorted.shape[0]
    lo = start / _BRACKET_FACTOR
    hi = start * _BRACKET_FACTOR
    alpha = np.full(m, np.nan)
    failed = np.zeros(m, dtype=bool)
    todo = np.arange(m)
    steps = np.linspace(0.0, 1.0, _SCAN_POINTS)
    for _ in range(_MAX_EXPANSIONS):
        lg = log_g_sorted[todo]
        # coarse log-spaced scan: the objectives have flat tails where a pure
        # golden-section start can wander off to a bracket edge
        grid = lo[todo, None] * (hi[todo] / lo[todo])[:, None] ** steps
        grid[:, -1] = hi[todo]
        values = objective(grid[:, :, None], lg[:, None, :])
        k = np.argmin(values, axis=1)
        rows = np.arange(todo.size)
        sub_lo = grid[rows, np.maximum(k - 1, 0)]
        sub_hi = grid[rows, np.minimum(k + 1, _SCAN_POINTS - 1)]

        def fun(a, r, _lg=lg):
            return objective(a[:, None], _lg[r])

        x, ok = minimize_batch(fun, sub_lo, sub_hi, tol=tol)
        tol1 = np.sqrt(np.finfo(float).eps) * np.abs(x) + tol
        at_lo = ok & (k == 0) & (x - lo[todo] <= 10.0 * tol1)
        at_hi = ok & (k == _SCAN_POINTS - 1) & (hi[todo] - x <= 10.0 * tol1)
        inside = ok & ~at_lo & ~at_hi
        alpha[todo[inside]] = x[inside]
        failed[todo[~ok]] = True
        # minimizer sits on the bracket edge: double the bracket outward there
        lo[todo[at_lo]] /= 2.0
        hi[todo[at_hi]] *= 2.0
        todo = todo[at_lo | at_hi]
        if todo.size == 0:
            break
    else:
        failed[todo] = True
    return alpha, failed


def fit_batch(method: str, samples, tol: float = OPT_TOL) -> BatchFit:
    """Fit every row of ``samples`` (shape ``(m, n)``) with ``method``."""
    if method not in ESTIMATORS:
        raise DomainError(f"unknown estimator {method!r}; choose from {ESTIMATORS}")
    xs = np.asarray(samples, dtype=float)
    if xs.ndim != 2 or xs.shape[1] == 0:
        raise DomainError("samples must be a non-empty 2-D array")
    check_unit(xs, "sample values")
    m, n = xs.shape
    lg = _log_g(xs)
    t = -np.sum(lg, axis=1)
    if method == "umvue":
        if n < 3:
            raise DomainError(f"UMVUE curves need n >= 3, got n={n}")
        return BatchFit(method, n, t, np.zeros(m, dtype=bool))
    alpha_mle = n / t
    if method == "mle":
        return BatchFit(method, n, alpha_mle, np.zeros(m, dtype=bool))
    lg_sorted = np.sort(lg, axis=1, kind="stable")
    alpha, failed = _minimize_rows(method, lg_sorted, alpha_mle, tol)
    return BatchFit(method, n, alpha, failed)


def fit(method: str, sample, tol: float = OPT_TOL) -> FittedCurve:
    """Fit one sample; raises :class:`ConvergenceError` if the optimizer fails."""
    x = as_sample(sample)
    res = fit_batch(method, x[None, :], tol=tol)
    if res.failed[0]:
        raise ConvergenceError(f"{method} fit did not converge")
    if method == "umvue":
        return UmvueFit(float(res.value[0]), x.size)
    return ShapeFit(float(res.value[0]), method)


def pce(sample, tol: float = OPT_TOL) -> ShapeFit:
    return fit("pce", sample, tol)


def lse(sample, tol: float = OPT_TOL) -> ShapeFit:
    return fit("lse", sample, tol)


def wlse(sample, tol: float = OPT_TOL) -> ShapeFit:
    return fit("wlse", sample, tol)


# -- fitted curves -----------------------------------------------------------


def _shape_pdf(alpha, x, log_g):
    return alpha * (2.0 - 2.0 * x) * np.exp((alpha - 1.0) * log_g)


def _shape_cdf(alpha, log_g):
    return np.exp(alpha * log_g)


def _umvue_pdf(t, n, x, log_g):
    # (n-1)(2-2x)(t+b)^(n-2) / ((2x-x^2) t^(n-1)), zero once t + b <= 0
    ratio = np.maximum(t + log_g, 0.0) / t
    return (n - 1.0) * (2.0 - 2.0 * x) * np.exp(-log_g) / t * ratio ** (n - 2)


def _umvue_cdf(t, n, log_g):
    ratio = np.maximum(t + log_g, 0.0) / t
    return ratio ** (n - 1)


def _batch_curve(bf: BatchFit, x, which: str) -> np.ndarray:
    xs = check_unit(x).reshape(-1)
    lg = _log_g(xs)[None, :]
    xs = xs[None, :]
    v = bf.value[:, None]
    if bf.method == "umvue":
        if which == "pdf":
            return _umvue_pdf(v, bf.n, xs, lg)
        return _umvue_cdf(v, bf.n, lg)
    if which == "pdf":
        return _shape_pdf(v, xs, lg)
    return _shape_cdf(v, lg)


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def curve_pdf(fit: FittedCurve, x):
    """Estimated density at ``x`` for any fitted curve."""
    xs = check_unit(x)
    lg = _log_g(xs)
    if isinstance(fit, UmvueFit):
        return _out(_umvue_pdf(fit.t, fit.n, xs, lg))
    return _out(_shape_pdf(fit.alpha_hat, xs, lg))


def curve_cdf(fit: FittedCurve, x):
    """Estimated CDF at ``x`` for any fitted curve."""
    xs = check_unit(x)
    lg = _log_g(xs)
    if isinstance(fit, UmvueFit):
        return _out(_umvue_cdf(fit.t, fit.n, lg))
    return _out(_shape_cdf(fit.alpha_hat, lg))
