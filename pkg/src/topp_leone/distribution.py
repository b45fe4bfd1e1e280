"""The Topp-Leone distribution on (0, 1).

The law has CDF ``F(x) = (2x - x^2)^alpha`` for a shape ``alpha > 0``.
All functions accept scalars or array-likes and broadcast like numpy ufuncs;
scalar inputs give Python floats back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ToppLeone",
    "check_alpha",
    "check_unit",
    "g",
    "log_g",
    "pdf",
    "cdf",
    "quantile",
    "sample",
]


def check_alpha(alpha) -> float:
    """Validate a shape parameter and return it as a float."""
    try:
        a = float(alpha)
    except (TypeError, ValueError):
        raise DomainError(f"shape must be a real number, got {alpha!r}") from None
    if not math.isfinite(a) or a <= 0.0:
        raise DomainError(f"shape must be finite and > 0, got {alpha!r}")
    return a


def check_unit(x, name: str = "x") -> np.ndarray:
    """Return ``x`` as a float array, raising unless every entry is in (0, 1)."""
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        raise DomainError(f"{name} is empty")
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError(f"{name} must lie strictly inside (0, 1)")
    return arr


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def _log_g(x: np.ndarray) -> np.ndarray:
    # log(x) + log(2 - x) keeps relative accuracy near 0, log1p(-(1-x)^2) near 1
    with np.errstate(divide="ignore"):
        near0 = np.log(x) + np.log(2.0 - x)
        near1 = np.log1p(-((1.0 - x) ** 2))
    return np.where(x < 0.5, near0, near1)


def g(x):
    """``2x - x^2``, the CDF of the unit-shape law."""
    arr = check_unit(x)
    return _out(arr * (2.0 - arr))


def log_g(x):
    """``ln(2x - x^2)``, evaluated without cancellation at either end of (0, 1)."""
    return _out(_log_g(check_unit(x)))


def pdf(x, alpha):
    """Density ``alpha (2 - 2x) (2x - x^2)^(alpha - 1)``."""
    a = check_alpha(alpha)
    arr = check_unit(x)
    return _out(a * (2.0 - 2.0 * arr) * np.exp((a - 1.0) * _log_g(arr)))


def cdf(x, alpha):
    """Distribution function ``(2x - x^2)^alpha``."""
    a = check_alpha(alpha)
    arr = check_unit(x)
    return _out(np.exp(a * _log_g(arr)))


def quantile(u, alpha):
    """Inverse CDF, ``1 - sqrt(1 - u^(1/alpha))``.

    Written as ``v / (1 + sqrt(1 - v))`` with ``v = u^(1/alpha)`` so that
    small quantiles do not cancel.
    """
    a = check_alpha(alpha)
    arr = check_unit(u, "u")
    log_v = np.log(arr) / a
    v = np.exp(log_v)
    return _out(v / (1.0 + np.sqrt(-np.expm1(log_v))))


def _open_uniforms(stream, count: int) -> np.ndarray:
    u = np.asarray(stream.random(count), dtype=float)
    bad = (u <= 0.0) | (u >= 1.0)
    # endpoint draws are rejected and redrawn
    while bad.any():
        u[bad] = np.asarray(stream.random(int(bad.sum())), dtype=float)
        bad = (u <= 0.0) | (u >= 1.0)
    return u


def sample(alpha, stream, count: int) -> np.ndarray:
    """Draw ``count`` variates by inversion.

    ``stream`` is any object with a ``random(size)`` method returning
    uniforms, e.g. :class:`numpy.random.Generator` or
    :class:`topp_leone.rng.PhiloxStream`.
    """
    a = check_alpha(alpha)
    if int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    u = _open_uniforms(stream, int(count))
    x = np.asarray(quantile(u, a))
    # a quantile can round onto an endpoint only for u extremely close to 0 or 1
    return np.clip(x, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class ToppLeone:
    """Frozen Topp-Leone law with shape ``alpha``."""

    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))

    def pdf(self, x):
        return pdf(x, self.alpha)

    def cdf(self, x):
        return cdf(x, self.alpha)

    def ppf(self, u):
        return quantile(u, self.alpha)

    def sample(self, stream, count: int) -> np.ndarray:
        return sample(self.alpha, stream, count)
