"""Bounded one-dimensional minimization (Brent's golden-section/parabolic method).

:func:`minimize_batch` runs many independent minimizations in lock step on
numpy arrays, one interval per row. Each row follows exactly the iteration
it would follow alone, so results do not depend on how rows are batched.
:func:`minimize_scalar` is the single-row case for a plain callable.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = ["minimize_scalar", "minimize_batch", "MAX_EVALS"]

MAX_EVALS = 10**6
_SQRT_EPS = math.sqrt(np.finfo(float).eps)
_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))


def minimize_batch(
    fun: Callable[[np.ndarray, np.ndarray], np.ndarray],
    lo,
    hi,
    tol: float = 1e-8,
    max_evals: int = MAX_EVALS,
):
    """Minimize ``m`` scalar functions on their own intervals simultaneously.

    Parameters
    ----------
    fun : callable
        ``fun(x, rows)`` evaluates the objective of each row listed in the
        integer array ``rows`` at the matching entry of ``x``.
    lo, hi : array_like
        Interval ends, shape ``(m,)``, with ``lo < hi``.
    tol : float
        Absolute tolerance on the minimizer (a relative ``sqrt(eps)`` term is
        added, as in Brent's original algorithm).
    max_evals : int
        Evaluation cap per row.

    Returns
    -------
    x : ndarray
        Approximate minimizers.
    converged : ndarray of bool
        False for rows that hit ``max_evals``.
    """
    a = np.array(lo, dtype=float, copy=True).reshape(-1)
    b = np.array(hi, dtype=float, copy=True).reshape(-1)
    if a.shape != b.shape:
        raise DomainError("lo and hi must have the same shape")
    if not np.all(a < b):
        raise DomainError("each interval needs lo < hi")
    if not tol > 0:
        raise DomainError("tol must be positive")
    m = a.size
    rows = np.arange(m)

    xf = a + _GOLDEN * (b - a)
    fulc = xf.copy()
    nfc = xf.copy()
    fx = np.asarray(fun(xf, rows), dtype=float).copy()
    ffulc = fx.copy()
    fnfc = fx.copy()
    rat = np.zeros(m)
    e = np.zeros(m)
    evals = np.ones(m, dtype=np.int64)
    active = np.ones(m, dtype=bool)
    converged = np.ones(m, dtype=bool)

    while True:
        xm = 0.5 * (a + b)
        tol1 = _SQRT_EPS * np.abs(xf) + tol / 3.0
        tol2 = 2.0 * tol1
        active &= np.abs(xf - xm) > tol2 - 0.5 * (b - a)
        capped = active & (evals >= max_evals)
        converged[capped] = False
        active &= ~capped
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break

        A, B, X, XM = a[idx], b[idx], xf[idx], xm[idx]
        T1, T2 = tol1[idx], tol2[idx]
        E, RAT = e[idx], rat[idx]
        FX, FNFC, FFULC = fx[idx], fnfc[idx], ffulc[idx]
        NFC, FULC = nfc[idx], fulc[idx]

        # parabolic fit through the three best points
        try_para = np.abs(E) > T1
        r = (X - NFC) * (FX - FFULC)
        q = (X - FULC) * (FX - FNFC)
        p = (X - FULC) * q - (X - NFC) * r
        q = 2.0 * (q - r)
        p = np.where(q > 0.0, -p, p)
        q = np.abs(q)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (
                try_para
                & (np.abs(p) < np.abs(0.5 * q * E))
                & (p > q * (A - X))
                & (p < q * (B - X))
            )
            para_rat = np.where(ok, p / np.where(q == 0.0, 1.0, q), 0.0)
        u_para = X + para_rat
        near_edge = ((u_para - A) < T2) | ((B - u_para) < T2)
        si = np.sign(XM - X) + ((XM - X) == 0)
        para_rat = np.where(near_edge, T1 * si, para_rat)

        golden_e = np.where(X >= XM, A - X, B - X)
        new_e = np.where(ok, RAT, golden_e)
        new_rat = np.where(ok, para_rat, _GOLDEN * golden_e)

        si = np.sign(new_rat) + (new_rat == 0)
        U = X + si * np.maximum(np.abs(new_rat), T1)
        FU = np.asarray(fun(U, idx), dtype=float)
        evals[idx] += 1

        better = FU <= FX
        # shrink the interval
        A = np.where(better, np.where(U >= X, X, A), np.where(U < X, U, A))
        B = np.where(better, np.where(U >= X, B, X), np.where(U < X, B, U))
        # bookkeeping of the three best points
        second = ~better & ((FU <= FNFC) | (NFC == X))
        third = ~better & ~second & ((FU <= FFULC) | (FULC == X) | (FULC == NFC))
        shift = better | second
        new_fulc = np.where(shift, NFC, np.where(third, U, FULC))
        new_ffulc = np.where(shift, FNFC, np.where(third, FU, FFULC))
        new_nfc = np.where(better, X, np.where(second, U, NFC))
        new_fnfc = np.where(better, FX, np.where(second, FU, FNFC))

        a[idx], b[idx] = A, B
        fulc[idx], ffulc[idx] = new_fulc, new_ffulc
        nfc[idx], fnfc[idx] = new_nfc, new_fnfc
        xf[idx] = np.where(better, U, X)
        fx[idx] = np.where(better, FU, FX)
        e[idx], rat[idx] = new_e, new_rat

    return xf, converged


def minimize_scalar(
    objective: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-8,
    max_evals: int = MAX_EVALS,
) -> float:
    """Minimize ``objective`` on ``[lo, hi]``.

    Returns a point within ``tol`` (plus a ``sqrt(eps)`` relative term) of a
    local minimizer. Raises :class:`ConvergenceError` after ``max_evals``
    evaluations.

    >>> round(minimize_scalar(lambda a: (a - 2.0) ** 2, 0.01, 100.0), 6)
    2.0
    """
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("interval ends must be finite")

    def fun(x, rows):
        return np.array([objective(float(v)) for v in x])

    x, ok = minimize_batch(fun, [lo], [hi], tol=tol, max_evals=max_evals)
    if not ok[0]:
        raise ConvergenceError(f"no convergence within {max_evals} evaluations")
    return float(x[0])
