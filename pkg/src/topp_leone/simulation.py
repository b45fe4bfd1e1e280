"""Monte Carlo comparison of the five PDF/CDF estimators.

Replicate ``r`` of every cell draws its sample from
``replicate_stream(seed, r)``, so all estimators, sizes and shapes share
common random numbers, and any replicate can be regenerated on its own.
Replicates are processed in fixed-size chunks; the chunk layout, not the
worker count, fixes the arithmetic, so results are bit-identical for any
number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import distribution as dist
from .errors import DomainError
from .estimators import ESTIMATORS, BatchFit, fit_batch
from .rng import uniform_block

__all__ = [
    "CHUNK",
    "DEFAULT_GRID",
    "AGGREGATES",
    "StudyConfig",
    "MseRecord",
    "parse_grid",
    "describe_grid",
    "draw_samples",
    "replicate_fits",
    "mc_mse",
    "run_study",
]

CHUNK = 2048
AGGREGATES = ("mean", "per-point")
FAILURE_FLAG_FRACTION = 0.01


def parse_grid(text: str) -> tuple:
    """Parse ``lo:hi:count`` into evenly spaced abscissae."""
    try:
        lo_s, hi_s, count_s = text.split(":")
        lo, hi, count = float(lo_s), float(hi_s), int(count_s)
    except ValueError:
        raise DomainError(f"grid must look like lo:hi:count, got {text!r}") from None
    if count < 1:
        raise DomainError("grid count must be >= 1")
    if count == 1 and lo != hi:
        raise DomainError("a one-point grid needs lo == hi")
    pts = np.linspace(lo, hi, count)
    dist.check_unit(pts, "grid")
    return tuple(float(v) for v in pts)


DEFAULT_GRID = parse_grid("0.05:0.95:19")


def describe_grid(grid) -> str:
    """Compact text form of a grid: ``lo:hi:count`` when evenly spaced."""
    pts = np.asarray(grid, dtype=float)
    if pts.size == 1:
        return f"{float(pts[0])!r}:{float(pts[0])!r}:1"
    even = np.linspace(pts[0], pts[-1], pts.size)
    if np.array_equal(even, pts):
        return f"{float(pts[0])!r}:{float(pts[-1])!r}:{pts.size}"
    return ";".join(repr(v) for v in pts.tolist())


@dataclass(frozen=True)
class StudyConfig:
    """Design of a simulation study; the defaults are the standard 4 x 4 design with 1000 replicates."""

    alphas: tuple = (0.5, 1.0, 2.0, 3.0)
    sizes: tuple = (10, 20, 50, 100)
    reps: int = 1000
    seed: int = 42
    estimators: tuple = ESTIMATORS
    grid: tuple = field(default=DEFAULT_GRID)
    aggregate: str = "mean"

    def __post_init__(self):
        alphas = tuple(dist.check_alpha(a) for a in self.alphas)
        sizes = tuple(self.sizes)
        if not alphas or not sizes:
            raise DomainError("alphas and sizes must be non-empty")
        for n in sizes:
            if int(n) != n or n < 1:
                raise DomainError(f"sample sizes must be positive integers, got {n!r}")
        sizes = tuple(int(n) for n in sizes)
        estimators = tuple(self.estimators)
        for k in estimators:
            if k not in ESTIMATORS:
                raise DomainError(f"unknown estimator {k!r}; choose from {ESTIMATORS}")
        if not estimators:
            raise DomainError("no estimators selected")
        if "umvue" in estimators and min(sizes) < 3:
            raise DomainError("UMVUE needs every sample size >= 3")
        if int(self.reps) != self.reps or self.reps < 1:
            raise DomainError(f"reps must be a positive integer, got {self.reps!r}")
        if int(self.seed) != self.seed or not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        grid = tuple(float(v) for v in np.asarray(self.grid, dtype=float).reshape(-1))
        dist.check_unit(grid, "grid")
        if self.aggregate not in AGGREGATES:
            raise DomainError(f"aggregate must be one of {AGGREGATES}")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "estimators", estimators)
        object.__setattr__(self, "reps", int(self.reps))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class MseRecord:
    """One cell of the study for one target curve."""

    estimator: str
    n: int
    alpha: float
    target: str
    mse: float
    mc_se: float
    reps: int
    seed: int
    grid: str
    failures: int

    @property
    def flagged(self) -> bool:
        """More than 1% of the replicates failed to fit."""
        return self.failures > FAILURE_FLAG_FRACTION * self.reps


def draw_samples(n: int, alpha: float, seed: int, start: int, stop: int) -> np.ndarray:
    """Samples of replicates ``start .. stop-1``, one row each."""
    u = uniform_block(seed, np.arange(start, stop), n)
    x = np.asarray(dist.quantile(u, alpha))
    return np.clip(x, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


def _chunks(reps: int):
    return [(s, min(s + CHUNK, reps)) for s in range(0, reps, CHUNK)]


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def replicate_fits(kind: str, n: int, alpha: float, seed: int, reps: int, workers: int = 1) -> BatchFit:
    """Fit ``kind`` to replicates ``0 .. reps-1`` of the ``(n, alpha)`` cell."""

    def one(bounds):
        return fit_batch(kind, draw_samples(n, alpha, seed, *bounds))

    parts = _map(one, _chunks(reps), workers)
    return BatchFit(
        kind,
        n,
        np.concatenate([p.value for p in parts]),
        np.concatenate([p.failed for p in parts]),
    )


def _squared_errors(kind, n, alpha, grid, seed, bounds):
    fitted = fit_batch(kind, draw_samples(n, alpha, seed, *bounds))
    x = np.asarray(grid)
    pdf_err = (fitted.pdf(x) - dist.pdf(x, alpha)) ** 2
    cdf_err = (fitted.cdf(x) - dist.cdf(x, alpha)) ** 2
    return pdf_err, cdf_err, fitted.failed


def _summarize(errors: np.ndarray):
    # errors: one value per successful replicate
    k = errors.size
    if k == 0:
        return math.nan, math.nan
    mse = float(np.mean(errors))
    se = float(np.std(errors, ddof=1) / math.sqrt(k)) if k > 1 else 0.0
    return mse, se


def mc_mse(kind: str, n: int, alpha: float, config: StudyConfig, workers: int = 1) -> list:
    """Monte Carlo MSEs of one estimator in one ``(n, alpha)`` cell.

    Returns the PDF record(s) followed by the CDF record(s): one of each for
    ``aggregate="mean"``, one per grid point for ``"per-point"``. ``mc_se``
    is the standard error over replicates of the (grid-averaged) squared
    error. Replicates whose fit failed are left out and counted.
    """
    if kind not in ESTIMATORS:
        raise DomainError(f"unknown estimator {kind!r}")
    if kind == "umvue" and n < 3:
        raise DomainError("UMVUE needs n >= 3")
    alpha = dist.check_alpha(alpha)
    grid = config.grid

    def one(bounds):
        return _squared_errors(kind, n, alpha, grid, config.seed, bounds)

    parts = _map(one, _chunks(config.reps), workers)
    pdf_err = np.concatenate([p[0] for p in parts])
    cdf_err = np.concatenate([p[1] for p in parts])
    failed = np.concatenate([p[2] for p in parts])
    ok = ~failed
    failures = int(failed.sum())

    def record(target, mse, se, grid_desc):
        return MseRecord(kind, int(n), alpha, target, mse, se, config.reps, config.seed, grid_desc, failures)

    out = []
    for target, err in (("pdf", pdf_err), ("cdf", cdf_err)):
        if config.aggregate == "mean":
            mse, se = _summarize(np.mean(err[ok], axis=1))
            out.append(record(target, mse, se, describe_grid(grid)))
        else:
            for j, x in enumerate(grid):
                mse, se = _summarize(err[ok, j])
                out.append(record(target, mse, se, repr(x)))
    return out


def run_study(config: StudyConfig, workers: int = 1) -> list:
    """All cells of ``config`` in (estimator, n, alpha, target) order."""
    records = []
    for kind in config.estimators:
        for n in config.sizes:
            for alpha in config.alphas:
                records.extend(mc_mse(kind, n, alpha, config, workers=workers))
    return records
