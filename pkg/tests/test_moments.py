import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from topp_leone import distribution as dist
from topp_leone import estimators as est
from topp_leone import moments
from topp_leone.errors import DomainError
from topp_leone.simulation import draw_samples

GRID = [(n, a, x) for n in (5, 10) for a in (0.5, 1.0, 2.0) for x in (0.25, 0.5, 0.75)]


def mp_s_moment(r, n, alpha, x, target):
    """E[curve(alpha_hat)^r] integrating against the inverse-gamma law of n/T."""
    mpmath.mp.dps = 30
    n, a, x = mpmath.mpf(n), mpmath.mpf(alpha), mpmath.mpf(x)
    b = mpmath.log(2 * x - x * x)

    def density(s):
        # S = n / T with T ~ Gamma(n, a)
        return (n * a) ** n / mpmath.gamma(n) * s ** (-n - 1) * mpmath.exp(-n * a / s)

    def curve(s):
        if target == "pdf":
            return s * (2 - 2 * x) * mpmath.exp((s - 1) * b)
        return mpmath.exp(s * b)

    peak = n * a / (n + 1)
    return float(mpmath.quad(lambda s: curve(s) ** r * density(s), [0, peak, 4 * peak, mpmath.inf]))


def mp_umvue_second(n, alpha, x, target):
    mpmath.mp.dps = 30
    a, x = mpmath.mpf(alpha), mpmath.mpf(x)
    b = mpmath.log(2 * x - x * x)

    def density(t):
        return a**n * t ** (n - 1) * mpmath.exp(-a * t) / mpmath.gamma(n)

    def curve(t):
        if t + b <= 0:
            return mpmath.mpf(0)
        if target == "pdf":
            return (n - 1) * (2 - 2 * x) * (t + b) ** (n - 2) / (mpmath.exp(b) * t ** (n - 1))
        return ((t + b) / t) ** (n - 1)

    return float(mpmath.quad(lambda t: curve(t) ** 2 * density(t), [-b, -b + 1, n / a, mpmath.inf]))


@pytest.mark.parametrize("n, alpha, x", GRID)
@pytest.mark.parametrize("r", [1, 2])
def test_mle_closed_forms_vs_quadrature(r, n, alpha, x):
    assert moments.mle_pdf_moment(r, n, alpha, x) == pytest.approx(
        moments.mle_pdf_moment_quad(r, n, alpha, x), rel=1e-7)
    assert moments.mle_cdf_moment(r, n, alpha, x) == pytest.approx(
        moments.mle_cdf_moment_quad(r, n, alpha, x), rel=1e-7)


@pytest.mark.parametrize("n, alpha, x", GRID[::4])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_mle_moments_vs_mpmath(r, n, alpha, x):
    assert moments.mle_pdf_moment(r, n, alpha, x) == pytest.approx(mp_s_moment(r, n, alpha, x, "pdf"), rel=1e-10)
    assert moments.mle_cdf_moment(r, n, alpha, x) == pytest.approx(mp_s_moment(r, n, alpha, x, "cdf"), rel=1e-10)


def test_quadrature_examples():
    assert moments.mle_pdf_moment(2, 10, 1.0, 0.5) == pytest.approx(mp_s_moment(2, 10, 1.0, 0.5, "pdf"), rel=1e-8)
    assert moments.mle_cdf_moment(2, 5, 0.5, 0.3) == pytest.approx(mp_s_moment(2, 5, 0.5, 0.3, "cdf"), rel=1e-8)


def test_mle_cdf_moment_near_one():
    assert moments.mle_cdf_moment(1, 10, 1.0, 1 - 1e-7) == pytest.approx(1.0, abs=1e-9)


def test_large_n_limit():
    assert moments.mle_pdf_moment(1, 200, 2.0, 0.5) == pytest.approx(dist.pdf(0.5, 2.0), rel=0.01)


@pytest.mark.parametrize("n, alpha, x", GRID)
def test_mse_at_least_squared_bias(n, alpha, x):
    bias_pdf = moments.mle_pdf_moment(1, n, alpha, x) - dist.pdf(x, alpha)
    bias_cdf = moments.mle_cdf_moment(1, n, alpha, x) - dist.cdf(x, alpha)
    assert moments.mle_pdf_mse(n, alpha, x) >= bias_pdf**2
    assert moments.mle_cdf_mse(n, alpha, x) >= bias_cdf**2


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("x", [0.1, 0.5, 0.9])
def test_mses_shrink_with_n(alpha, x):
    sizes = [5, 10, 25, 50, 100]
    for fn in (moments.mle_pdf_mse, moments.mle_cdf_mse, moments.umvue_pdf_mse, moments.umvue_cdf_mse):
        values = [fn(n, alpha, x) for n in sizes]
        assert all(v >= 0 for v in values)
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 0.1 * values[0]


@pytest.mark.parametrize("n, alpha, x", GRID + [(15, a, x) for a in (0.5, 1.0, 2.0) for x in (0.25, 0.5, 0.75)])
def test_umvue_series_vs_quadrature(n, alpha, x):
    for fn in (moments.umvue_pdf_second_moment, moments.umvue_cdf_second_moment):
        sm = fn(n, alpha, x)
        assert sm.rel_diff <= 1e-8
        assert sm.series_reliable


@pytest.mark.parametrize("n, alpha, x", GRID[::3])
def test_umvue_second_moment_vs_mpmath(n, alpha, x):
    assert moments.umvue_pdf_second_moment(n, alpha, x).value == pytest.approx(
        mp_umvue_second(n, alpha, x, "pdf"), rel=1e-9)
    assert moments.umvue_cdf_second_moment(n, alpha, x).value == pytest.approx(
        mp_umvue_second(n, alpha, x, "cdf"), rel=1e-9)


def test_series_needs_zero_term():
    # dropping the i = 0 term misses the quadrature value badly
    n, a, x = 5, 1.0, 0.5
    b = math.log(dist.g(x))
    p, q = 2 * n - 2, n - 1
    full = sum(math.comb(p, i) * b**i * a**i * float(mpmath.gammainc(q + 1 - i, -a * b)) for i in range(p + 1))
    first = full - math.comb(p, 0) * float(mpmath.gammainc(q + 1, -a * b))
    quad = moments.umvue_cdf_second_moment(n, a, x).quadrature * math.gamma(n)
    assert full == pytest.approx(quad, rel=1e-10)
    assert abs(first - quad) > 0.1 * quad


def test_umvue_n_minimum():
    with pytest.raises(DomainError):
        moments.umvue_pdf_mse(2, 1.0, 0.5)


@pytest.mark.parametrize("x", [1 - 1e-8, 1 - 1e-12, 1 - 2**-53])
def test_near_one_finite(x):
    # K_nu diverges as its argument -> 0 but the assembled log value does not
    for n in (10, 100):
        assert 0.0 <= moments.mle_pdf_mse(n, 1.0, x) < 1e-15
        assert 0.0 <= moments.mle_cdf_mse(n, 1.0, x) < 1e-12


def test_large_n_stays_finite():
    sm = moments.umvue_pdf_second_moment(100, 2.0, 0.5)
    assert math.isfinite(sm.value)
    assert moments.mle_pdf_mse(500, 2.0, 0.5) < moments.mle_pdf_mse(100, 2.0, 0.5)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
def test_umvue_vs_mle_grid_average(alpha):
    # exact, noise-free comparison on the default grid; records which of the
    # two analytic estimators has the smaller averaged MSE
    grid = np.linspace(0.05, 0.95, 19)
    for n in (10, 20, 50, 100):
        mle = np.mean([moments.mle_pdf_mse(n, alpha, x) for x in grid])
        umv = np.mean([moments.umvue_pdf_mse(n, alpha, x) for x in grid])
        if alpha == 0.5:
            assert umv < mle
        assert umv > 0 and mle > 0


MC_REPS = 10**6


@pytest.fixture(scope="module")
def mc_n10_a1():
    return draw_samples(10, 1.0, 99, 0, MC_REPS)


def test_mle_moments_vs_mc(mc_n10_a1):
    fitted = est.fit_batch("mle", mc_n10_a1)
    for values, exact in (
        (fitted.pdf([0.5])[:, 0], moments.mle_pdf_moment(1, 10, 1.0, 0.5)),
        (fitted.cdf([0.5])[:, 0], moments.mle_cdf_moment(1, 10, 1.0, 0.5)),
    ):
        se = values.std(ddof=1) / math.sqrt(values.size)
        assert abs(values.mean() - exact) <= 3 * se


def test_mle_mse_vs_mc(mc_n10_a1):
    fitted = est.fit_batch("mle", mc_n10_a1)
    err = (fitted.pdf([0.5])[:, 0] - dist.pdf(0.5, 1.0)) ** 2
    assert err.mean() == pytest.approx(moments.mle_pdf_mse(10, 1.0, 0.5), rel=0.02)


def test_umvue_variance_vs_mc():
    xs = draw_samples(10, 2.0, 7, 0, 10**5)
    v = est.fit_batch("umvue", xs).pdf([0.5])[:, 0]
    sq = (v - v.mean()) ** 2
    se = sq.std(ddof=1) / math.sqrt(sq.size)
    assert abs(sq.mean() - moments.umvue_pdf_mse(10, 2.0, 0.5)) <= 3 * se


def test_quadrature_oracle_independent():
    # scipy-free check of the t-integral prefactor: E[F_tilde] = F(x)
    n, a, x = 6, 1.3, 0.4
    b = math.log(dist.g(x))
    val, _ = integrate.quad(
        lambda t: ((t + b) / t) ** (n - 1) * a**n * t ** (n - 1) * math.exp(-a * t) / math.gamma(n), -b, np.inf)
    assert val == pytest.approx(dist.cdf(x, a), rel=1e-9)


@pytest.mark.parametrize("n, alpha, x", [(30, 3.0, 0.05), (100, 3.0, 0.05)])
def test_series_cancellation_flagged(n, alpha, x):
    # alternating series loses everything here; quadrature stays exact
    sm = moments.umvue_pdf_second_moment(n, alpha, x)
    assert not sm.series_reliable
    assert sm.condition > 1e10
    assert sm.value == pytest.approx(mp_umvue_second(n, alpha, x, "pdf"), rel=1e-10)
