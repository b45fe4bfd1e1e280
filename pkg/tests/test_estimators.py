import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topp_leone import distribution as dist
from topp_leone import estimators as est
from topp_leone import moments
from topp_leone.errors import DomainError
from topp_leone.rng import replicate_stream
from topp_leone.simulation import draw_samples

X_E1 = 1 - math.sqrt(1 - math.exp(-1))  # g(x) = e^-1
X_E3 = 1 - math.sqrt(1 - math.exp(-3))


def exact_fit_sample(alpha0, n):
    # F(x_(i)) = p_i, so every least-squares residual vanishes at alpha0
    return dist.quantile(est.plotting_positions(n), alpha0)


samples = st.lists(st.floats(min_value=1e-4, max_value=1 - 1e-4), min_size=1, max_size=30)


@pytest.mark.parametrize(
    "values, expected",
    [([X_E1], 1.0), ([0.5], -1 / math.log(0.75)), ([X_E1, X_E3], 0.5)],
)
def test_mle_examples(values, expected):
    assert est.mle(values).alpha_hat == pytest.approx(expected, rel=1e-12)


def test_mle_single_half():
    assert est.mle([0.5]).alpha_hat == pytest.approx(3.4760595, abs=5e-8)


@pytest.mark.parametrize(
    "values, expected",
    [([0.5], -math.log(0.75)), ([X_E1, X_E3], 4.0)],
)
def test_sufficient_statistic(values, expected):
    assert est.sufficient_statistic(values) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(values=samples)
def test_mle_times_t_is_n(values):
    t = est.sufficient_statistic(values)
    assert t > 0
    assert est.mle(values).alpha_hat * t == pytest.approx(len(values), rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(values=samples, method=st.sampled_from(["pce", "lse", "wlse"]))
def test_estimates_positive(values, method):
    assert est.fit(method, values).alpha_hat > 0


def test_umvue_pdf_example():
    mpmath.mp.dps = 30
    ref = 2 * (1 + mpmath.log(mpmath.mpf("0.75"))) / mpmath.mpf("0.75")
    got = est.curve_pdf(est.UmvueFit(1.0, 3), 0.5)
    assert got == pytest.approx(float(ref), rel=1e-13)
    assert got == pytest.approx(1.8995150, abs=1e-6)


def test_umvue_cdf_example():
    mpmath.mp.dps = 30
    ref = (1 + mpmath.log(mpmath.mpf("0.75"))) ** 2
    got = est.curve_cdf(est.UmvueFit(1.0, 3), 0.5)
    assert got == pytest.approx(float(ref), rel=1e-13)
    assert got == pytest.approx(0.5073966, abs=1e-6)


def test_umvue_cdf_near_one():
    for t, n in [(0.1, 3), (2.0, 10), (50.0, 40)]:
        assert est.curve_cdf(est.UmvueFit(t, n), 1 - 1e-12) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("n", [3, 4, 10])
def test_umvue_support(n):
    t = 0.4
    # threshold where t + ln g(x) = 0
    x0 = 1 - math.sqrt(1 - math.exp(-t))
    fit = est.UmvueFit(t, n)
    below = np.linspace(1e-4, x0, 50)[:-1]
    assert np.all(est.curve_pdf(fit, below) == 0.0)
    assert np.all(est.curve_cdf(fit, below) == 0.0)
    assert est.curve_pdf(fit, x0 * (1 + 1e-12)) < 1e-6
    assert est.curve_cdf(fit, x0 * (1 + 1e-12)) < 1e-6
    assert est.curve_cdf(fit, x0 + 0.05) > 0.0


def test_umvue_needs_three():
    with pytest.raises(DomainError):
        est.umvue([0.2, 0.5])
    with pytest.raises(DomainError):
        est.UmvueFit(1.0, 2)


def test_shape_fit_curves():
    assert est.curve_pdf(est.ShapeFit(1.0, "mle"), 0.5) == 1.0
    assert est.curve_cdf(est.ShapeFit(2.0, "pce"), 0.5) == 0.5625


def test_pce_objective_single_point():
    x = 1 - math.sqrt(1 - 0.6)
    assert est.pce_objective(1.0, [x]) == pytest.approx(0.01, rel=1e-12)


def test_wlse_weights():
    assert est.wlse_weights(1).tolist() == [12.0]
    w = est.wlse_weights(9)
    assert np.array_equal(w, w[::-1])


@pytest.mark.parametrize("alpha0", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("method", ["pce", "lse", "wlse"])
def test_zero_residual_objectives(alpha0, method):
    xs = exact_fit_sample(alpha0, 9)
    objective = getattr(est, f"{method}_objective")
    assert objective(alpha0, xs) == pytest.approx(0.0, abs=1e-28)
    assert objective(alpha0 * 1.1, xs) > 0


@pytest.mark.parametrize("alpha0", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("method", ["pce", "lse", "wlse"])
def test_zero_residual_recovery(alpha0, method):
    xs = np.random.default_rng(1).permutation(exact_fit_sample(alpha0, 9))
    assert est.fit(method, xs).alpha_hat == pytest.approx(alpha0, abs=1e-6)


@pytest.mark.parametrize("x", [0.05, 0.3, 0.5, 0.9])
def test_pce_single_point_closed_form(x):
    expected = math.log(0.5) / math.log(dist.g(x))
    assert est.pce([x]).alpha_hat == pytest.approx(expected, rel=1e-7)


@pytest.mark.parametrize("method", ["mle", "pce", "lse", "wlse"])
def test_consistency_large_sample(method):
    xs = dist.sample(2.0, replicate_stream(11, 0), 10**4)
    assert abs(est.fit(method, xs).alpha_hat - 2.0) < 0.1


@pytest.mark.parametrize("method", ["pce", "lse", "wlse"])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_objective_minimality(method, seed):
    xs = dist.sample(1.5, replicate_stream(seed, 0), 25)
    a = est.fit(method, xs).alpha_hat
    objective = getattr(est, f"{method}_objective")
    step = 10 * est.OPT_TOL
    assert objective(a, xs) <= objective(a + step, xs)
    assert objective(a, xs) <= objective(a - step, xs)


def test_batch_matches_single():
    xs = draw_samples(12, 0.8, 5, 0, 40)
    for method in est.ESTIMATORS:
        batch = est.fit_batch(method, xs)
        for i in (0, 17, 39):
            single = est.fit(method, xs[i])
            value = single.t if method == "umvue" else single.alpha_hat
            assert batch.value[i] == value


def test_ties_and_order_do_not_matter():
    xs = [0.3, 0.3, 0.7, 0.1, 0.7]
    for method in ("pce", "lse", "wlse"):
        assert est.fit(method, xs).alpha_hat == est.fit(method, xs[::-1]).alpha_hat


@pytest.mark.parametrize("bad", [[], [0.0, 0.5], [0.5, 1.0], [math.nan]])
def test_rejects_bad_samples(bad):
    with pytest.raises(DomainError):
        est.mle(bad)


N, ALPHA, X = 10, 2.0, 0.5
REPS = 10**5


@pytest.fixture(scope="module")
def replicates():
    return draw_samples(N, ALPHA, 2024, 0, REPS)


def test_umvue_unbiased_mc(replicates):
    fitted = est.fit_batch("umvue", replicates)
    for curve, target in ((fitted.pdf, dist.pdf(X, ALPHA)), (fitted.cdf, dist.cdf(X, ALPHA))):
        v = curve([X])[:, 0]
        se = v.std(ddof=1) / math.sqrt(v.size)
        assert abs(v.mean() - target) <= 3 * se


def test_mle_cdf_biased_mc(replicates):
    v = est.fit_batch("mle", replicates).cdf([X])[:, 0]
    se = v.std(ddof=1) / math.sqrt(v.size)
    assert abs(v.mean() - dist.cdf(X, ALPHA)) > 3 * se
    assert abs(v.mean() - moments.mle_cdf_moment(1, N, ALPHA, X)) <= 3 * se


@pytest.mark.parametrize("method", ["lse", "wlse"])
@pytest.mark.parametrize("x", [0.5, 0.05, 0.95])
def test_single_point_flat_tails(method, x):
    # the n=1 objective is flat at 0.25 over most of the initial bracket
    expected = math.log(0.5) / math.log(dist.g(x))
    assert est.fit(method, [x]).alpha_hat == pytest.approx(expected, rel=1e-7)
