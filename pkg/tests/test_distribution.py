import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import oracles
from exgd import distribution as dist
from exgd.distribution import Parameters
from exgd.errors import DomainError, PoleError, SurvivalUnderflowError


def quad_pdf(p, lo=0.0, hi=np.inf):
    f = lambda x: dist.exgd_pdf(x, p) if x > 0 else 0.0
    pts = [lo] + [b for b in (1 / p.theta, 5 / p.theta, 20 / p.theta, 60 / p.theta) if lo < b < hi] + [hi]
    return sum(integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0] for a, b in zip(pts, pts[1:]))


# -- parameters ---------------------------------------------------------------------

@pytest.mark.parametrize("a,t", [(0, 1), (1, 0), (-1, 1), (1, float("inf")), (float("nan"), 1)])
def test_parameters_reject_invalid(a, t):
    with pytest.raises(DomainError):
        Parameters(a, t)


def test_parameters_are_floats_and_immutable():
    p = Parameters(2, 1)
    assert isinstance(p.alpha, float) and p.as_tuple() == (2.0, 1.0)
    with pytest.raises(Exception):
        p.alpha = 3.0


# -- baseline -------------------------------------------------------------------------

def test_xgamma_pdf_examples():
    assert dist.xgamma_pdf(0.0, 1.0) == pytest.approx(0.5)
    assert dist.xgamma_pdf(1.0, 1.0) == pytest.approx(0.5 * 1.5 * math.exp(-1), rel=1e-14)
    assert dist.xgamma_pdf(1.0, 1.0) == pytest.approx(0.2759096, abs=1e-7)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_xgamma_pdf_normalized(t):
    total = integrate.quad(lambda x: dist.xgamma_pdf(x, t), 0, np.inf, epsabs=1e-13)[0]
    assert total == pytest.approx(1.0, abs=1e-10)


def test_bracket_stable_form_matches_direct_form():
    x = np.linspace(0.1, 40, 200)
    for t in (0.01, 0.5, 3.0):
        assert np.allclose(dist.cdf_bracket(x, t), dist.xgamma_cdf(x, t), rtol=1e-9, atol=1e-15)
        assert np.allclose(dist.cdf_bracket(x, t) + dist.cdf_bracket_complement(x, t), 1.0, atol=1e-15)


def test_bracket_small_x_keeps_relative_precision():
    # the direct form cancels catastrophically here; the rearranged one must not
    x, t = 1e-9, 0.7
    ref = float(oracles.cdf_mp(x, 1.0, t))
    assert dist.cdf_bracket(x, t) == pytest.approx(ref, rel=1e-12)


# -- EXGD ---------------------------------------------------------------------------

def test_cdf_at_zero_and_reduction():
    p = Parameters(0.4634, 0.00278)
    assert dist.exgd_cdf(0.0, p) == 0.0
    x = np.linspace(0, 30, 61)
    assert np.allclose(dist.exgd_cdf(x, Parameters(1.0, 0.8)), dist.xgamma_cdf(x, 0.8), rtol=1e-12, atol=1e-15)


def test_cdf_matches_integrated_pdf():
    p = Parameters(0.4634, 0.00278)
    assert dist.exgd_cdf(500.0, p) == pytest.approx(quad_pdf(p, 0.0, 500.0), abs=1e-8)


@pytest.mark.parametrize("a,t", [(0.5, 1.0), (2.0, 0.5), (0.4634, 0.00278)])
def test_pdf_normalized(a, t):
    assert quad_pdf(Parameters(a, t)) == pytest.approx(1.0, abs=1e-8)


def test_pdf_examples():
    assert dist.exgd_pdf(1.0, Parameters(1.0, 1.0)) == pytest.approx(0.2759096, abs=1e-7)
    assert dist.exgd_pdf(0.0, Parameters(2.0, 1.0)) == 0.0
    assert dist.exgd_pdf(0.0, Parameters(1.0, 3.0)) == pytest.approx(9 / 4)
    with pytest.raises(PoleError):
        dist.exgd_pdf(0.0, Parameters(0.5, 1.0))
    with pytest.raises(PoleError):
        dist.exgd_logpdf(np.array([0.0, 1.0]), Parameters(0.5, 1.0))


def test_pdf_is_derivative_of_cdf():
    p = Parameters(2.0, 0.5)
    h = 1e-5
    fd = (dist.exgd_cdf(2 + h, p) - dist.exgd_cdf(2 - h, p)) / (2 * h)
    assert fd == pytest.approx(dist.exgd_pdf(2.0, p), rel=1e-6)


@pytest.mark.parametrize("a", [0.3, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("t", [0.01, 0.5, 1.0, 3.0])
def test_density_grid_normalization_and_derivative(a, t):
    p = Parameters(a, t)
    assert quad_pdf(p) == pytest.approx(1.0, abs=1e-8)
    x = dist.quantile(np.array([0.1, 0.3, 0.5, 0.7, 0.9]), p)
    h = 1e-5 * x
    fd = (dist.exgd_cdf(x + h, p) - dist.exgd_cdf(x - h, p)) / (2 * h)
    assert np.allclose(fd, dist.exgd_pdf(x, p), rtol=1e-5)


def test_pdf_matches_independent_formula():
    rng = np.random.default_rng(3)
    for _ in range(30):
        a, t = math.exp(rng.uniform(-2, 2)), math.exp(rng.uniform(-4, 1))
        x = float(dist.quantile(rng.uniform(0.01, 0.99), Parameters(a, t)))
        assert dist.exgd_pdf(x, Parameters(a, t)) == pytest.approx(float(oracles.pdf_mp(x, a, t)), rel=1e-11)


def test_survival_and_hazard():
    p = Parameters(2.5, 0.7)
    assert dist.exgd_survival(0.0, p) == 1.0
    x = np.random.default_rng(0).uniform(0.01, 40, 100)
    hz = dist.exgd_hazard(x, p)
    assert np.allclose(hz, dist.exgd_pdf(x, p) / dist.exgd_survival(x, p), rtol=1e-12)


def test_hazard_reduces_to_xgamma():
    ref = oracles.Xgamma(1.3)
    x = np.linspace(0.05, 30, 40)
    got = dist.exgd_hazard(x, Parameters(1.0, 1.3))
    assert np.allclose(got, [ref.hazard(v) for v in x], rtol=1e-12)


def test_far_tail_survival_is_accurate():
    p = Parameters(3.0, 1.0)
    x = 60.0
    ref = 1 - oracles.cdf_mp(x, 3.0, 1.0)
    assert dist.exgd_survival(x, p) == pytest.approx(float(ref), rel=1e-10)


def test_hazard_signals_underflow():
    with pytest.raises(SurvivalUnderflowError):
        dist.exgd_hazard(5000.0, Parameters(2.0, 1.0))


def test_negative_x_rejected():
    with pytest.raises(DomainError):
        dist.exgd_cdf(-1.0, Parameters(1, 1))


def test_monotone_cdf_and_survival():
    p = Parameters(0.7, 0.2)
    x = np.linspace(0, 200, 2001)
    F, S = dist.exgd_cdf(x, p), dist.exgd_survival(x, p)
    assert np.all(np.diff(F) >= 0) and np.all(np.diff(S) <= 0)


# -- quantiles ---------------------------------------------------------------------------

def test_quantile_roundtrip_fitted_parameters():
    p = Parameters(0.4634, 0.00278)
    for u in (0.1, 0.5, 0.9):
        assert dist.exgd_cdf(dist.quantile(u, p), p) == pytest.approx(u, abs=1e-9)


def test_quantile_tends_to_zero_and_increases():
    p = Parameters(2.0, 1.0)
    u = np.array([1e-12, 1e-8, 1e-4, 0.1, 0.5, 0.9, 0.999999])
    q = dist.quantile(u, p)
    assert q[0] < 1e-3 and np.all(np.diff(q) > 0)


def test_xgamma_median_by_independent_bisection():
    ref = oracles.Xgamma(1.0).quantile(0.5)
    assert dist.quantile(0.5, Parameters(1.0, 1.0)) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.2, float("nan")])
def test_quantile_domain(u):
    with pytest.raises(DomainError):
        dist.quantile(u, Parameters(1, 1))


@settings(max_examples=150, deadline=None)
@given(a=st.floats(0.05, 30), t=st.floats(1e-3, 30), u=st.floats(1e-6, 1 - 1e-6))
def test_quantile_roundtrip_property(a, t, u):
    p = Parameters(a, t)
    assert abs(dist.exgd_cdf(dist.quantile(u, p), p) - u) < 1e-9


def test_bowley_formula_symmetry_and_bounds():
    # the formula itself gives zero on symmetric quartiles
    q1, q2, q3 = 1.0, 2.0, 3.0
    assert (q3 - 2 * q2 + q1) / (q3 - q1) == 0
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = Parameters(math.exp(rng.uniform(-2, 2.5)), math.exp(rng.uniform(-3, 1)))
        assert -1 < dist.bowley_skewness(p) < 1


def test_quantile_shape_measures_stable_under_tolerance():
    p = Parameters(2.0, 1.0)
    assert dist.bowley_skewness(p, tol=1e-8) == pytest.approx(dist.bowley_skewness(p, tol=1e-12), abs=1e-8)
    assert dist.moors_kurtosis(p, tol=1e-8) == pytest.approx(dist.moors_kurtosis(p, tol=1e-12), abs=1e-8)


def test_shape_measures_against_reference_quantiles():
    ref = oracles.Xgamma(1.0)
    q = [ref.quantile(k / 8) for k in range(1, 8)]
    moors = (q[6] - q[4] + q[2] - q[0]) / (q[5] - q[1])
    bowley = (q[5] - 2 * q[3] + q[1]) / (q[5] - q[1])
    p = Parameters(1.0, 1.0)
    assert dist.moors_kurtosis(p) == pytest.approx(moors, rel=1e-9)
    assert dist.bowley_skewness(p) == pytest.approx(bowley, rel=1e-9)


# -- order statistics --------------------------------------------------------------------

def test_order_stats_single_observation():
    p = Parameters(2.0, 1.0)
    x = np.linspace(0.1, 8, 20)
    assert np.allclose(dist.order_stat_pdf(x, 1, 1, p), dist.exgd_pdf(x, p), rtol=1e-13)
    assert np.allclose(dist.order_stat_cdf(x, 1, 1, p), dist.exgd_cdf(x, p), rtol=1e-13)


def test_order_stat_max_law():
    p = Parameters(0.8, 0.4)
    x = np.linspace(0.1, 20, 25)
    assert np.allclose(dist.order_stat_cdf(x, 6, 6, p), dist.exgd_cdf(x, p) ** 6, rtol=1e-12)


def test_order_stat_pdf_matches_product_form():
    p = Parameters(2.0, 1.0)
    x = np.linspace(0.05, 10, 50)
    F, f = dist.exgd_cdf(x, p), dist.exgd_pdf(x, p)
    for n, k in [(5, 3), (7, 1), (7, 7), (9, 4)]:
        lead = math.factorial(n) / (math.factorial(k - 1) * math.factorial(n - k))
        want = lead * F ** (k - 1) * (1 - F) ** (n - k) * f
        assert np.allclose(dist.order_stat_pdf(x, k, n, p), want, rtol=1e-10, atol=1e-12)


def test_order_stat_cdf_matches_binomial_form():
    p = Parameters(1.7, 0.6)
    x = np.linspace(0.05, 15, 40)
    F = dist.exgd_cdf(x, p)
    n, k = 6, 2
    want = sum(math.comb(n, j) * F**j * (1 - F) ** (n - j) for j in range(k, n + 1))
    assert np.allclose(dist.order_stat_cdf(x, k, n, p), want, atol=1e-12)


def test_order_stat_pdf_integrates_to_one():
    p = Parameters(2.0, 1.0)
    total = integrate.quad(lambda t: dist.order_stat_pdf(t, 3, 5, p), 0, np.inf, epsabs=1e-12)[0]
    assert total == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("k,n", [(0, 3), (4, 3), (1.5, 3)])
def test_order_stat_validation(k, n):
    with pytest.raises(DomainError):
        dist.order_stat_pdf(1.0, k, n, Parameters(1, 1))


# -- sampling ------------------------------------------------------------------------------

def test_sample_is_reproducible():
    p = Parameters(0.4634, 0.00278)
    assert np.array_equal(dist.sample(50, p, seed=42), dist.sample(50, p, seed=42))
    assert not np.array_equal(dist.sample(50, p, seed=42), dist.sample(50, p, seed=43))


@pytest.mark.parametrize("n", [0, -3, 2.5])
def test_sample_size_validation(n):
    with pytest.raises(DomainError):
        dist.sample(n, Parameters(1, 1))
