import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest
from scipy import integrate

from fracbs.errors import DomainError, NumericError
from fracbs.gbm import (QuadSpec, Strike, abs_exp_moment, bs_delta, bs_gamma, bs_price, bs_theta,
                        gbm_kernel, semigroup_apply, semigroup_closed_exp)
from fracbs.special import norm_cdf


def mc_mean(samples):
    return samples.mean(), samples.std(ddof=1) / math.sqrt(samples.size)


@pytest.fixture(scope="module")
def normals():
    return np.random.default_rng(2718).standard_normal(10_000_000)


def test_types_validate():
    with pytest.raises(DomainError):
        Strike(0.0)
    with pytest.raises(DomainError):
        QuadSpec(hermite_nodes=4)
    with pytest.raises(DomainError):
        QuadSpec(abs_tol=0.0)
    assert QuadSpec().scaled(2).jacobi_nodes == 128


def test_bs_price_examples(oracle):
    assert bs_price(1e-14, 2.0, 1.0) == pytest.approx(1.0)
    assert bs_price(0.0, 2.0, 1.0) == 1.0
    assert bs_price(1.0, 1.0, 1.0) == pytest.approx(2.0 * norm_cdf(0.5) - 1.0, rel=1e-15)
    for t, x, ref in oracle["bs_price"]:
        assert bs_price(t, x, 1.0) == pytest.approx(ref, rel=1e-13)


def test_bs_price_mc_oracle(normals):
    est, se = mc_mean(np.maximum(1.2 * np.exp(normals - 0.5) - 1.0, 0.0))
    assert abs(bs_price(1.0, 1.2, 1.0) - est) <= 4 * se


def test_bs_price_domain():
    with pytest.raises(DomainError):
        bs_price(1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        bs_price(-1.0, 1.0, 1.0)


def test_sandwich_grid():
    t = np.geomspace(1e-4, 10.0, 40)[:, None]
    x = np.geomspace(0.1, 10.0, 41)[None, :]
    p = bs_price(t, x, 1.0)
    assert np.all(p >= np.maximum(x - 1.0, 0.0))
    assert np.all(p <= x)
    assert np.all(p <= np.exp(np.abs(np.log(x))))


def test_greek_examples():
    t = 0.8
    assert bs_delta(t, math.exp(-t / 2), 1.0) == pytest.approx(0.5, abs=1e-15)
    assert bs_theta(1.0, 1.0, 1.0) == pytest.approx(math.exp(-1 / 8) / math.sqrt(8 * math.pi), rel=1e-14)
    h = 1e-5
    fd = (bs_delta(0.7, 1.3 + h, 1.0) - bs_delta(0.7, 1.3 - h, 1.0)) / (2 * h)
    assert bs_gamma(0.7, 1.3, 1.0) == pytest.approx(fd, rel=1e-6)


@given(st.floats(1e-3, 10.0), st.floats(0.05, 20.0), st.floats(0.2, 5.0))
def test_greek_properties(t, x, k):
    d, g, th = bs_delta(t, x, k), bs_gamma(t, x, k), bs_theta(t, x, k)
    assert 0.0 <= d <= 1.0
    assert g >= 0.0
    if th > 1e-300:
        assert th == pytest.approx(0.5 * x * x * g, rel=1e-12)
    assert th <= math.sqrt(k * x / (8 * math.pi * t)) * (1 + 1e-12)


def test_theta_is_time_derivative():
    h = 1e-6
    fd = (bs_price(1.0 + h, 1.1, 1.0) - bs_price(1.0 - h, 1.1, 1.0)) / (2 * h)
    assert bs_theta(1.0, 1.1, 1.0) == pytest.approx(fd, rel=1e-7)


def test_degenerate_time_guard():
    assert bs_gamma(1e-13, 1.0, 1.0) == 0.0
    assert bs_theta(1e-13, 1.0, 1.0) == 0.0
    assert bs_delta(0.0, 2.0, 1.0) == 1.0
    assert bs_delta(0.0, 0.5, 1.0) == 0.0


def test_kernel_integrates_to_one_and_mean():
    mass, _ = integrate.quad(lambda u: gbm_kernel(1.0, math.exp(u), 2.0) * math.exp(u), -30, 30, limit=200)
    assert mass == pytest.approx(1.0, abs=1e-10)
    mean, _ = integrate.quad(lambda u: gbm_kernel(0.5, math.exp(u), 1.5) * math.exp(2 * u), -30, 30, limit=200)
    assert mean == pytest.approx(1.5, rel=1e-10)


def test_kernel_mode():
    y = np.linspace(0.05, 1.0, 20001)
    dens = gbm_kernel(1.0, y, 1.0)
    assert y[np.argmax(dens)] == pytest.approx(math.exp(-1.5), abs=1e-4)


@pytest.mark.parametrize("t,x", [(0.3, 0.7), (1.0, 1.0), (3.0, 2.5)])
def test_semigroup_martingale_and_markov(t, x):
    assert semigroup_apply(lambda y: y, t, x) == pytest.approx(x, rel=1e-12)
    assert semigroup_apply(lambda y: np.ones_like(y), t, x) == pytest.approx(1.0, rel=1e-14)
    assert semigroup_apply(lambda y: y**2, 0.0, x) == x * x


def test_semigroup_on_bs_price():
    val = semigroup_apply(lambda y: bs_price(0.5, y, 1.0), 0.5, 1.1, growth_beta=1.0)
    assert val == pytest.approx(bs_price(1.0, 1.1, 1.0), rel=1e-8)


def test_semigroup_law():
    f = lambda y: bs_price(0.3, y, 1.0)
    inner = lambda y: np.array([semigroup_apply(f, 0.4, yi, growth_beta=1.0) for yi in np.atleast_1d(y)])
    twice = semigroup_apply(inner, 0.6, 1.2, growth_beta=1.0)
    assert twice == pytest.approx(bs_price(1.3, 1.2, 1.0), rel=1e-7)


def test_semigroup_closed_form_examples():
    f = lambda b1, b2: (lambda y: np.exp(b1 * np.abs(np.log(y)) + b2 * np.log(y)))
    assert semigroup_closed_exp(0.0, 1.0, 1.7, 1.3) == pytest.approx(1.3, rel=1e-14)
    assert semigroup_closed_exp(0.0, 0.0, 1.7, 1.3) == pytest.approx(1.0, rel=1e-14)
    assert semigroup_closed_exp(0.4, 0.2, 0.0, 2.0) == pytest.approx(math.exp(0.6 * math.log(2.0)))
    for (b1, b2, t, x) in [(0.4, 0.2, 1.0, 1.3), (0.3, 0.0, 1.0, 2.0)]:
        num = semigroup_apply(f(b1, b2), t, x, growth_beta=b1 + abs(b2), kinks=(1.0,))
        assert num == pytest.approx(semigroup_closed_exp(b1, b2, t, x), rel=1e-8)


@given(st.floats(0.0, 2.0), st.floats(-1.0, 1.0), st.floats(0.01, 3.0), st.floats(0.1, 10.0))
def test_semigroup_growth_bound(b1, b2, t, x):
    b = b1 + abs(b2)
    val = semigroup_closed_exp(b1, b2, t, x)
    assert 0.0 < val <= 2.0 * math.exp(b * abs(math.log(x))) * math.exp(0.5 * b * (b + 1) * t) * (1 + 1e-12)


def test_semigroup_rejects_bad_growth_and_nonfinite():
    with pytest.raises(DomainError):
        semigroup_apply(lambda y: y, 10.0, 1.0, growth_beta=10.0)
    with pytest.raises(NumericError, match="node"):
        semigroup_apply(lambda y: np.where(y > 2.0, np.inf, y), 1.0, 1.0)


@settings(max_examples=50)
@given(st.floats(0.01, 4.0), st.floats(0.2, 5.0))
def test_positivity_preserving(t, x):
    assert semigroup_apply(lambda y: np.maximum(y - 1.0, 0.0), t, x, growth_beta=1.0) >= 0.0


def test_abs_exp_moment_examples(normals):
    z = normals
    assert abs_exp_moment(0.0, 1.0, 1.0, 0.0) == pytest.approx(math.exp(0.5), rel=1e-15)
    est, se = mc_mean(np.exp(np.abs(z)))
    val = abs_exp_moment(1.0, 0.0, 1.0, 0.0)
    assert val == pytest.approx(2 * math.exp(0.5) * norm_cdf(1.0), rel=1e-14)
    assert abs(val - est) <= 4 * se
    b = 0.3 + math.sqrt(2.0) * z
    est, se = mc_mean(np.exp(0.5 * np.abs(b) - 0.5 * b))
    assert abs(abs_exp_moment(0.5, -0.5, 2.0, 0.3) - est) <= 4 * se


def test_abs_exp_moment_negated_variant_is_refuted(normals):
    est, se = mc_mean(np.exp(np.abs(normals)))
    wrong = abs_exp_moment(1.0, 0.0, 1.0, 0.0, negated_args=True)
    assert abs(wrong - est) > 100 * se


@given(st.floats(-2, 2), st.floats(0.05, 3), st.floats(-2, 2))
def test_abs_exp_moment_reduces_at_zero_l1(l2, t, x0):
    ref = math.exp(l2 * x0 + 0.5 * l2 * l2 * t)
    assert abs_exp_moment(0.0, l2, t, x0) == pytest.approx(ref, rel=1e-12)
