import math
import warnings

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from fracbs.errors import DomainError
from fracbs.gbm import QuadSpec, bs_price, semigroup_apply
from fracbs.levy import StableIndex
from fracbs.pricer import (BoundCheck, Model, SurfaceGrid, d2u_dx2, der4, der5, der6, derub_checks,
                           du_dt, du_dx, est1q, est2q, est3q, frac_delta, frac_gamma, frac_generator,
                           frac_price, frac_time_derivative, lipschitz_check, lobound_check,
                           lobound_constant, price_surface, q_beta, q_beta_generator, slope_bound,
                           time_slope_bound, u_beta)
from fracbs.special import norm_cdf
from fracbs.undershoot import Rng, UndershootLaw, sample_direct

GRID_T = (0.1, 1.0, 5.0)
GRID_X = (0.5, 1.0, 2.0)
GRID_A = (0.55, 0.75, 0.95)


def test_model_validation():
    for a in (0.5, 1.0, 0.3):
        with pytest.raises(DomainError):
            Model.of(a)
    with pytest.raises(DomainError):
        Model.of(0.7, maturity=0.0)
    with pytest.raises(DomainError):
        Model.of(0.7, v=0.1)
    m = Model.of(0.7, 1.5, 2.0)
    assert (m.alpha, m.K, m.maturity) == (0.7, 1.5, 2.0)


def test_frac_price_examples(oracle):
    assert frac_price(Model.of(0.75), 0.0, 3.0) == 2.0
    for a, t, x, ref in oracle["frac_price"]:
        assert frac_price(Model.of(a), t, x) == pytest.approx(ref, rel=1e-12)
    m = Model.of(0.6)
    p = frac_price(m, 0.5, np.array([0.8, 1.0, 1.25]))
    assert p[0] < p[1] < p[2]


def test_frac_price_is_beta_average_of_bs():
    m = Model.of(0.7)
    law = UndershootLaw(m.idx, 1.3)
    h = sample_direct(law, Rng(3), size=400_000)
    vals = bs_price(h, 1.1, 1.0)
    est, se = vals.mean(), vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(frac_price(m, 1.3, 1.1) - est) <= 4 * se


@settings(max_examples=60)
@given(st.floats(0.51, 0.99), st.floats(0.0, 10.0), st.floats(0.05, 20.0))
def test_sandwich(a, t, x):
    q = frac_price(Model.of(a), t, x)
    assert max(x - 1.0, 0.0) - 1e-14 <= q <= min(x, math.exp(abs(math.log(x)))) + 1e-14


def test_delta_examples():
    m = Model.of(0.7)
    h = 1e-5 * 1.4
    fd = (frac_price(m, 1.0, 1.4 + h) - frac_price(m, 1.0, 1.4 - h)) / (2 * h)
    assert frac_delta(m, 1.0, 1.4) == pytest.approx(fd, rel=1e-6)
    assert frac_delta(m, 1e-12, 2.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        frac_delta(m, 0.0, 1.0)
    with pytest.raises(DomainError):
        frac_gamma(m, 0.0, 1.0)


def test_gamma_and_generator():
    m = Model.of(0.75)
    h = 1e-4
    fd = (frac_delta(m, 1.0, 1.2 + h) - frac_delta(m, 1.0, 1.2 - h)) / (2 * h)
    assert frac_gamma(m, 1.0, 1.2) == pytest.approx(fd, rel=1e-6)
    for x in (0.7, 1.0, 1.6):
        assert frac_generator(m, 0.8, x) == pytest.approx(0.5 * x * x * frac_gamma(m, 0.8, x), rel=1e-12)
    # at the strike the BS gamma blows up like s^(-1/2), still integrable
    assert math.isfinite(frac_gamma(m, 1.0, 1.0))


def test_degenerate_second_order_warns():
    m = Model.of(0.75)
    with pytest.warns(RuntimeWarning):
        assert math.isnan(frac_gamma(m, 1e-12, 1.0))


def test_time_derivative_matches_difference():
    m = Model.of(0.65)
    h = 1e-5
    fd = (frac_price(m, 1.0 + h, 1.1) - frac_price(m, 1.0 - h, 1.1)) / (2 * h)
    assert frac_time_derivative(m, 1.0, 1.1) == pytest.approx(fd, rel=1e-6)


@settings(max_examples=40)
@given(st.floats(0.51, 0.99), st.floats(0.01, 8.0), st.floats(0.1, 10.0))
def test_generator_nonnegative_and_bounded(a, t, x):
    m = Model.of(a)
    g = frac_generator(m, t, x)
    assert g >= 0.0
    assert est3q(m, t, x).passed


@pytest.mark.parametrize("a", GRID_A)
def test_est_bounds_on_grid(a):
    m = Model.of(a)
    for t in GRID_T:
        for x in GRID_X:
            for check in (est1q(m, t, x), est2q(m, t, x), est3q(m, t, x), time_slope_bound(m, t, x)):
                assert check.passed, check


def test_time_slope_examples():
    assert time_slope_bound(Model.of(0.75), 1.0, 1.0).passed
    assert time_slope_bound(Model.of(0.55), 0.01, 0.5).passed
    deep = time_slope_bound(Model.of(0.75), 1.0, 0.01)
    assert deep.passed and deep.margin > 0.99


@settings(max_examples=30)
@given(st.floats(0.55, 0.95), st.floats(0.2, 4.0), st.floats(0.05, 0.95), st.floats(0.3, 3.0))
def test_lipschitz_in_time(a, t, frac, x):
    assert lipschitz_check(Model.of(a), t, frac * t, x).passed


def test_bs_bound_checks():
    for t in GRID_T:
        for x in GRID_X:
            assert der4(t, x, 1.0).passed
            assert der5(t, x, 1.0).passed
            assert der6(t, x, 1.0, x, constant=2.0).passed


def test_der6_quoted_constant_fails_near_strike():
    assert not der6(1.0, 1.0, 1.0, 1.0).passed
    assert der6(0.1, 2.0, 1.0, 2.0).passed
    with pytest.raises(DomainError):
        der6(1.0, 0.5, 1.0, 1.0)


def test_bound_check_semantics():
    up = BoundCheck("u", -0.5, 1.0)
    assert up.passed and up.ratio == 0.5 and up.margin == 0.5
    low = BoundCheck("l", 3.0, 2.0, lower=True)
    assert low.passed and low.margin == pytest.approx(0.5)
    assert not BoundCheck("s", 1.0005, 1.0).passed
    assert BoundCheck("s", 1.0005, 1.0, slack=1e-3).passed


def test_u_beta_examples(oracle):
    assert u_beta(1.3, 0.0, 2.0) == pytest.approx(2.0**1.3)
    assert u_beta(0.0, 1.7, 0.4) == pytest.approx(1.0, rel=1e-15)
    f = lambda y: np.exp(0.5 * np.abs(np.log(y)))
    assert u_beta(0.5, 1.0, 2.0) == pytest.approx(semigroup_apply(f, 1.0, 2.0, growth_beta=0.5, kinks=(1.0,)), rel=1e-8)
    for b, t, x, ref in oracle["u_beta"]:
        assert u_beta(b, t, x) == pytest.approx(ref, rel=1e-13)


@settings(max_examples=60)
@given(st.floats(0.0, 2.5), st.floats(0.01, 5.0), st.floats(0.1, 10.0))
def test_u_beta_derivatives(b, t, x):
    assert du_dt(b, t, x) == pytest.approx(0.5 * x * x * d2u_dx2(b, t, x), rel=1e-11, abs=1e-300)
    for check in derub_checks(b, t, x):
        assert check.passed, check


def test_u_beta_derivatives_by_differences():
    b, t, x, h = 1.5, 0.8, 1.7, 1e-5
    assert du_dx(b, t, x) == pytest.approx((u_beta(b, t, x + h) - u_beta(b, t, x - h)) / (2 * h), rel=1e-8)
    assert d2u_dx2(b, t, x) == pytest.approx((du_dx(b, t, x + h) - du_dx(b, t, x - h)) / (2 * h), rel=1e-7)
    assert du_dt(b, t, x) == pytest.approx((u_beta(b, t + h, x) - u_beta(b, t - h, x)) / (2 * h), rel=1e-8)


def test_q_beta_examples(oracle):
    idx = StableIndex(0.75)
    assert q_beta(idx, 0.0, 1.3, 0.4) == pytest.approx(1.0, rel=1e-14)
    assert q_beta(idx, 0.7, 0.0, 3.0) == pytest.approx(3.0**0.7)
    check = lobound_check(idx, 1.5, 1.0, 3.0)
    assert check.passed
    assert check.bound == pytest.approx(norm_cdf(-1.0) * 3.0**1.5, rel=1e-14)
    for a, b, t, x, ref in oracle["q_beta"]:
        assert q_beta(StableIndex(a), b, t, x) == pytest.approx(ref, rel=1e-12)


def test_q_beta_mc_oracle():
    idx = StableIndex(0.75)
    h = sample_direct(UndershootLaw(idx, 1.0), Rng(8), size=1_000_000)
    vals = u_beta(1.5, h, 2.0)
    est, se = vals.mean(), vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(q_beta(idx, 1.5, 1.0, 2.0) - est) <= 4 * se


def test_q_beta_generator_is_beta_average():
    idx = StableIndex(0.6)
    g = q_beta_generator(idx, 1.5, 1.0, 2.0)
    h = 1e-5
    fd = (q_beta(idx, 1.5, 1.0, 2.0 + h) - 2 * q_beta(idx, 1.5, 1.0, 2.0) + q_beta(idx, 1.5, 1.0, 2.0 - h)) / h**2
    assert g == pytest.approx(2.0 * fd, rel=1e-4)


@pytest.mark.parametrize("b", [0.3, 0.5, 0.8, 1.0, 1.5, 2.0])
def test_lobound_constants(b):
    for a in GRID_A:
        for t in GRID_T:
            for x in GRID_X:
                assert lobound_check(StableIndex(a), b, t, x).passed
    assert lobound_constant(b, 1.0) > 0.0


def test_surface():
    m = Model.of(0.75)
    one = price_surface(m, [1.0], [1.2])
    assert one.values[0, 0] == frac_price(m, 1.0, 1.2)
    t = np.linspace(0.1, 3.0, 50)
    x = np.geomspace(0.5, 2.0, 50)
    coarse = price_surface(m, t, x)
    assert np.all(np.diff(coarse.values, axis=1) > 0)
    fine = price_surface(m, t, x, QuadSpec(hermite_nodes=128, jacobi_nodes=128))
    np.testing.assert_allclose(coarse.values, fine.values, rtol=1e-8)
    rec = list(one.records())
    assert rec == [{"t": 1.0, "x": 1.2, "price": one.values[0, 0]}]


def test_surface_validation():
    m = Model.of(0.75)
    with pytest.raises(DomainError):
        price_surface(m, [1.0, 0.5], [1.0])
    with pytest.raises(DomainError):
        SurfaceGrid([1.0], [1.0, 2.0], [[1.0]])
    with pytest.raises(DomainError, match="non-finite"):
        SurfaceGrid([1.0], [1.0], [[np.nan]])
