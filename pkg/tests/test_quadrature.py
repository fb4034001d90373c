import math

import numpy as np
import pytest
from scipy.special import roots_jacobi

from fracbs.quadrature import (beta_rule, hermite_rule, jacobi01, jacobi_rule, laguerre_rule,
                               legendre_rule, normal_piecewise_rule)
from fracbs.special import beta_fn


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@pytest.mark.parametrize("a,b", [(-0.75, -0.25), (-0.4, 0.6), (0.0, 0.0), (1.5, -0.5)])
def test_jacobi_matches_scipy(a, b):
    x, w = jacobi_rule(20, a, b)
    xs, ws = roots_jacobi(20, a, b)
    np.testing.assert_allclose(x, xs, rtol=0, atol=1e-12)
    np.testing.assert_allclose(w, ws, rtol=1e-10)


@pytest.mark.parametrize("p,q", [(-0.75, -0.25), (-0.45, 0.0), (0.3, -0.6)])
def test_jacobi01_moments(p, q):
    u, w = jacobi01(16, p, q)
    for k in range(10):
        exact = beta_fn(p + 1 + k, q + 1)
        assert float(np.dot(w, u**k)) == pytest.approx(exact, rel=1e-13)


def test_rules_are_read_only():
    u, w = jacobi01(8, -0.5, -0.5)
    with pytest.raises(ValueError):
        w[0] = 1.0


@pytest.mark.parametrize("alpha", [0.55, 0.75, 0.95])
@pytest.mark.parametrize("k", [0, 1])
def test_beta_rule_is_beta_expectation(alpha, k):
    u, w = beta_rule(48, alpha, k)
    assert w.sum() == pytest.approx(1.0, rel=1e-13)
    assert float(np.dot(w, u)) == pytest.approx(alpha, rel=1e-12)
    # E[B^(-1/2)] = B(alpha - 1/2, 1 - alpha) / B(alpha, 1 - alpha)
    # exact for the k = 1 rule, which carries the extra r^(-1) in its weight
    if k == 1:
        target = beta_fn(alpha - 0.5, 1 - alpha) / beta_fn(alpha, 1 - alpha)
        assert float(np.dot(w, u**-0.5)) == pytest.approx(target, rel=1e-10)


def test_hermite_moments():
    z, w = hermite_rule(32)
    assert w.sum() == pytest.approx(1.0, rel=1e-14)
    assert float(np.dot(w, z**2)) == pytest.approx(1.0, rel=1e-13)
    assert float(np.dot(w, z**4)) == pytest.approx(3.0, rel=1e-13)
    assert float(np.dot(w, np.exp(0.7 * z))) == pytest.approx(math.exp(0.245), rel=1e-13)


def test_legendre_and_laguerre():
    x, w = legendre_rule(10, 1.0, 3.0)
    assert float(np.dot(w, x**5)) == pytest.approx((3**6 - 1) / 6, rel=1e-14)
    y, v = laguerre_rule(20)
    assert float(np.dot(v, y**3)) == pytest.approx(6.0, rel=1e-12)


def test_normal_piecewise_handles_kink():
    z, w = normal_piecewise_rule(32, [0.3], -8.5, 8.5)
    assert w.sum() == pytest.approx(1.0, rel=1e-14)
    # E[(Z - 0.3)+] = phi(0.3) - 0.3 (1 - Phi(0.3))
    from fracbs.special import norm_cdf, norm_pdf
    exact = norm_pdf(0.3) - 0.3 * (1.0 - norm_cdf(0.3))
    assert float(np.dot(w, np.maximum(z - 0.3, 0.0))) == pytest.approx(exact, rel=1e-12)
