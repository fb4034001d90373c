"""Gaussian quadrature rules used throughout the package.

Jacobi rules are built here by Golub-Welsch from the three-term recurrence,
so singular endpoint exponents enter only as recurrence parameters. Hermite,
Legendre and Laguerre rules come from ``numpy.polynomial``.
"""

from functools import lru_cache
import math

import numpy as np
from numpy.polynomial import hermite_e, laguerre, legendre
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NumericError
from .special import ln_gamma, norm_pdf


def _frozen(*arrays):
    for a in arrays:
        a.setflags(write=False)
    return arrays


@lru_cache(maxsize=256)
def jacobi_rule(n: int, a: float, b: float):
    """Gauss-Jacobi nodes and weights on [-1, 1] for weight (1-x)^a (1+x)^b.

    Args:
        n: number of nodes.
        a: exponent at x = 1, must exceed -1.
        b: exponent at x = -1, must exceed -1.

    Returns:
        (nodes, weights), ascending nodes, read-only arrays.
    """
    if n < 1:
        raise DomainError(f"need at least one node, got {n}")
    if a <= -1.0 or b <= -1.0:
        raise DomainError(f"Jacobi exponents must exceed -1, got a={a}, b={b}")
    k = np.arange(n, dtype=float)
    ab = a + b
    s = 2.0 * k + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (b * b - a * a) / (s * (s + 2.0))
    # the k = 0 entry is 0/0 when a + b = 0; use the closed form instead
    diag[0] = (b - a) / (ab + 2.0)
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) ** 2 * (3.0 + ab))
        m = k[2:]
        sm = 2.0 * m + ab
        off[1:] = (
            4.0 * m * (m + a) * (m + b) * (m + ab)
            / (sm * sm * (sm + 1.0) * (sm - 1.0))
        )
        off = np.sqrt(off)
    log_mu0 = (ab + 1.0) * math.log(2.0) + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(ab + 2.0)
    if n == 1:
        x = diag.copy()
        w = np.array([math.exp(log_mu0)])
    else:
        x, vec = eigh_tridiagonal(diag, off)
        w = math.exp(log_mu0) * vec[0] ** 2
    if not (np.all(np.isfinite(x)) and np.all(w > 0)):
        raise NumericError(f"Jacobi rule construction failed for n={n}, a={a}, b={b}")
    return _frozen(x, w)


@lru_cache(maxsize=256)
def jacobi01(n: int, p: float, q: float):
    """Gauss rule on [0, 1] for weight u^p (1-u)^q (unnormalized)."""
    x, w = jacobi_rule(n, q, p)
    u = 0.5 * (1.0 + x)
    return _frozen(u, w * 2.0 ** (-(p + q + 1.0)))


@lru_cache(maxsize=256)
def beta_rule(n: int, alpha: float, k: int = 0):
    """Rule for expectations over Beta(alpha, 1-alpha).

    With u = r^2 the Beta weight becomes r^(2 alpha - 1) (1-r)^(-alpha)
    times the smooth factor 2 (1+r)^(-alpha). Integrands that behave like
    u^(-k/2) times a smooth function of sqrt(u) (prices at the strike, their
    second derivatives) are then integrated spectrally.

    Returns:
        (u, w) with sum(w * F(u)) approximating E[F(B)]. For k = 0 the
        weights sum to one up to rounding.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    p = 2.0 * alpha - 1.0 - k
    r, w = jacobi01(n, p, -alpha)
    log_b = ln_gamma(alpha) + ln_gamma(1.0 - alpha)
    w = w * 2.0 * (1.0 + r) ** (-alpha) * r ** k / math.exp(log_b)
    if k == 0:
        w = w / w.sum()
    return _frozen(r * r, w)


@lru_cache(maxsize=64)
def hermite_rule(n: int):
    """Nodes and weights for E[g(Z)], Z standard normal."""
    z, w = hermite_e.hermegauss(n)
    w = w / w.sum()
    return _frozen(z, w)


@lru_cache(maxsize=64)
def _legendre_ref(n: int):
    return _frozen(*legendre.leggauss(n))


def legendre_rule(n: int, lo: float, hi: float):
    """Gauss-Legendre nodes and weights on [lo, hi]."""
    x, w = _legendre_ref(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


@lru_cache(maxsize=64)
def laguerre_rule(n: int):
    """Gauss-Laguerre nodes and weights for weight e^(-u) on [0, inf)."""
    return _frozen(*laguerre.laggauss(n))


def normal_piecewise_rule(n: int, breaks, lo: float, hi: float):
    """Rule for E[g(Z)] with g smooth between the points in ``breaks``.

    Gauss-Legendre with ``n`` nodes on every piece of [lo, hi] split at the
    break points, multiplied by the normal density and renormalized so the
    constant function is integrated exactly.
    """
    cuts = sorted(b for b in breaks if lo < b < hi)
    edges = [lo, *cuts, hi]
    zs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        z, w = legendre_rule(n, a, b)
        zs.append(z)
        ws.append(w * norm_pdf(z))
    z = np.concatenate(zs)
    w = np.concatenate(ws)
    return z, w / w.sum()
