"""One-sided alpha-stable law with E[exp(-lam S)] = exp(-lam^alpha).

Sampling uses Kanter's representation S = (A(U)/E)^((1-alpha)/alpha). The
same representation gives P(S <= x) = (1/pi) int_0^pi exp(-A(u) x^(-alpha/(1-alpha))) du,
whose derivative is tabulated for the density. Far in the upper tail the
convergent power series in x^(-alpha) is used instead.
"""

from functools import lru_cache
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .quadrature import legendre_rule
from .special import ln_gamma

_TINY = np.finfo(float).tiny
_X_SERIES = 30.0


def kanter_a(alpha: float, u):
    """A(u) = sin(alpha u)^(alpha/(1-alpha)) sin((1-alpha) u) / sin(u)^(1/(1-alpha))."""
    b = 1.0 - alpha
    return np.sin(alpha * u) ** (alpha / b) * np.sin(b * u) / np.sin(u) ** (1.0 / b)


def stable_variates(gen: np.random.Generator, alpha: float, size):
    """One-sided stable draws by Kanter's transform of a uniform and an exponential."""
    u = (gen.random(size) + 2.0**-54) * math.pi
    e = np.maximum(gen.standard_exponential(size), _TINY)
    return (
        np.sin(alpha * u)
        / np.sin(u) ** (1.0 / alpha)
        * (np.sin((1.0 - alpha) * u) / e) ** ((1.0 - alpha) / alpha)
    )


def _u_rule():
    # panels refined geometrically toward both ends of (0, pi)
    edges = [0.0] + [math.pi * 2.0**-k for k in range(40, 0, -1)]
    edges += [math.pi - math.pi * 2.0**-k for k in range(2, 41)] + [math.pi]
    us, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        u, w = legendre_rule(24, a, b)
        us.append(u)
        ws.append(w)
    return np.concatenate(us), np.concatenate(ws)


def _series_pdf(alpha: float, x, terms: int = 40):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for k in range(1, terms + 1):
        c = math.exp(ln_gamma(k * alpha + 1.0) - math.lgamma(k + 1.0)) * math.sin(k * math.pi * alpha)
        out += (-1.0) ** (k + 1) * c * x ** (-k * alpha - 1.0)
    return out / math.pi


@lru_cache(maxsize=16)
def _table(alpha: float):
    u, w = _u_rule()
    au = kanter_a(alpha, u)
    # lower end where the density is below ~1e-300
    p = alpha / (1.0 - alpha)
    a0 = (1.0 - alpha) * alpha**p
    x_lo = (a0 / 650.0) ** (1.0 / p)
    lx = np.linspace(math.log(x_lo), math.log(_X_SERIES), 3000)
    y = np.exp(-p * lx)
    with np.errstate(under="ignore", over="ignore"):
        ay = au[None, :] * y[:, None]
        integrand = np.where(ay < 745.0, ay * np.exp(-np.minimum(ay, 745.0)), 0.0)
    # g(x) = p / (pi x) * int A y exp(-A y) du
    dens = (integrand @ w) * p / (math.pi * np.exp(lx))
    dens = np.maximum(dens, 1e-320)
    spline = CubicSpline(lx, np.log(dens))
    imax = int(np.argmax(dens))
    fine = np.linspace(lx[max(imax - 2, 0)], lx[min(imax + 2, lx.size - 1)], 2001)
    vals = spline(fine)
    k = int(np.argmax(vals))
    return spline, float(lx[0]), float(np.exp(fine[k])), float(np.exp(vals[k]))


def stable_pdf(alpha: float, x):
    """Density of S(1); vectorized, zero for x <= 0."""
    x = np.asarray(x, dtype=float)
    spline, lx_lo, _, _ = _table(alpha)
    out = np.zeros_like(x)
    pos = x > 0
    lx = np.log(np.where(pos, x, 1.0))
    mid = pos & (x <= _X_SERIES) & (lx >= lx_lo)
    out[mid] = np.exp(spline(lx[mid]))
    far = pos & (x > _X_SERIES)
    out[far] = _series_pdf(alpha, x[far])
    return out


def stable_mode(alpha: float):
    """(mode, density at the mode) of S(1), read off the table."""
    _, _, mode, peak = _table(alpha)
    return mode, peak


def bridge_split(gen: np.random.Generator, alpha: float, total, h, max_rounds: int = 200):
    """Sample the first-half increment of a step of length 2h given its total.

    Target density a -> g_h(a) g_h(total - a) on (0, total). Proposal: with
    probability 1/2 a fresh half-step increment, otherwise total minus one.
    The acceptance ratio is bounded by 2 min(g_h(a), g_h(total - a)), which
    in turn is at most 2 g_h(total/2) past the mode.
    """
    total = np.asarray(total, dtype=float)
    scale = np.broadcast_to(np.asarray(h, dtype=float) ** (1.0 / alpha), total.shape)
    d = total / scale
    mode, peak = stable_mode(alpha)
    # small safety factor: the tabulated peak can sit a hair below the true one
    cap = 1.001 * np.where(0.5 * d >= mode, stable_pdf(alpha, 0.5 * d), peak)
    out = np.full(d.shape, np.nan)
    todo = np.arange(d.size)
    for _ in range(max_rounds):
        if todo.size == 0:
            break
        dn = d[todo]
        s = stable_variates(gen, alpha, todo.size)
        flip = gen.random(todo.size) < 0.5
        a = np.where(flip, dn - s, s)
        ok = (a > 0) & (a < dn)
        ga = stable_pdf(alpha, np.where(ok, a, 1.0))
        gb = stable_pdf(alpha, np.where(ok, dn - a, 1.0))
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(ok, ga * gb / (0.5 * (ga + gb)) / (2.0 * cap[todo]), 0.0)
        acc = gen.random(todo.size) < ratio
        out[todo[acc]] = a[acc]
        todo = todo[~acc]
    if todo.size:
        # pathological totals: fall back to an even split, flagged by the caller's tolerance
        out[todo] = 0.5 * d[todo]
    return out * scale
