"""Classical Black-Scholes layer with zero rates and unit volatility.

The pricing generator is G = (x^2/2) d^2/dx^2 and P_t f(x) = E[f(x e^(sqrt(t) Z - t/2))].
"""

from dataclasses import dataclass, replace
import math
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NumericError
from .quadrature import hermite_rule, normal_piecewise_rule
from .special import norm_cdf

T_EPS = 1e-12


@dataclass(frozen=True)
class Strike:
    k: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0.0):
            raise DomainError(f"strike must be positive, got {self.k}")


@dataclass(frozen=True)
class QuadSpec:
    """Node counts for the quadrature rules and an absolute tolerance."""

    hermite_nodes: int = 64
    jacobi_nodes: int = 64
    legendre_nodes: int = 128
    abs_tol: float = 1e-10

    def __post_init__(self):
        for name in ("hermite_nodes", "jacobi_nodes", "legendre_nodes"):
            if getattr(self, name) < 8:
                raise DomainError(f"{name} must be at least 8, got {getattr(self, name)}")
        if not self.abs_tol > 0.0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")

    def scaled(self, factor: int = 2) -> "QuadSpec":
        """Copy with every node count multiplied by ``factor``."""
        return replace(
            self,
            hermite_nodes=self.hermite_nodes * factor,
            jacobi_nodes=self.jacobi_nodes * factor,
            legendre_nodes=self.legendre_nodes * factor,
        )


def _strike(K) -> float:
    return K.k if isinstance(K, Strike) else float(Strike(float(K)).k)


def _spot(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"spot must be positive, got {x!r}")
    return arr


def _time(t, strict=False):
    arr = np.asarray(t, dtype=float)
    bad = arr <= 0.0 if strict else arr < 0.0
    if not np.all(np.isfinite(arr)) or np.any(bad):
        kind = "positive" if strict else "nonnegative"
        raise DomainError(f"time must be {kind}, got {t!r}")
    return arr


def _out(arr, *inputs):
    return float(arr) if all(np.ndim(v) == 0 for v in inputs) else arr


def _exponent(t, x, K):
    # -(4 log^2(x/K) + t^2) / (8 t), common to gamma and theta
    lk = np.log(x / K)
    return -(4.0 * lk * lk + t * t) / (8.0 * t)


def bs_price(t, x, K):
    """Call price q_BS(t, x) for strike K; t is the accumulated variance."""
    K = _strike(K)
    tt, xx = np.broadcast_arrays(_time(t), _spot(x))
    payoff = np.maximum(xx - K, 0.0)
    live = tt >= T_EPS
    ts = np.where(live, tt, 1.0)
    rt = np.sqrt(ts)
    lk = np.log(xx / K)
    d1 = lk / rt + 0.5 * rt
    price = xx * norm_cdf(d1) - K * norm_cdf(d1 - rt)
    # rounding can push a few ulps outside the no-arbitrage band
    price = np.clip(price, payoff, xx)
    return _out(np.where(live, price, payoff), t, x)


def bs_delta(t, x, K):
    """dq_BS/dx = Phi((2 log(x/K) + t) / (2 sqrt t))."""
    K = _strike(K)
    tt, xx = np.broadcast_arrays(_time(t), _spot(x))
    live = tt >= T_EPS
    ts = np.where(live, tt, 1.0)
    rt = np.sqrt(ts)
    d = norm_cdf(np.log(xx / K) / rt + 0.5 * rt)
    limit = np.where(xx > K, 1.0, np.where(xx < K, 0.0, 0.5))
    return _out(np.where(live, d, limit), t, x)


def bs_gamma(t, x, K):
    """d^2 q_BS/dx^2 = sqrt(K / (2 pi t x^3)) exp(-(4 log^2(x/K) + t^2) / (8t))."""
    K = _strike(K)
    tt, xx = np.broadcast_arrays(_time(t), _spot(x))
    live = tt >= T_EPS
    ts = np.where(live, tt, 1.0)
    g = np.sqrt(K / (2.0 * math.pi * ts * xx**3)) * np.exp(_exponent(ts, xx, K))
    return _out(np.where(live, g, 0.0), t, x)


def bs_theta(t, x, K):
    """dq_BS/dt = G q_BS = sqrt(K x / (8 pi t)) exp(-(4 log^2(x/K) + t^2) / (8t))."""
    K = _strike(K)
    tt, xx = np.broadcast_arrays(_time(t), _spot(x))
    live = tt >= T_EPS
    ts = np.where(live, tt, 1.0)
    th = np.sqrt(K * xx / (8.0 * math.pi * ts)) * np.exp(_exponent(ts, xx, K))
    return _out(np.where(live, th, 0.0), t, x)


def gbm_kernel(t, y, x):
    """Transition density of y = x exp(sqrt(t) Z - t/2) at time t."""
    tt = _time(t, strict=True)
    yy = _spot(y)
    xx = _spot(x)
    ly = np.log(yy / xx)
    p = np.exp(-(ly * ly) / (2.0 * tt)) / np.sqrt(2.0 * math.pi * tt)
    dens = np.sqrt(xx) * np.exp(-tt / 8.0) * p / yy**1.5
    return _out(dens, t, y, x)


def semigroup_apply(
    f: Callable[[np.ndarray], np.ndarray],
    t: float,
    x: float,
    q: QuadSpec = QuadSpec(),
    growth_beta: float = 0.0,
    kinks: Sequence[float] = (),
) -> float:
    """P_t f(x) by quadrature in the Gaussian variable.

    Args:
        f: vectorized function of the price.
        t: time, t >= 0.
        x: spot price.
        q: node counts; Hermite by default.
        growth_beta: declared growth index, |f(y)| <= C e^(beta |log y|).
        kinks: prices where f is not smooth. When given, the Gaussian
            variable is integrated piecewise by Gauss-Legendre split at the
            image of every kink, which keeps payoff-like f spectrally
            accurate.
    """
    t = float(_time(t))
    x = float(_spot(x))
    if t < T_EPS:
        return float(np.asarray(f(np.array([x])))[0])
    rt = math.sqrt(t)
    n = q.hermite_nodes
    if growth_beta * rt > 2.0 * math.sqrt(n):
        raise DomainError(
            f"growth beta*sqrt(t) = {growth_beta * rt:.3g} exceeds the limit 2 sqrt({n})"
        )
    if kinks:
        width = 8.5 + growth_beta * rt
        breaks = [(math.log(k / x) + 0.5 * t) / rt for k in kinks if k > 0]
        z, w = normal_piecewise_rule(q.legendre_nodes // 2, breaks, -width, width)
    else:
        z, w = hermite_rule(n)
    vals = np.asarray(f(x * np.exp(rt * z - 0.5 * t)), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise NumericError(f"f is not finite at node z={z[bad]:.6g} (t={t}, x={x})")
    return float(np.dot(w, vals))


def abs_exp_moment(l1, l2, t, x0, negated_args: bool = False):
    """E[exp(l1 |B(t)| + l2 B(t))] for Brownian motion started at x0.

    Completing the square on each half line gives
    F(x0; l1+l2) + F(-x0; l1-l2) with F(y; l) = exp(l y + l^2 t/2) Phi((l t + y)/sqrt t).

    ``negated_args=True`` evaluates the variant with both Phi arguments negated,
    kept only to show that it disagrees with simulation.
    """
    l1, l2, t, x0 = map(float, (l1, l2, t, x0))
    if not all(map(math.isfinite, (l1, l2, t, x0))):
        raise DomainError("abs_exp_moment arguments must be finite")
    _time(t, strict=True)
    c, d = l1 + l2, l1 - l2
    rt = math.sqrt(t)
    sign = -1.0 if negated_args else 1.0
    first = math.exp(c * x0 + 0.5 * c * c * t) * norm_cdf(sign * (c * t + x0) / rt)
    second = math.exp(-d * x0 + 0.5 * d * d * t) * norm_cdf(sign * (d * t - x0) / rt)
    return first + second


def semigroup_closed_exp(b1, b2, t, x):
    """P_t f(x) for f(y) = exp(b1 |log y| + b2 log y), in closed form."""
    if b1 < 0:
        raise DomainError(f"b1 must be nonnegative, got {b1}")
    t = float(_time(t))
    x = float(_spot(x))
    lx = math.log(x)
    if t == 0.0:
        return math.exp(b1 * abs(lx) + b2 * lx)
    # log price at time t is Brownian motion started at log x - t/2
    return abs_exp_moment(b1, b2, t, lx - 0.5 * t)
