"""Quantities attached to the Bernstein function phi(lambda) = lambda^alpha."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError
from .quadrature import jacobi01
from .special import gamma


def _positive(value, name):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


@dataclass(frozen=True)
class StableIndex:
    """Stability index of the one-sided stable subordinator, 0 < alpha < 1."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")

    def phi(self, lam):
        """Laplace exponent lambda^alpha."""
        return np.power(lam, self.alpha)


def levy_density(idx: StableIndex, s):
    """Density of the Levy measure, alpha s^(-alpha-1) / Gamma(1-alpha)."""
    a = idx.alpha
    arr = _positive(s, "s")
    return _out(a * arr ** (-a - 1.0) / gamma(1.0 - a), s)


def tail(idx: StableIndex, t):
    """Levy tail nu_bar(t) = t^(-alpha) / Gamma(1-alpha)."""
    a = idx.alpha
    arr = _positive(t, "t")
    return _out(arr ** (-a) / gamma(1.0 - a), t)


def integrated_tail(idx: StableIndex, t):
    """I(t) = integral of the tail over [0, t]."""
    a = idx.alpha
    arr = _positive(t, "t")
    return _out(arr ** (1.0 - a) / ((1.0 - a) * gamma(1.0 - a)), t)


def moment_j(idx: StableIndex, t):
    """J(t) = int_0^t s nu(ds) = alpha t^(1-alpha) / Gamma(2-alpha).

    Integration by parts gives J(t) = I(t) - t nu_bar(t).
    """
    a = idx.alpha
    arr = _positive(t, "t")
    return _out(a * arr ** (1.0 - a) / gamma(2.0 - a), t)


def moment_j_quadrature(idx: StableIndex, t: float, n_nodes: int = 16) -> float:
    """J(t) straight from its definition, by Gauss-Jacobi against s^(-alpha)."""
    a = idx.alpha
    _positive(t, "t")
    u, w = jacobi01(n_nodes, -a, 0.0)
    # s = t u: s nu(ds) = alpha/Gamma(1-alpha) t^(1-alpha) u^(-alpha) du
    return t ** (1.0 - a) * a / gamma(1.0 - a) * math.fsum(w)


def potential_density(idx: StableIndex, s):
    """Potential density of the subordinator, s^(alpha-1) / Gamma(alpha)."""
    a = idx.alpha
    arr = _positive(s, "s")
    return _out(arr ** (a - 1.0) / gamma(a), s)


def sonine_check(idx: StableIndex, t: float, n_nodes: int = 32) -> float:
    """Evaluate the convolution of potential density and tail at t.

    The singular factors tau^(alpha-1) (t-tau)^(-alpha) are the Jacobi
    weight, so the quadrature sees only the constant prefactor and the
    result should be 1 to rounding.
    """
    if n_nodes < 8:
        raise DomainError(f"n_nodes must be at least 8, got {n_nodes}")
    _positive(t, "t")
    a = idx.alpha
    u, w = jacobi01(n_nodes, a - 1.0, -a)
    # tau = t u: t^(alpha-1) t^(-alpha) dtau = du
    smooth = np.full_like(u, 1.0 / (gamma(a) * gamma(1.0 - a)))
    return math.fsum(w * smooth)
