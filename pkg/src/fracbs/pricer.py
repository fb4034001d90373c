"""Fractional call price q(t, x) = E[q_BS(H(t), x)] and related quantities.

Every Beta(alpha, 1-alpha) average goes through ``beta_rule``, a Gauss-Jacobi
rule in r = sqrt(u) which absorbs both endpoint singularities of the weight
and the square-root behaviour of q_BS at the strike.
"""

from dataclasses import dataclass, field
from enum import Enum
import math
import warnings

import numpy as np

from .errors import DomainError
from .gbm import QuadSpec, Strike, bs_delta, bs_gamma, bs_price, bs_theta
from .levy import StableIndex
from .quadrature import beta_rule
from .special import gamma, norm_cdf, norm_pdf

T_DEGENERATE = 1e-10


@dataclass(frozen=True)
class Model:
    """Market parameters: stability index, strike, maturity and offset v <= 0."""

    idx: StableIndex
    strike: Strike
    maturity: float = 1.0
    v: float = 0.0

    def __post_init__(self):
        if not 0.5 < self.idx.alpha < 1.0:
            raise DomainError(f"pricing needs alpha in (1/2, 1), got {self.idx.alpha}")
        if not (math.isfinite(self.maturity) and self.maturity > 0.0):
            raise DomainError(f"maturity must be positive, got {self.maturity}")
        if not self.v <= 0.0:
            raise DomainError(f"offset v must be <= 0, got {self.v}")

    @classmethod
    def of(cls, alpha: float, strike: float = 1.0, maturity: float = 1.0, v: float = 0.0):
        return cls(StableIndex(alpha), Strike(strike), maturity, v)

    @property
    def alpha(self) -> float:
        return self.idx.alpha

    @property
    def K(self) -> float:
        return self.strike.k


class SurfaceKind(str, Enum):
    PRICE = "price"
    DELTA = "delta"
    GAMMA = "gamma"
    GENERATOR = "generator"
    RESIDUAL = "residual"


@dataclass
class SurfaceGrid:
    t_nodes: np.ndarray
    x_nodes: np.ndarray
    values: np.ndarray
    kind: SurfaceKind = SurfaceKind.PRICE
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t_nodes = np.asarray(self.t_nodes, dtype=float)
        self.x_nodes = np.asarray(self.x_nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.t_nodes.size, self.x_nodes.size):
            raise DomainError(
                f"values shape {self.values.shape} does not match "
                f"{self.t_nodes.size} x {self.x_nodes.size} nodes"
            )
        if not np.all(np.isfinite(self.values)):
            i, j = np.argwhere(~np.isfinite(self.values))[0]
            raise DomainError(f"non-finite value at t={self.t_nodes[i]}, x={self.x_nodes[j]}")
        self.kind = SurfaceKind(self.kind)

    def records(self):
        for i, t in enumerate(self.t_nodes):
            for j, x in enumerate(self.x_nodes):
                yield {"t": float(t), "x": float(x), self.kind.value: float(self.values[i, j])}


def _check_t(t, strict=False):
    t = float(t)
    if not math.isfinite(t) or t < 0.0 or (strict and t == 0.0):
        raise DomainError(f"time must be {'positive' if strict else 'nonnegative'}, got {t}")
    return t


def _spot(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"spot must be positive, got {x!r}")
    return arr


def beta_average(fn, alpha: float, t: float, x, n: int, k: int = 0):
    """E[fn(t B, x)] over B ~ Beta(alpha, 1-alpha), vectorized in x.

    ``k = 1`` selects the rule for integrands of order (tB)^(-1/2) at the strike.
    """
    u, w = beta_rule(n, alpha, k)
    xx = _spot(x)
    vals = fn(t * u[:, None], xx.reshape(1, -1))
    out = w @ vals
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(xx.shape)


def frac_price(m: Model, t, x, q: QuadSpec = QuadSpec()):
    """Fractional call price q(t, x), the Beta average of q_BS(t u, x)."""
    t = _check_t(t)
    xx = _spot(x)
    if t < T_DEGENERATE:
        out = np.maximum(xx - m.K, 0.0)
        return float(out) if np.ndim(x) == 0 else out
    return beta_average(lambda s, y: bs_price(s, y, m.strike), m.alpha, t, x, q.jacobi_nodes)


def frac_delta(m: Model, t, x, q: QuadSpec = QuadSpec()):
    """d q / dx as the Beta average of Phi(d1)."""
    t = _check_t(t, strict=True)
    if t < T_DEGENERATE:
        return bs_delta(0.0, x, m.strike)
    return beta_average(lambda s, y: bs_delta(s, y, m.strike), m.alpha, t, x, q.jacobi_nodes)


def _degenerate(x):
    warnings.warn("second-order quantity is degenerate as t -> 0; returning nan", RuntimeWarning)
    return math.nan if np.ndim(x) == 0 else np.full(np.shape(x), math.nan)


def frac_gamma(m: Model, t, x, q: QuadSpec = QuadSpec()):
    """d^2 q / dx^2; finite only because alpha > 1/2."""
    t = _check_t(t, strict=True)
    if t < T_DEGENERATE:
        return _degenerate(x)
    return beta_average(lambda s, y: bs_gamma(s, y, m.strike), m.alpha, t, x, q.jacobi_nodes, k=1)


def frac_generator(m: Model, t, x, q: QuadSpec = QuadSpec()):
    """G q = (x^2/2) d^2 q / dx^2, as the Beta average of G q_BS."""
    t = _check_t(t, strict=True)
    if t < T_DEGENERATE:
        return _degenerate(x)
    return beta_average(lambda s, y: bs_theta(s, y, m.strike), m.alpha, t, x, q.jacobi_nodes, k=1)


def frac_time_derivative(m: Model, t, x, q: QuadSpec = QuadSpec()):
    """d q / dt = E[B dq_BS/dt (t B, x)], differentiating under the integral."""
    t = _check_t(t, strict=True)
    fn = lambda s, y: (s / t) * bs_theta(s, y, m.strike)
    return beta_average(fn, m.alpha, t, x, q.jacobi_nodes)


def price_surface(m: Model, t_nodes, x_nodes, q: QuadSpec = QuadSpec()) -> SurfaceGrid:
    """Prices on the lattice t_nodes x x_nodes."""
    t_nodes = np.asarray(t_nodes, dtype=float)
    x_nodes = np.asarray(x_nodes, dtype=float)
    for name, nodes in (("t_nodes", t_nodes), ("x_nodes", x_nodes)):
        if nodes.ndim != 1 or np.any(np.diff(nodes) <= 0):
            raise DomainError(f"{name} must be strictly increasing")
    vals = np.empty((t_nodes.size, x_nodes.size))
    for i, t in enumerate(t_nodes):
        try:
            vals[i] = frac_price(m, t, x_nodes, q)
        except (DomainError, ArithmeticError) as exc:
            raise DomainError(f"price failed at t={t}: {exc}") from exc
    return SurfaceGrid(t_nodes, x_nodes, vals, SurfaceKind.PRICE,
                       {"alpha": m.alpha, "strike": m.K})


# auxiliary solutions with initial datum f_beta(x) = exp(beta |log x|)

def _ub_parts(b, t, x):
    tt = np.asarray(t, dtype=float)
    ll = np.log(_spot(x))
    rt = np.sqrt(tt)
    big_a = np.exp(b * ll + 0.5 * b * (b - 1.0) * tt)
    big_c = np.exp(-b * ll + 0.5 * b * (b + 1.0) * tt)
    pa = norm_cdf(ll / rt + (b - 0.5) * rt)
    pc = norm_cdf(-ll / rt + (b + 0.5) * rt)
    # A phi(a) = C phi(c), written without the large factors
    d = np.exp(0.5 * ll - ll * ll / (2.0 * tt) - tt / 8.0) / math.sqrt(2.0 * math.pi)
    return big_a * pa, big_c * pc, d, ll, rt


def _ub_guard(b, t, x, strict):
    if b < 0:
        raise DomainError(f"beta must be nonnegative, got {b}")
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0) or (strict and np.any(tt <= 0)):
        raise DomainError(f"time must be {'positive' if strict else 'nonnegative'}, got {t!r}")
    _spot(x)


def _shape(out, t, x):
    return float(out) if np.ndim(t) == 0 and np.ndim(x) == 0 else out


def u_beta(b: float, t, x):
    """u_beta(t, x) = P_t f_beta(x) = E[exp(b |log x + sqrt(t) Z - t/2|)]."""
    _ub_guard(b, t, x, strict=False)
    tt, xx = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    zero = tt < 1e-300
    ts = np.where(zero, 1.0, tt)
    pa, pc, _, ll, _ = _ub_parts(b, ts, xx)
    out = np.where(zero, np.exp(b * np.abs(np.log(xx))), pa + pc)
    return _shape(out, t, x)


def du_dx(b: float, t, x):
    _ub_guard(b, t, x, strict=True)
    pa, pc, _, _, _ = _ub_parts(b, t, x)
    return _shape(b / np.asarray(x, dtype=float) * (pa - pc), t, x)


def d2u_dx2(b: float, t, x):
    _ub_guard(b, t, x, strict=True)
    pa, pc, d, _, rt = _ub_parts(b, t, x)
    xx = np.asarray(x, dtype=float)
    out = b / xx**2 * ((b - 1.0) * pa + (b + 1.0) * pc + 2.0 * d / rt)
    return _shape(out, t, x)


def du_dt(b: float, t, x):
    """d u_beta / dt, equal to G u_beta."""
    _ub_guard(b, t, x, strict=True)
    pa, pc, d, _, rt = _ub_parts(b, t, x)
    out = 0.5 * b * ((b - 1.0) * pa + (b + 1.0) * pc) + b * d / rt
    return _shape(out, t, x)


def q_beta(idx: StableIndex, b: float, t, x, q: QuadSpec = QuadSpec()):
    """Beta average of u_beta(t u, x); solves the special equation with datum f_beta."""
    t = _check_t(t)
    if b < 0:
        raise DomainError(f"beta must be nonnegative, got {b}")
    if t < T_DEGENERATE:
        return u_beta(b, 0.0, x)
    return beta_average(lambda s, y: u_beta(b, s, y), idx.alpha, t, x, q.jacobi_nodes)


def q_beta_generator(idx: StableIndex, b: float, t, x, q: QuadSpec = QuadSpec()):
    """G q_beta as the Beta average of G u_beta."""
    t = _check_t(t, strict=True)
    return beta_average(lambda s, y: du_dt(b, s, y), idx.alpha, t, x, q.jacobi_nodes, k=1)


def lobound_constant(b: float, t: float) -> float:
    """Piecewise constant C_beta(t) with q_beta(t, x) >= C_beta(t) e^(beta |log x|)."""
    if b <= 0.5:
        return 0.5 * math.exp(0.5 * b * (b - 1.0) * t)
    if b <= 1.0:
        return math.exp(0.5 * b * (b - 1.0) * t) * norm_cdf(-(b - 0.5) * math.sqrt(t))
    return norm_cdf(-(b - 0.5) * math.sqrt(t))


# bounds as predicates

@dataclass(frozen=True)
class BoundCheck:
    """Outcome of comparing |value| with an analytic bound."""

    name: str
    value: float
    bound: float
    slack: float = 0.0
    lower: bool = False

    @property
    def passed(self) -> bool:
        if self.lower:
            return self.value >= self.bound * (1.0 - self.slack)
        return abs(self.value) <= self.bound * (1.0 + self.slack)

    @property
    def ratio(self) -> float:
        """|value| / bound for upper bounds, value / bound for lower ones."""
        v = self.value if self.lower else abs(self.value)
        return v / self.bound if self.bound else math.inf

    @property
    def margin(self) -> float:
        return 1.0 - self.ratio if not self.lower else self.ratio - 1.0


def est1q(m: Model, t, x, q=QuadSpec()):
    return BoundCheck("est1q", frac_price(m, t, x, q), math.exp(abs(math.log(x))))


def est2q(m: Model, t, x, q=QuadSpec()):
    return BoundCheck("est2q", frac_delta(m, t, x, q), 1.0)


def est3q_bound(m: Model, t, x):
    a = m.alpha
    return math.sqrt(m.K * x / (2.0 * t)) * gamma(a - 0.5) / (2.0 * math.pi * gamma(a))


def est3q(m: Model, t, x, q=QuadSpec()):
    return BoundCheck("est3q", frac_generator(m, t, x, q), est3q_bound(m, t, x))


def slope_bound(m: Model, t, x):
    """Gamma(alpha+1/2) / (pi Gamma(alpha)) sqrt(K x / t)."""
    a = m.alpha
    return gamma(a + 0.5) / (math.pi * gamma(a)) * math.sqrt(m.K * x / t)


def time_slope_bound(m: Model, t, x, q=QuadSpec()) -> BoundCheck:
    """Central difference of q in t (h = 1e-4 t) against the slope bound, 1e-3 slack."""
    t = _check_t(t, strict=True)
    h = 1e-4 * t
    slope = (frac_price(m, t + h, x, q) - frac_price(m, t - h, x, q)) / (2.0 * h)
    return BoundCheck("ACqstar", slope, slope_bound(m, t, x), slack=1e-3)


def lipschitz_check(m: Model, t, s, x, q=QuadSpec()) -> BoundCheck:
    """|q(t-s, x) - q(t, x)| against Gamma(alpha+1/2) s / (pi Gamma(alpha)) sqrt(K x / (t-s))."""
    if not 0.0 < s < t:
        raise DomainError(f"need 0 < s < t, got s={s}, t={t}")
    diff = frac_price(m, t - s, x, q) - frac_price(m, t, x, q)
    return BoundCheck("lipschitz", diff, s * slope_bound(m, t - s, x))


def der4(t, x, K):
    return BoundCheck("der4", bs_delta(t, x, K), 1.0)


def der5(t, x, K):
    k = K.k if isinstance(K, Strike) else float(K)
    return BoundCheck("der5", bs_theta(t, x, K), math.sqrt(k * x / (8.0 * math.pi * t)))


def der6(t, x, K, a, constant: float = 8.0):
    """Second-derivative bound sqrt(K / (c pi a^3 t)) for x >= a.

    ``constant=8`` is the bound as usually quoted; it fails near the strike
    for small t. ``constant=2`` is the sharp constant of the closed form.
    """
    if x < a:
        raise DomainError(f"need x >= a, got x={x}, a={a}")
    k = K.k if isinstance(K, Strike) else float(K)
    name = "der6" if constant == 8.0 else f"der6[c={constant:g}]"
    return BoundCheck(name, bs_gamma(t, x, K), math.sqrt(k / (constant * math.pi * a**3 * t)))


def derub_checks(b: float, t: float, x: float):
    """Growth bounds on u_beta and its derivatives."""
    lx = abs(math.log(x))
    e = math.exp(0.5 * b * (b + 1.0) * t)
    return [
        BoundCheck("derub3.5", u_beta(b, t, x), 2.0 * e * math.exp(b * lx)),
        BoundCheck("derub4", du_dx(b, t, x), 2.0 * b * e * math.exp((b + 1.0) * lx)),
        BoundCheck(
            "derub5",
            d2u_dx2(b, t, x),
            2.0 * b * (b + 1.0) * e * math.exp((b + 2.0) * lx)
            + b * math.sqrt(2.0) / math.sqrt(math.pi * t) * math.exp(1.5 * lx),
        ),
        BoundCheck(
            "derub6",
            du_dt(b, t, x),
            b * (b + 1.0) * e * math.exp(b * lx) + b / math.sqrt(2.0 * math.pi * t) * math.exp(0.5 * lx),
        ),
    ]


def lobound_check(idx: StableIndex, b: float, t: float, x: float, q=QuadSpec()) -> BoundCheck:
    val = q_beta(idx, b, t, x, q)
    return BoundCheck("lobound", val, lobound_constant(b, t) * math.exp(b * abs(math.log(x))), lower=True)
