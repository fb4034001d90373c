"""The coupled operator phi(d/dt - G) for phi(lambda) = lambda^alpha.

For f on [0, inf) x (0, inf),

    -phi(d/dt - G) f(t, x) = A + B - nu_bar(t) f(t, x),
    A = int_0^t (P_s f(t-s) - P_s f(t))(x) nu(ds),
    B = int_0^t (P_s f(t) - f(t))(x) nu(ds).

Both integrands vanish linearly at s = 0, so the outer integral is taken
against s^(-alpha) with the smooth factor g(s)/s: Gauss-Jacobi on [0, t/2]
and Gauss-Legendre in v with s = t - (t/2) v^2 on [t/2, t], which absorbs
the square-root behaviour of f(t-s, .) as its time argument reaches 0.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NumericError
from .gbm import QuadSpec, semigroup_apply
from .levy import StableIndex, tail
from .pricer import Model, frac_price, q_beta
from .quadrature import jacobi01, laguerre_rule, legendre_rule
from .special import gamma


@dataclass(frozen=True)
class SpaceTimeFn:
    """A function f(t, x), vectorized in x, with its declared growth index.

    ``kinks`` lists prices where f(0, .) is not smooth; the inner semigroup
    quadrature splits there.
    """

    evaluator: Callable[[float, np.ndarray], np.ndarray]
    growth_beta: float
    payoff_at_zero: Callable[[np.ndarray], np.ndarray]
    kinks: Sequence[float] = ()
    name: str = "f"

    def __post_init__(self):
        probe = np.array([0.5, 1.0, 2.0])
        lhs = np.asarray(self.evaluator(0.0, probe), dtype=float)
        rhs = np.asarray(self.payoff_at_zero(probe), dtype=float)
        if not np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12):
            raise DomainError(f"{self.name}: evaluator(0, x) differs from payoff_at_zero(x)")

    def __call__(self, t, x):
        return self.evaluator(t, x)


def price_fn(m: Model, q: QuadSpec = QuadSpec()) -> SpaceTimeFn:
    return SpaceTimeFn(
        lambda t, x: frac_price(m, t, x, q),
        1.0,
        lambda x: np.maximum(np.asarray(x, dtype=float) - m.K, 0.0),
        (m.K,),
        "frac_price",
    )


def q_beta_fn(idx: StableIndex, b: float, q: QuadSpec = QuadSpec()) -> SpaceTimeFn:
    return SpaceTimeFn(
        lambda t, x: q_beta(idx, b, t, x, q),
        b,
        lambda x: np.exp(b * np.abs(np.log(np.asarray(x, dtype=float)))),
        (1.0,),
        f"q_beta[{b:g}]",
    )


def constant_fn(c: float) -> SpaceTimeFn:
    return SpaceTimeFn(
        lambda t, x: np.full(np.shape(x), float(c)),
        0.0,
        lambda x: np.full(np.shape(x), float(c)),
        (),
        f"const[{c:g}]",
    )


def _bump(y, radius):
    y = np.asarray(y, dtype=float) / radius
    inside = np.abs(y) < 1.0
    out = np.zeros_like(y)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - y[inside] ** 2))
    return out


def bump_fn(radius: float = 0.5, center: float = 1.0, sign: float = 1.0) -> SpaceTimeFn:
    """(1 - e^(-t)) times a smooth compactly supported hump in log x."""
    lc = math.log(center)
    return SpaceTimeFn(
        lambda t, x: sign * (1.0 - math.exp(-t)) * _bump(np.log(x) - lc, radius),
        0.0,
        lambda x: np.zeros(np.shape(x)),
        (center * math.exp(-radius), center * math.exp(radius)),
        "bump" if sign > 0 else "-bump",
    )


@dataclass(frozen=True)
class OperatorTerms:
    """The pieces of the split; ``value`` is phi(d/dt - G) f(t, x)."""

    a: float
    b: float
    tail_term: float
    f_tx: float

    @property
    def value(self) -> float:
        return -(self.a + self.b - self.tail_term)


def _outer_rule(alpha: float, t: float, n: int):
    """Nodes s_i and weights w_i with sum w_i h(s_i) ~ int_0^t s^(-alpha) h(s) ds."""
    half = 0.5 * t
    u, wu = jacobi01(n, -alpha, 0.0)
    s1 = half * u
    w1 = wu * half ** (1.0 - alpha)
    v, wv = legendre_rule(n, 0.0, 1.0)
    s2 = t - half * v * v
    w2 = wv * t * v * s2 ** (-alpha)
    return np.concatenate([s1, s2]), np.concatenate([w1, w2])


def nonlocal_terms(f: SpaceTimeFn, idx: StableIndex, t: float, x: float,
                   q: QuadSpec = QuadSpec()) -> OperatorTerms:
    if not (math.isfinite(t) and t > 0.0):
        raise DomainError(f"t must be positive, got {t}")
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x}")
    a = idx.alpha
    s, w = _outer_rule(a, t, q.jacobi_nodes)
    f_tx = float(np.asarray(f(t, np.array([x])))[0])
    ga = np.empty_like(s)
    gb = np.empty_like(s)
    for i, si in enumerate(s):
        try:
            # differences inside P_s, so identities exact in f stay exact to roundoff
            ga[i] = semigroup_apply(lambda y: f(t - si, y) - f(t, y), si, x, q, f.growth_beta, f.kinks)
            gb[i] = semigroup_apply(lambda y: f(t, y) - f_tx, si, x, q, f.growth_beta, f.kinks)
        except (DomainError, NumericError) as exc:
            raise NumericError(f"inner quadrature failed at outer node s={si:.6g}: {exc}") from exc
    c = a / gamma(1.0 - a)
    return OperatorTerms(
        a=c * float(np.dot(w, ga / s)),
        b=c * float(np.dot(w, gb / s)),
        tail_term=tail(idx, t) * f_tx,
        f_tx=f_tx,
    )


def nonlocal_apply(f: SpaceTimeFn, idx: StableIndex, t: float, x: float,
                   q: QuadSpec = QuadSpec()) -> float:
    """phi(d/dt - G) f(t, x)."""
    return nonlocal_terms(f, idx, t, x, q).value


def pde_residual(m: Model, t: float, x: float, q: QuadSpec = QuadSpec()) -> float:
    """(phi(d/dt - G) q - nu_bar(t) (x-K)+) / (nu_bar(t) max(x, 1))."""
    nb = tail(m.idx, t)
    lhs = nonlocal_apply(price_fn(m, q), m.idx, t, x, q)
    return (lhs - nb * max(x - m.K, 0.0)) / (nb * max(x, 1.0))


def special_residual(idx: StableIndex, b: float, t: float, x: float,
                     q: QuadSpec = QuadSpec()) -> float:
    """Residual of phi(d/dt - G) q_beta = nu_bar(t) e^(b |log x|), normalized by the right side."""
    rhs = tail(idx, t) * math.exp(b * abs(math.log(x)))
    lhs = nonlocal_apply(q_beta_fn(idx, b, q), idx, t, x, q)
    return (lhs - rhs) / rhs


def split_a_bound(m: Model, t: float, x: float) -> float:
    """Upper bound on |A| for f = q."""
    a = m.alpha
    c = 2.0 * a * math.gamma(a + 0.5) * math.sqrt(m.K) / (
        math.gamma(a) * math.gamma(1.5 - a) * math.sqrt(math.pi)
    )
    return c * t ** (0.5 - a) * math.exp(0.5 * abs(math.log(x)) + 3.0 * t / 8.0)


@dataclass(frozen=True)
class LaplaceResult:
    lhs: float
    rhs: float
    gap: float


def laplace_check(m: Model, lam: float, x: float, q: QuadSpec = QuadSpec(),
                  n_time: int = 24) -> LaplaceResult:
    """Laplace transform in t of phi(d/dt - G) q against lam^(alpha-1) (x-K)+.

    [0, 1] uses Gauss-Jacobi with weight t^(-alpha); [1, inf) uses
    Gauss-Laguerre with t = 1 + u/lam, dropping nodes past the point where
    e^(-lam t) (x + |q|) falls below 1e-12 of the right side.
    """
    if not lam > 0.375:
        raise DomainError(f"lambda must exceed 3/8, got {lam}")
    a = m.alpha
    f = price_fn(m, q)
    rhs = lam ** (a - 1.0) * max(x - m.K, 0.0)
    scale = max(rhs, lam ** (a - 1.0))
    t_max = 1.0 + math.log((2.0 * x + 1.0) / (1e-12 * scale)) / lam
    u, wu = jacobi01(n_time, -a, 0.0)
    head = sum(
        wi * ti**a * math.exp(-lam * ti) * nonlocal_apply(f, m.idx, ti, x, q)
        for ti, wi in zip(u, wu)
    )
    z, wz = laguerre_rule(n_time)
    tail_part = 0.0
    for zi, wi in zip(z, wz):
        ti = 1.0 + zi / lam
        if ti > t_max:
            break
        tail_part += wi * math.exp(-lam) / lam * nonlocal_apply(f, m.idx, ti, x, q)
    lhs = head + tail_part
    return LaplaceResult(lhs, rhs, abs(lhs - rhs) / scale)


@dataclass(frozen=True)
class PMPVerdict:
    extremum: str
    status: str
    t_star: float
    x_star: float
    f_star: float
    value: float

    @property
    def conclusive(self) -> bool:
        return self.status != "inconclusive"

    @property
    def holds(self) -> bool:
        return self.status == "as-required"


def pmp_check(f: SpaceTimeFn, idx: StableIndex, T: float, t_grid, x_grid,
              q: QuadSpec = QuadSpec(), extremum: str = "max", tol: float = 1e-12) -> PMPVerdict:
    """Sign at the grid extremum required by the positive maximum principle.

    At a maximizer (t*, x*) over (0, T] x grid with f(t*, x*) > f(0, x) for
    every x, the quantity -phi(d/dt - G) f(t*, x*) + nu_bar(t*) f(0, x*)
    must be negative; at a minimizer below f(0, .) it must be positive.
    """
    if extremum not in ("max", "min"):
        raise DomainError(f"extremum must be 'max' or 'min', got {extremum}")
    t_grid = np.asarray([t for t in t_grid if 0.0 < t <= T], dtype=float)
    x_grid = np.asarray(x_grid, dtype=float)
    if t_grid.size == 0:
        raise DomainError("time grid has no points in (0, T]")
    vals = np.array([np.asarray(f(t, x_grid), dtype=float) for t in t_grid])
    init = np.asarray(f.payoff_at_zero(x_grid), dtype=float)
    sgn = 1.0 if extremum == "max" else -1.0
    i, j = np.unravel_index(np.argmax(sgn * vals), vals.shape)
    t_star, x_star, f_star = float(t_grid[i]), float(x_grid[j]), float(vals[i, j])
    if not np.all(sgn * f_star > sgn * init + tol):
        return PMPVerdict(extremum, "inconclusive", t_star, x_star, f_star, math.nan)
    f0 = float(np.asarray(f.payoff_at_zero(np.array([x_star])))[0])
    value = -nonlocal_apply(f, idx, t_star, x_star, q) + tail(idx, t_star) * f0
    ok = value < 0.0 if extremum == "max" else value > 0.0
    return PMPVerdict(extremum, "as-required" if ok else "violated", t_star, x_star, f_star, value)
