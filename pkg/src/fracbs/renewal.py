"""Pricing conditional on a positive sojourn age.

At calendar time t the position has age w > 0 and the subordinator offset is
v, so the accumulated variance is H(t) = t - v - w and the traded price is
x e^(-H(t)/2), with x the undiscounted level. The next renewal happens
after a duration tau >= w with a Pareto(alpha, w) law and a Gaussian move
of variance tau; from there the zero-age price q takes over.

The renewal formula's jump term evaluates q at the renewed state. Two
readings of that second argument are implemented:

* ``"A"``: the log-level form exp(log x + y + t - w + tau - v), read literally;
* ``"B"``: the traded price x e^(y - (t - w + tau - v)/2) after the renewal.

``arbitrate`` compares both against a conditional Monte Carlo oracle; B is
the one it confirms, so it is the default.
"""

from dataclasses import dataclass
import math
import time

import numpy as np

from .errors import DomainError
from .gbm import QuadSpec, semigroup_apply
from .levy import StableIndex
from .mc import PathBatch, run_chunks
from .pricer import Model, frac_price
from .quadrature import hermite_rule, laguerre_rule, legendre_rule
from .undershoot import Rng, beta_variates

INTERPRETATIONS = ("A", "B")
DEFAULT_INTERPRETATION = "B"


@dataclass(frozen=True)
class SojournState:
    t: float
    x: float
    w: float
    v: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t > 0.0):
            raise DomainError(f"t must be positive, got {self.t}")
        if not self.x > 0.0:
            raise DomainError(f"x must be positive, got {self.x}")
        if not self.w >= 0.0:
            raise DomainError(f"age w must be nonnegative, got {self.w}")
        if self.w > 0.0 and not self.v < self.t - self.w:
            raise DomainError(f"need v < t - w, got v={self.v}, t-w={self.t - self.w}")

    @property
    def variance(self) -> float:
        """Accumulated variance H(t) = t - v - w."""
        return self.t - self.v - self.w

    @property
    def traded(self) -> float:
        return self.x * math.exp(-0.5 * self.variance)


@dataclass(frozen=True)
class KernelDraw:
    tau: float
    h: float

    def __post_init__(self):
        if not self.tau > 0.0:
            raise DomainError(f"duration must be positive, got {self.tau}")


def kernel_tail_mass(idx: StableIndex, w: float, a: float) -> float:
    """Conditional mass of durations >= a given >= w: (a/w)^(-alpha)."""
    if not w > 0.0:
        raise DomainError(f"w must be positive, got {w}")
    if a < w:
        raise DomainError(f"need a >= w, got a={a}, w={w}")
    return (a / w) ** (-idx.alpha)


def kernel_mass_quadrature(idx: StableIndex, a: float, n: int = 32) -> float:
    """Unnormalized mass of the jump kernel on R x [a, inf) by quadrature.

    The height integral of the heat kernel is done by Gauss-Hermite and the
    duration integral by Gauss-Laguerre in log(s/a); the result should equal
    the Levy tail a^(-alpha) / Gamma(1 - alpha).
    """
    al = idx.alpha
    _, wz = hermite_rule(n)
    _, wy = laguerre_rule(n)
    # s = a e^(y/alpha) turns alpha s^(-alpha-1) ds into a^(-alpha) e^(-y) dy
    height = float(wz.sum())
    return float(wy.sum()) * height * a ** (-al) / math.gamma(1.0 - al)


def sample_kernel(idx: StableIndex, w: float, rng, size=None):
    """Draw (tau, h): tau = w U^(-1/alpha) and h ~ N(0, tau)."""
    if not w > 0.0:
        raise DomainError(f"w must be positive, got {w}")
    gen = rng.generator if isinstance(rng, Rng) else rng
    u = 1.0 - gen.random(size)
    tau = w * u ** (-1.0 / idx.alpha)
    h = np.sqrt(tau) * gen.standard_normal(size)
    if size is None:
        return KernelDraw(float(tau), float(h))
    return tau, h


def _renewed_spot(state: SojournState, tau, interp: str):
    """Spot fed to P_tau so that P_tau applied there realizes the renewed argument."""
    t, x, w, v = state.t, state.x, state.w, state.v
    if interp == "B":
        return x * math.exp(-0.5 * (t - w - v))
    # exp(log x + y + t-w+tau-v) = [x e^(t-w-v+3tau/2)] e^(y - tau/2)
    return x * math.exp(t - w - v + 1.5 * tau)


def sojourn_price(state: SojournState, m: Model, q: QuadSpec = QuadSpec(),
                  interp: str = DEFAULT_INTERPRETATION) -> float:
    """Price at a state with positive age by the renewal formula.

    The jump term is an integral over u = (tau/w)^(-alpha), uniform on
    (r, 1] with r the stay probability, mapped by u = r + (1-r) v^2 so the
    square-root behaviour as the remaining horizon closes is integrated
    smoothly; the Gaussian move is the semigroup P_tau.
    """
    if interp not in INTERPRETATIONS:
        raise DomainError(f"interp must be one of {INTERPRETATIONS}, got {interp}")
    T = m.maturity
    if not state.t < T:
        raise DomainError(f"need t < T, got t={state.t}, T={T}")
    if state.w == 0.0:
        return frac_price(m, T - state.t, state.x, q)
    a, w, t = m.alpha, state.w, state.t
    remaining = T - t
    r = ((w + remaining) / w) ** (-a)
    stay = max(state.traded - m.K, 0.0) * r
    vv, wv = legendre_rule(q.jacobi_nodes, 0.0, 1.0)
    jump = 0.0
    for vi, wi in zip(vv, wv):
        u = r + (1.0 - r) * vi * vi
        tau = w * u ** (-1.0 / a)
        t_left = max(remaining + w - tau, 0.0)
        spot = _renewed_spot(state, tau, interp)
        val = semigroup_apply(lambda y: frac_price(m, t_left, y, q), tau, spot, q, 1.0, (m.K,))
        jump += wi * 2.0 * (1.0 - r) * vi * val
    return stay + jump


def mc_sojourn_price(state: SojournState, m: Model, N: int, rng: Rng, workers: int = 1) -> PathBatch:
    """Conditional Monte Carlo of the aged-state price.

    Per path: draw (tau, h) from the kernel. If tau >= w + T - t there is no
    renewal before maturity and the payoff uses the frozen traded price.
    Otherwise the process restarts at age zero at calendar time t - w + tau
    with accumulated variance t - w + tau - v, then runs a fresh undershoot
    over the remaining horizon T - t + w - tau.
    """
    T = m.maturity
    if not 0 < state.t < T or state.w <= 0.0:
        raise DomainError("mc_sojourn_price needs 0 < t < T and w > 0")
    a, K = m.alpha, m.K
    t, x, w, v = state.t, state.x, state.w, state.v
    horizon = w + T - t
    frozen = max(state.traded - K, 0.0)
    start = time.perf_counter()

    def sampler(gen, n):
        u = 1.0 - gen.random(n)
        tau = w * u ** (-1.0 / a)
        h = np.sqrt(tau) * gen.standard_normal(n)
        left = np.maximum(horizon - tau, 0.0)
        h0 = left * beta_variates(gen, a, 1.0 - a, n)
        z = gen.standard_normal(n)
        log_price = math.log(x) + h - 0.5 * (t - w + tau - v) + np.sqrt(h0) * z - 0.5 * h0
        renewed = np.maximum(np.exp(log_price) - K, 0.0)
        return np.where(tau >= horizon, frozen, renewed)

    n, mean, se = run_chunks(sampler, N, rng, workers=workers)
    return PathBatch(n, mean, se, rng.seed, time.perf_counter() - start,
                     {"stay_probability": (horizon / w) ** (-a)})


@dataclass(frozen=True)
class ArbitrationRow:
    state: SojournState
    alpha: float
    maturity: float
    mc: float
    se: float
    price_a: float
    price_b: float

    def gap_se(self, interp: str) -> float:
        p = self.price_a if interp == "A" else self.price_b
        return abs(p - self.mc) / self.se

    def matches(self, interp: str, k: float = 4.0) -> bool:
        return self.gap_se(interp) <= k


@dataclass(frozen=True)
class Arbitration:
    rows: tuple
    winner: str | None

    @property
    def decisive(self) -> bool:
        return self.winner is not None


ARBITRATION_CASES = (
    (0.75, 1.0, 1.0, SojournState(t=0.5, x=1.1, w=0.2, v=0.0)),
    (0.6, 1.0, 2.0, SojournState(t=1.0, x=0.9, w=0.5, v=-0.3)),
    (0.9, 1.0, 1.5, SojournState(t=0.8, x=1.3, w=0.1, v=0.2)),
)


def arbitrate(cases=ARBITRATION_CASES, N: int = 1_000_000, seed: int = 2024,
              q: QuadSpec = QuadSpec()) -> Arbitration:
    """Decide between the two readings: the winner matches MC at every case, the loser at none."""
    rows = []
    for i, (alpha, K, T, state) in enumerate(cases):
        m = Model.of(alpha, K, T)
        batch = mc_sojourn_price(state, m, N, Rng(seed, i))
        rows.append(ArbitrationRow(state, alpha, T, batch.estimate, batch.se,
                                   sojourn_price(state, m, q, "A"), sojourn_price(state, m, q, "B")))
    winners = [
        k for k in INTERPRETATIONS
        if all(r.matches(k) for r in rows)
        and not any(r.matches(o) for r in rows for o in INTERPRETATIONS if o != k)
    ]
    return Arbitration(tuple(rows), winners[0] if len(winners) == 1 else None)
