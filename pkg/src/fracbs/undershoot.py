"""Law of the undershoot H(t) of the alpha-stable subordinator.

H(t) is distributed as t * Beta(alpha, 1 - alpha). Two samplers are provided:
a direct Beta sampler used in production, and a path sampler that simulates
the subordinator on an operational-time grid and reads off the last value
below the level. The second exists as an independent check on the first.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import betainc

from .errors import DomainError, NumericError
from .levy import StableIndex
from .special import ln_gamma
from .stable import bridge_split, stable_variates

_TINY = np.finfo(float).tiny
_ONE_MINUS = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class UndershootLaw:
    idx: StableIndex
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t > 0.0):
            raise DomainError(f"horizon must be positive, got {self.t}")


@dataclass
class Rng:
    """Seeded random source. The same (seed, stream) replays the same draws.

    ``generator`` is a single-owner sequential stream. ``chunk(i)`` returns a
    fresh generator keyed by (seed, stream, i), independent of anything drawn
    before, which is what the chunked Monte Carlo engines use so results do
    not depend on how work is split across workers.
    """

    seed: int
    stream: int = 0
    _gen: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if int(self.stream) < 0:
            raise DomainError(f"stream must be nonnegative, got {self.stream}")

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
            self._gen = np.random.Generator(np.random.PCG64(ss))
        return self._gen

    def chunk(self, i: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream), int(i)))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, k: int) -> "Rng":
        """Independent stream for a named sub-task (e.g. the second estimator)."""
        return Rng(self.seed, self.stream * 1009 + 1 + int(k))


def undershoot_density(law: UndershootLaw, s):
    """Density of H(t): s^(alpha-1) (t-s)^(-alpha) / (Gamma(alpha) Gamma(1-alpha)) on (0, t)."""
    a, t = law.idx.alpha, law.t
    ss = np.asarray(s, dtype=float)
    inside = (ss > 0.0) & (ss < t)
    sc = np.where(inside, ss, 0.5 * t)
    log_norm = ln_gamma(a) + ln_gamma(1.0 - a)
    dens = np.exp((a - 1.0) * np.log(sc) - a * np.log(t - sc) - log_norm)
    out = np.where(inside, dens, 0.0)
    return float(out) if np.ndim(s) == 0 else out


def undershoot_cdf(law: UndershootLaw, s):
    """Distribution function of H(t), a regularized incomplete Beta."""
    a = law.idx.alpha
    u = np.clip(np.asarray(s, dtype=float) / law.t, 0.0, 1.0)
    out = betainc(a, 1.0 - a, u)
    return float(out) if np.ndim(s) == 0 else out


def _log_gamma_variates(gen: np.random.Generator, shape: float, size):
    # shape < 1: G(a) = G(a+1) U^(1/a), kept in logs so tiny values do not underflow
    if shape < 1.0:
        g = gen.standard_gamma(shape + 1.0, size)
        u = gen.random(size)
        return np.log(g) + np.log1p(-u) / shape
    return np.log(gen.standard_gamma(shape, size))


def beta_variates(gen: np.random.Generator, a: float, b: float, size=None):
    """Beta(a, b) draws as G1 / (G1 + G2), strictly inside (0, 1)."""
    lg1 = _log_gamma_variates(gen, a, size)
    lg2 = _log_gamma_variates(gen, b, size)
    out = 1.0 / (1.0 + np.exp(lg2 - lg1))
    return np.clip(out, _TINY, _ONE_MINUS)


def sample_direct(law: UndershootLaw, rng: Rng | np.random.Generator, size=None):
    """Draw H(t) = t B with B ~ Beta(alpha, 1 - alpha)."""
    gen = rng.generator if isinstance(rng, Rng) else rng
    a = law.idx.alpha
    out = law.t * beta_variates(gen, a, 1.0 - a, size)
    return float(out) if size is None else out


def crossing_horizon(alpha: float, level: float, p_fail: float = 1e-6, safety: float = 1.5):
    """Operational time after which S exceeds ``level`` with probability >= 1 - p_fail.

    Uses the lower-tail asymptotic
    P(S(1) <= s) ~ exp(-(1-alpha) alpha^(alpha/(1-alpha)) s^(-alpha/(1-alpha)))
    and self-similarity S(u) = u^(1/alpha) S(1).
    """
    c = (1.0 - alpha) * alpha ** (alpha / (1.0 - alpha))
    s_low = (c / math.log(1.0 / p_fail)) ** ((1.0 - alpha) / alpha)
    return safety * (level / s_low) ** alpha


def _coarse(gen, alpha, levels, n_steps, n_paths, horizon, block):
    """Grid pass: per level, the values at both ends of the crossing step."""
    du = horizon / n_steps
    scale = du ** (1.0 / alpha)
    n_lev = len(levels)
    left = np.full((n_paths, n_lev), np.nan)
    right = np.full((n_paths, n_lev), np.nan)
    active = np.arange(n_paths)
    current = np.zeros(n_paths)
    steps_done = 0
    while active.size and steps_done < n_steps:
        m = min(block, n_steps - steps_done)
        inc = scale * stable_variates(gen, alpha, (active.size, m))
        path = current[active, None] + np.cumsum(inc, axis=1)
        prev = np.concatenate([current[active, None], path[:, :-1]], axis=1)
        for j, level in enumerate(levels):
            has = np.isnan(left[active, j]) & (path[:, -1] > level)
            if not np.any(has):
                continue
            rows = np.flatnonzero(has)
            k = np.argmax(path[rows] > level, axis=1)
            left[active[rows], j] = prev[rows, k]
            right[active[rows], j] = path[rows, k]
        current[active] = path[:, -1]
        steps_done += m
        # the top level is crossed last, so one check retires a path
        active = active[np.isnan(left[active, -1])]
    return left, right, du


def _refine(gen, alpha, levels, left, right, du, resolution):
    """Bisect each crossing step with exact bridge midpoints.

    Segments left over from a previous level are kept in left-to-right order
    so a higher level crossed inside the same grid step reuses the same
    path instead of sampling an inconsistent second bridge.
    """
    n = left.shape[0]
    under = np.empty_like(left)
    over = np.empty_like(right)
    pend_l = np.full((n, 1), np.nan)
    pend_r = np.full((n, 1), np.nan)
    pend_h = np.full((n, 1), np.nan)
    for j, level in enumerate(levels):
        cross = pend_r > level
        has = cross.any(axis=1)
        c = np.argmax(cross, axis=1)
        rows = np.arange(n)
        sl = np.where(has, pend_l[rows, c], left[:, j])
        sr = np.where(has, pend_r[rows, c], right[:, j])
        h = np.where(has, pend_h[rows, c], du)
        depth = max(0, math.ceil(math.log2(du / (resolution * level) ** alpha)))
        sib_l = np.full((n, depth), np.nan)
        sib_r = np.full((n, depth), np.nan)
        sib_h = np.full((n, depth), np.nan)
        for k in range(depth):
            h = 0.5 * h
            alive = h > 0
            a = np.zeros(n)
            if np.any(alive):
                a[alive] = bridge_split(gen, alpha, sr[alive] - sl[alive], h[alive])
            mid = sl + a
            go_left = mid >= level
            sib_l[go_left, k] = mid[go_left]
            sib_r[go_left, k] = sr[go_left]
            sib_h[go_left, k] = h[go_left]
            sr = np.where(go_left, mid, sr)
            sl = np.where(go_left, sl, mid)
        under[:, j] = sl
        over[:, j] = sr
        # pending segments right of this crossing, still in left-to-right order
        keep = np.arange(pend_l.shape[1])[None, :] > c[:, None]
        keep &= has[:, None]
        old_l = np.where(keep, pend_l, np.nan)
        old_r = np.where(keep, pend_r, np.nan)
        old_h = np.where(keep, pend_h, np.nan)
        pend_l = np.concatenate([sl[:, None], sib_l[:, ::-1], old_l], axis=1)
        pend_r = np.concatenate([sr[:, None], sib_r[:, ::-1], old_r], axis=1)
        pend_h = np.concatenate([h[:, None], sib_h[:, ::-1], old_h], axis=1)
    return under, over


def sample_path_levels(idx: StableIndex, levels, rng, n_steps: int = 1000, size: int = 1,
                       block: int = 64, max_doublings: int = 10, resolution: float = 1e-13):
    """Simulate S on a grid and record undershoot and overshoot at each level.

    The grid pass locates the step in which each level is crossed; that
    step is then bisected with exact stable-bridge midpoints until the
    small-jump scale falls below ``resolution`` times the level. Without
    the bisection the grid value before the crossing misses the mass that
    the undershoot law puts just below the level.

    Args:
        idx: stability index.
        levels: increasing positive levels t_1 < ... < t_m read off one path.
        rng: Rng or numpy Generator.
        n_steps: grid steps over the crossing horizon, at least 1000.
        size: number of independent paths.
        block: steps simulated per vectorized batch.
        max_doublings: horizon doublings allowed for paths that never cross.
        resolution: relative spatial resolution of the bisection; 0 disables it.

    Returns:
        (under, over), arrays of shape (size, m).
    """
    if n_steps < 1000:
        raise DomainError(f"n_steps must be at least 1000, got {n_steps}")
    levels = np.asarray(levels, dtype=float).ravel()
    if levels.size == 0 or np.any(levels <= 0) or np.any(np.diff(levels) <= 0):
        raise DomainError(f"levels must be positive and increasing, got {levels}")
    gen = rng.generator if isinstance(rng, Rng) else rng
    alpha = idx.alpha
    horizon = crossing_horizon(alpha, float(levels[-1]))
    left, right, du = _coarse(gen, alpha, levels, n_steps, size, horizon, block)
    steps = np.full(size, du)
    for _ in range(max_doublings):
        miss = np.flatnonzero(np.isnan(left[:, -1]))
        if miss.size == 0:
            break
        horizon *= 2.0
        l2, r2, du2 = _coarse(gen, alpha, levels, n_steps, miss.size, horizon, block)
        left[miss], right[miss], steps[miss] = l2, r2, du2
    if np.any(np.isnan(left[:, -1])):
        raise NumericError(
            f"subordinator failed to cross level {levels[-1]} after {max_doublings} doublings"
        )
    if resolution <= 0:
        return left, right
    under = np.empty_like(left)
    over = np.empty_like(right)
    for du_k in np.unique(steps):
        rows = np.flatnonzero(steps == du_k)
        under[rows], over[rows] = _refine(gen, alpha, levels, left[rows], right[rows], du_k, resolution)
    return under, over


def sample_path(law: UndershootLaw, rng, n_steps: int = 1000, size=None, overshoot: bool = False):
    """Undershoot H(t) = S(L(t)-) from a simulated subordinator path.

    Returns the last grid value strictly below the level; with
    ``overshoot=True`` also returns the first grid value above it.
    """
    n = 1 if size is None else int(size)
    under, over = sample_path_levels(law.idx, [law.t], rng, n_steps, n)
    u, o = under[:, 0], over[:, 0]
    if size is None:
        u, o = float(u[0]), float(o[0])
    return (u, o) if overshoot else u
