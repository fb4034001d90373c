"""Monte Carlo engines: fractional price, martingale and change-of-measure checks.

Work is split into fixed-size chunks, each with its own generator keyed by
(seed, stream, chunk index). Chunk statistics are merged in index order, so
an estimate depends only on the seed and N, never on the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import time

import numpy as np

from .errors import DomainError
from .levy import StableIndex
from .pricer import Model
from .undershoot import Rng, UndershootLaw, beta_variates, sample_path_levels

CHUNK = 1 << 16


@dataclass
class PathBatch:
    n: int
    estimate: float
    se: float
    seed: int
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1 or not self.se >= 0.0:
            raise DomainError(f"invalid batch n={self.n}, se={self.se}")

    def within(self, target: float, k: float = 4.0) -> bool:
        return abs(self.estimate - target) <= k * self.se

    def gap_se(self, target: float) -> float:
        d = abs(self.estimate - target)
        return 0.0 if d == 0.0 else (d / self.se if self.se > 0 else math.inf)


def _stats(samples):
    s = np.asarray(samples, dtype=float)
    mean = float(s.mean())
    return s.size, mean, float(((s - mean) ** 2).sum())


def _merge(parts):
    # Chan et al. pairwise update, applied in chunk order
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        if nb == 0:
            continue
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    return n, mean, m2


def run_chunks(sampler, N: int, rng: Rng, chunk: int = CHUNK, workers: int = 1):
    """Draw N samples via ``sampler(gen, n) -> array`` and return (n, mean, se).

    With antithetic pairing a sampler may return fewer values than n (one
    per pair); ``n`` in the result counts the returned values.
    """
    sizes = [chunk] * (N // chunk) + ([N % chunk] if N % chunk else [])

    def job(i):
        return _stats(sampler(rng.chunk(i), sizes[i]))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    n, mean, m2 = _merge(parts)
    var = m2 / (n - 1) if n > 1 else 0.0
    return n, mean, math.sqrt(var / n)


def mc_price(m: Model, t: float, x: float, N: int, rng: Rng, antithetic: bool = True,
             workers: int = 1) -> PathBatch:
    """Estimate E[(x exp(sqrt(H) Z - H/2) - K)+] with H = t Beta(alpha, 1-alpha)."""
    if N < 1000:
        raise DomainError(f"N must be at least 1000, got {N}")
    if not (t > 0 and x > 0):
        raise DomainError(f"need t > 0 and x > 0, got t={t}, x={x}")
    a, K = m.alpha, m.K
    start = time.perf_counter()

    def sampler(gen, n):
        if antithetic:
            half = n // 2
            h = t * beta_variates(gen, a, 1.0 - a, half)
            z = gen.standard_normal(half)
            rh = np.sqrt(h)
            up = np.maximum(x * np.exp(rh * z - 0.5 * h) - K, 0.0)
            dn = np.maximum(x * np.exp(-rh * z - 0.5 * h) - K, 0.0)
            return 0.5 * (up + dn)
        h = t * beta_variates(gen, a, 1.0 - a, n)
        z = gen.standard_normal(n)
        return np.maximum(x * np.exp(np.sqrt(h) * z - 0.5 * h) - K, 0.0)

    n, mean, se = run_chunks(sampler, N, rng, workers=workers)
    return PathBatch(N, mean, se, rng.seed, time.perf_counter() - start,
                     {"antithetic": antithetic, "independent_samples": n})


def martingale_check(m_exp: float, idx: StableIndex, t: float, b0: float, N: int, rng: Rng,
                     workers: int = 1) -> PathBatch:
    """Estimate E[exp(m (b0 + sqrt(H) Z) - m^2 H / 2)], which should equal exp(m b0)."""
    if N < 10_000:
        raise DomainError(f"N must be at least 1e4, got {N}")
    law = UndershootLaw(idx, t)
    a = idx.alpha
    start = time.perf_counter()

    def sampler(gen, n):
        h = law.t * beta_variates(gen, a, 1.0 - a, n)
        z = gen.standard_normal(n)
        return np.exp(m_exp * (b0 + np.sqrt(h) * z) - 0.5 * m_exp * m_exp * h)

    n, mean, se = run_chunks(sampler, N, rng, workers=workers)
    expected = math.exp(m_exp * b0)
    batch = PathBatch(n, mean, se, rng.seed, time.perf_counter() - start)
    batch.extra.update(expected=expected, passed=batch.within(expected), gap_se=batch.gap_se(expected))
    return batch


@dataclass(frozen=True)
class MeasureChange:
    price_a: float
    se_a: float
    price_b: float
    se_b: float

    @property
    def gap_se(self) -> float:
        joint = math.hypot(self.se_a, self.se_b)
        d = abs(self.price_a - self.price_b)
        return 0.0 if d == 0.0 else d / joint

    @property
    def passed(self) -> bool:
        return self.gap_se <= 4.0


def reweighted_price(m: Model, t: float, x: float, N: int, rng: Rng, n_steps: int = 1000,
                     chunk: int = 1 << 14) -> PathBatch:
    """E[(exp(X_e(t)) - K)+ exp(x_e/2 - X_e(T)/2 - H(T)/8)] on joint paths (H(t), H(T)).

    X_e = log x + B(H) is the undiscounted log price; the exponential weight
    is the density of the pricing measure on the horizon T = m.maturity.
    """
    T = m.maturity
    if not 0.0 < t <= T:
        raise DomainError(f"need 0 < t <= T, got t={t}, T={T}")
    x0 = math.log(x)
    levels = [t] if t == T else [t, T]
    start = time.perf_counter()

    def sampler(gen, n):
        under, _ = sample_path_levels(m.idx, levels, gen, n_steps, n)
        h_t = under[:, 0]
        h_T = under[:, -1]
        xe_t = x0 + np.sqrt(h_t) * gen.standard_normal(n)
        xe_T = xe_t + np.sqrt(np.maximum(h_T - h_t, 0.0)) * gen.standard_normal(n)
        weight = np.exp(0.5 * x0 - 0.5 * xe_T - h_T / 8.0)
        return np.maximum(np.exp(xe_t) - m.K, 0.0) * weight

    n, mean, se = run_chunks(sampler, N, rng, chunk=chunk)
    return PathBatch(n, mean, se, rng.seed, time.perf_counter() - start)


def cameron_martin_check(m: Model, t: float, x: float, N: int, rng: Rng,
                         n_steps: int = 1000) -> MeasureChange:
    """Compare the reweighted estimator with the drift form ``mc_price``."""
    if N < 100_000:
        raise DomainError(f"N must be at least 1e5, got {N}")
    a = reweighted_price(m, t, x, N, rng.child(0), n_steps)
    b = mc_price(m, t, x, N, rng.child(1), antithetic=False)
    return MeasureChange(a.estimate, a.se, b.estimate, b.se)
