"""Special functions: normal CDF, log-Gamma, Beta and Kummer's 1F1.

The normal CDF and log-Gamma delegate to ``scipy.special`` (Cephes), which
meets the accuracy targets used here; 1F1 is a plain Kummer series because
only the small-argument regime is ever needed.
"""

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError, NumericError

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _as_finite(z, name):
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return arr


def _scalar_or_array(out, like):
    return float(out) if np.ndim(like) == 0 else out


def norm_cdf(z):
    """Standard normal CDF, Phi(z).

    Accepts scalars or arrays. Raises DomainError for non-finite input.
    """
    arr = _as_finite(z, "z")
    return _scalar_or_array(_sp.ndtr(arr), z)


def norm_pdf(z):
    """Standard normal density."""
    arr = np.asarray(z, dtype=float)
    return _scalar_or_array(np.exp(-0.5 * arr * arr) / SQRT_2PI, z)


def ln_gamma(x):
    """log Gamma(x) for x > 0."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"ln_gamma needs finite x > 0, got {x!r}")
    return _scalar_or_array(_sp.gammaln(arr), x)


def gamma(x):
    """Gamma(x) for x > 0, via exp(ln_gamma)."""
    return _scalar_or_array(np.exp(ln_gamma(x)), x)


def ln_beta(a, b):
    """log B(a, b) for a, b > 0."""
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(np.add(a, b))


def beta_fn(a, b):
    """Euler Beta function B(a, b)."""
    return _scalar_or_array(np.exp(ln_beta(a, b)), np.add(a, b))


def hyp1f1(a, b, z, max_terms=10_000):
    """Kummer's confluent hypergeometric function 1F1(a; b; z) by direct series.

    Args:
        a: upper parameter.
        b: lower parameter, not a non-positive integer.
        z: argument with |z| <= 50.
        max_terms: series cap before giving up.

    Returns:
        The series value as a float.
    """
    a, b, z = float(a), float(b), float(z)
    if not all(map(math.isfinite, (a, b, z))):
        raise DomainError("hyp1f1 arguments must be finite")
    if b <= 0 and b == math.floor(b):
        raise DomainError(f"b must not be a non-positive integer, got {b}")
    if abs(z) > 50:
        raise DomainError(f"|z| <= 50 required for the series regime, got {z}")
    if z == 0.0:
        return 1.0
    if z < 0.0:
        # Kummer's transformation: the new series changes sign at most a - b times
        return math.exp(z) * _kummer_series(b - a, b, -z, max_terms)
    return _kummer_series(a, b, z, max_terms)


def _kummer_series(a, b, z, max_terms):
    term = 1.0
    terms = [term]
    for n in range(max_terms):
        term *= (a + n) * z / ((b + n) * (n + 1))
        terms.append(term)
        if term == 0.0:
            return math.fsum(terms)
        partial = math.fsum(terms)
        if n > abs(z) and abs(term) < 1e-16 * abs(partial):
            return partial
    raise NumericError(
        f"1F1({a}; {b}; {z}) did not converge in {max_terms} terms, last term {term:.3e}"
    )
