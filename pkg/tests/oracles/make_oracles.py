"""Regenerate values.json from high-precision references.

The values are computed with mpmath at 30 digits (exact rationals for the
Kummer series) without touching the package, then frozen; the tests only
read the JSON.  Run from the repository root:

    python3 tests/oracles/make_oracles.py
"""

from fractions import Fraction
import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30
OUT = Path(__file__).with_name("values.json")


def norm_cdf_points():
    return [[z, float(mp.ncdf(z))] for z in (-37.5, -20.0, -8.0, -1.3, -0.7, 0.0, 0.7, 2.5, 8.0)]


def ln_gamma_points():
    return [[x, float(mp.loggamma(x))] for x in (0.05, 0.25, 0.5, 0.75, 1.25, 2.5, 5.0, 17.3, 50.0)]


def kummer_exact(a, b, z, terms=400):
    a, b, z = Fraction(a), Fraction(b), Fraction(z)
    term, total = Fraction(1), Fraction(1)
    for n in range(terms):
        term *= (a + n) * z / ((b + n) * (n + 1))
        total += term
    return float(total)


def hyp1f1_points():
    pts = [[0.75, 1.0, 0.5, kummer_exact("0.75", 1, "0.5")]]
    for a, b, z in ((0.6, 1.0, 3.0), (1.5, 2.5, -4.0), (0.25, 0.5, 12.0), (2.0, 1.0, -30.0), (0.75, 1.0, 40.0)):
        pts.append([a, b, z, float(mp.hyp1f1(a, b, z))])
    return pts


def bs(t, x, k):
    t, x, k = mp.mpf(t), mp.mpf(x), mp.mpf(k)
    if t == 0:
        return max(x - k, 0)
    d1 = mp.log(x / k) / mp.sqrt(t) + mp.sqrt(t) / 2
    return x * mp.ncdf(d1) - k * mp.ncdf(d1 - mp.sqrt(t))


def beta_mean(fn, alpha, t):
    """E[fn(t B)], B ~ Beta(alpha, 1-alpha), with both endpoint singularities mapped away."""
    a = mp.mpf(alpha)
    half = mp.mpf(1) / 2
    # u = s^(1/a) on [0, 1/2] and 1 - u = s^(1/(1-a)) on [1/2, 1] absorb the weights
    left = mp.quad(lambda s: fn(t * s ** (1 / a)) * (1 - s ** (1 / a)) ** (-a) / a, [0, half**a])
    right = mp.quad(lambda s: fn(t * (1 - s ** (1 / (1 - a)))) * (1 - s ** (1 / (1 - a))) ** (a - 1) / (1 - a),
                    [0, half ** (1 - a)])
    return (left + right) / mp.beta(a, 1 - a)


def frac_price_points():
    pts = []
    for alpha, t, x in ((0.55, 1.0, 0.8), (0.75, 1.0, 1.0), (0.95, 1.0, 1.25), (0.75, 0.25, 1.2),
                        (0.6, 4.0, 0.5), (0.9, 2.0, 2.0)):
        pts.append([alpha, t, x, float(beta_mean(lambda s: bs(s, x, 1), alpha, t))])
    return pts


def bs_points():
    return [[t, x, float(bs(t, x, 1))] for t, x in ((1e-4, 1.0), (0.1, 0.5), (1.0, 1.0), (2.0, 3.0), (10.0, 0.1))]


def u_beta_quad(b, t, x):
    """P_t f_b(x) by integrating against the Gaussian density, split where the argument crosses 1."""
    b, t, x = mp.mpf(b), mp.mpf(t), mp.mpf(x)
    rt = mp.sqrt(t)
    z0 = (t / 2 - mp.log(x)) / rt
    f = lambda z: mp.exp(b * abs(mp.log(x) + rt * z - t / 2)) * mp.npdf(z)
    # the bulk of the Gaussian sits near 0, which can be far from the kink at z0
    pts = sorted({z0, mp.mpf(0)})
    return mp.quad(f, [-mp.inf, *pts, mp.inf])


def u_beta_points():
    return [[b, t, x, float(u_beta_quad(b, t, x))]
            for b, t, x in ((0.5, 1.0, 0.5), (1.5, 1.0, 2.0), (1.0, 0.3, 1.0), (2.0, 2.0, 3.0))]


def q_beta_points():
    mp.mp.dps = 15
    pts = [[alpha, b, t, x, float(beta_mean(lambda s: u_beta_quad(b, s, x) if s > 0 else
                                            mp.exp(b * abs(mp.log(x))), alpha, t))]
           for alpha, b, t, x in ((0.75, 1.5, 1.0, 3.0), (0.6, 0.5, 1.0, 0.5))]
    mp.mp.dps = 30
    return pts


def main():
    data = {
        "norm_cdf": norm_cdf_points(),
        "ln_gamma": ln_gamma_points(),
        "hyp1f1": hyp1f1_points(),
        "bs_price": bs_points(),
        "frac_price": frac_price_points(),
        "u_beta": u_beta_points(),
        "q_beta": q_beta_points(),
    }
    OUT.write_text(json.dumps(data, indent=1) + "\n")


if __name__ == "__main__":
    main()
