"""How the subordinated call compares with plain Black-Scholes.

Trapping the clock makes the option behave as if it had a random, shorter
maturity t*B with B ~ Beta(alpha, 1 - alpha). Small alpha means long rests and
a flatter price in t. Run: python3 demos/memory_effect.py
"""

import numpy as np

from fracbs import Model, bs_price, frac_price, mc_price, Rng

spots = np.array([0.6, 0.8, 1.0, 1.25, 1.6])
print("t = 1, K = 1")
print("spot   " + "  ".join(f"{x:7.3f}" for x in spots))
print("BS     " + "  ".join(f"{v:7.4f}" for v in bs_price(1.0, spots, 1.0)))
for a in (0.55, 0.75, 0.95):
    m = Model.of(a)
    print(f"a={a:.2f} " + "  ".join(f"{v:7.4f}" for v in frac_price(m, 1.0, spots)))

# the quadrature price against direct simulation of the inverse subordinator
m = Model.of(0.75)
batch = mc_price(m, 1.0, 1.1, 400_000, Rng(3))
print(f"\nx = 1.1: quadrature {float(frac_price(m, 1.0, 1.1)):.5f}, "
      f"MC {batch.estimate:.5f} +- {batch.se:.5f}")

# the effective maturity t*B is shorter, so the price sits below BS at every t
ts = np.array([0.01, 0.1, 0.5, 1.0, 4.0, 16.0])
print("\nat the money, a = 0.75")
for t in ts:
    print(f"  t={t:6.2f}  BS {float(bs_price(t, 1.0, 1.0)):.4f}  frac {float(frac_price(m, t, 1.0)):.4f}")
