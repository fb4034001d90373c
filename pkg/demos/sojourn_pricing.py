"""Pricing a position that has already been stuck for w time units.

The conditional kernel for the remaining rest is a Pareto tail in the total
rest length. Both readings of the renewal formula are priced and compared
against a direct conditional simulation; only one agrees.
Run: python3 demos/sojourn_pricing.py
"""

from fracbs import Model, Rng, SojournState, frac_price, mc_sojourn_price, sojourn_price

m = Model.of(0.75)
state = SojournState(t=0.5, x=1.1, w=0.2, v=0.0)
batch = mc_sojourn_price(state, m, 400_000, Rng(5))
for interp in ("A", "B"):
    value = sojourn_price(state, m, interp=interp)
    print(f"reading {interp}: {value:.5f}  ({batch.gap_se(value):6.1f} SE from MC)")
print(f"MC {batch.estimate:.5f} +- {batch.se:.5f}, stay probability {batch.extra['stay_probability']:.4f}")

print("\nshrinking the age recovers the zero-age price")
for w in (1e-1, 1e-2, 1e-3):
    s = SojournState(t=0.5, x=1.1, w=w, v=0.5 - 2 * w)
    print(f"  w={w:.0e}: {sojourn_price(s, m):.5f}")
print(f"  zero age: {float(frac_price(m, 0.5, 1.1)):.5f}")
