"""The price solves a Caputo-type equation: D_t q = (x^2/2) q_xx.

Prints the residual of that equation on a grid, the two parts of the
nonlocal operator, and the Laplace identity in t.
Run: python3 demos/equation_check.py
"""

from fracbs import Model, pde_residual
from fracbs.nonlocal_op import laplace_check, nonlocal_terms, price_fn

m = Model.of(0.75)
for t in (0.25, 1.0, 4.0):
    row = [pde_residual(m, t, x) for x in (0.5, 0.8, 1.25, 2.0)]
    print(f"t={t:4.2f} residuals " + " ".join(f"{r:+.2e}" for r in row))

terms = nonlocal_terms(price_fn(m), m.idx, 1.0, 1.5)
print(f"\nsplit at t=1, x=1.5: near {terms.a:+.6f} far {terms.b:+.6f} "
      f"tail {terms.tail_term:+.6f} -> {terms.value:+.6f}")

for lam in (0.5, 1.0, 2.0):
    res = laplace_check(m, lam, 1.5)
    print(f"Laplace lam={lam}: {res.lhs:.6f} vs {res.rhs:.6f}")
