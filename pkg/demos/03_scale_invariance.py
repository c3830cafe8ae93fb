"""
Scale-invariant divergences
===========================

Rescaling the model ``q`` by the factor ``K`` that best matches ``p``
removes any dependence on the overall intensity of ``q``.
"""

import numpy as np

from divgrad import DivergenceParams, beta_divergence, ld_gradient, nominal_factor, scan_minimize, star_factor

rng = np.random.default_rng(1)
p, q = rng.uniform(0.1, 10, 8), rng.uniform(0.1, 10, 8)
dp = DivergenceParams(beta=1.5)

# closed-form K0 against a brute-force scan
k0 = nominal_factor("beta", p, q, dp).value
k_scan = scan_minimize(lambda k: beta_divergence(p, k * q, 1.5))
print(f"K0 = {k0:.10f}   scan = {k_scan:.10f}   K* = sum p / sum q = {star_factor(p, q).value:.10f}")

# the invariant form ignores the scale of q, the base form does not
for lam in (0.1, 1.0, 3.0, 10.0):
    base = ld_gradient("beta", "base", p, lam * q, dp).value
    inv = ld_gradient("beta", "invariant", p, lam * q, dp).value
    print(f"lambda={lam:5}  base={base:12.6f}  invariant={inv:.12f}")

# its gradient is orthogonal to q
dec = ld_gradient("beta", "invariant", p, q, dp)
print("sum q * grad =", np.sum(q * dec.grad))

# families without a closed-form K0 use K*
for fam in ("GH", "AG", "AH", "F", "G"):
    d = ld_gradient(fam, "star", p, q, DivergenceParams(alpha=0.35))
    print(f"{fam:3s} star value {d.value:.6f}  sum q*grad {np.sum(q * d.grad):+.1e}")
