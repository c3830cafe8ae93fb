"""
Gradients and U - V splits
==========================

Every divergence comes with ``-grad = U - V`` where ``U, V`` are positive.
That split is what the multiplicative algorithms feed on.
"""

import numpy as np

from divgrad import DivergenceParams, FDSpec, LogParams, fd_gradient, ld_gradient, relative_error

rng = np.random.default_rng(0)
p, q = rng.uniform(0.1, 10, 8), rng.uniform(0.1, 10, 8)

beta = DivergenceParams(beta=1.5)

# plain beta divergence, then its deformed-log version
for lp in (None, LogParams(1.5, 0.5)):
    dec = ld_gradient("beta", "base", p, q, beta, lp)
    fd = fd_gradient(lambda x: ld_gradient("beta", "base", p, x, beta, lp).value, q, FDSpec())
    print(f"log={lp}  D={dec.value:.6f}  fd err={relative_error(dec.grad, fd):.1e}  case={dec.case_tag}")
    print("  U:", np.round(dec.U, 4))
    print("  V:", np.round(dec.V, 4))

# alpha-beta family: the sign case is picked from (alpha, beta)
for a, b in [(1.5, 1.5), (0.3, 0.4), (-0.5, 2.0), (-0.5, 0.7)]:
    dec = ld_gradient("alphabeta", "base", p, q, DivergenceParams(alpha=a, beta=b))
    print(f"alpha={a:5} beta={b:4}  case {dec.case_tag:6s} min U={dec.U.min():.3g} min V={dec.V.min():.3g}")

# natural dual KL has no strictly positive split; a deformed log fixes that
nat = ld_gradient("dual_kl", "base", p, q)
dfm = ld_gradient("dual_kl", "base", p, q, lp=LogParams(1.5, 0.5))
print("dual KL natural strict:", nat.strict, " zeros in U, V:", int(np.sum(nat.U == 0) + np.sum(nat.V == 0)))
print("dual KL deformed strict:", dfm.strict, " min(U, V) =", min(dfm.U.min(), dfm.V.min()))
