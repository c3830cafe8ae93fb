"""
Deformed logarithms
===================

``log_d(x) = (x**(a-1) - x**(b-1)) / (a - b)`` for a two-parameter family.
Most named generalized logs are special cases.
"""

import numpy as np

from divgrad import FamilyParams, LogParams, dlog_d, log_d, make_params

x = np.geomspace(0.1, 10.0, 7)

# a few members side by side with ln
logs = {
    "ln": LogParams.natural_log(),
    "tsallis t=2": make_params(FamilyParams("tsallis", t=2.0)),
    "kaniadakis K=0.3": make_params(FamilyParams("kaniadakis", K=0.3)),
    "abe z=1.5": make_params(FamilyParams("abe", z=1.5)),
}
print("x      " + "  ".join(f"{v:8.3f}" for v in x))
for name, lp in logs.items():
    print(f"{name:18s}" + "  ".join(f"{v:8.3f}" for v in log_d(x, lp)))

# every member maps 1 to 0 with unit slope
for name, lp in logs.items():
    print(name, log_d(1.0, lp), dlog_d(1.0, lp))

# (a, b) = (2, 1) is just x - 1
print(log_d(x, LogParams(2.0, 1.0)) - (x - 1))

# not additive: log_d(4) != 2 log_d(2)
t2 = LogParams(2.0, 1.0)
print("log_d(4) =", log_d(4.0, t2), " 2 log_d(2) =", 2 * log_d(2.0, t2))

# a, b -> 1 approaches ln with an O(eps^2) gap
for eps in (1e-1, 1e-2, 1e-3):
    lp = LogParams(1 + eps, 1 - eps)
    print(f"eps={eps:g}  max |log_d - ln| = {np.max(np.abs(log_d(x, lp) - np.log(x))):.3e}")
