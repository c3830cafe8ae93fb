"""Independent numerical oracles: finite differences, 1-D scans, limit gaps.

These share no code with the analytic gradients they check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, DomainError

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FDSpec:
    h: float = 1e-6
    scheme: str = "central"

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"relative step must be positive, got {self.h!r}")
        if self.scheme != "central":
            raise ValueError(f"only the central scheme is supported, got {self.scheme!r}")


def fd_gradient(f, q, spec=FDSpec()):
    """Central-difference gradient of ``f`` at ``q`` with per-component step ``h * q_j``."""
    q = np.array(q, dtype=float, ndmin=1)
    steps = spec.h * np.abs(q)
    if np.any(q - steps <= 0):
        j = int(np.flatnonzero(q - steps <= 0)[0])
        raise DomainError(f"perturbing q[{j}] = {q[j]!r} leaves the positive orthant")
    g = np.empty_like(q)
    for j in range(q.size):
        hj = steps[j]
        up = q.copy()
        dn = q.copy()
        up[j] += hj
        dn[j] -= hj
        g[j] = (f(up) - f(dn)) / (up[j] - dn[j])
    return g


def relative_error(approx, exact):
    """Max-norm error of ``approx`` scaled by the max-norm of ``exact``."""
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    scale = np.max(np.abs(exact))
    diff = np.max(np.abs(approx - exact))
    if scale == 0:
        return float(diff)
    return float(diff / scale)


def _golden(f, lo, hi, rtol):
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > rtol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def scan_minimize(fK, bracket=(1e-6, 1e6), grid=401, rtol=1e-10):
    """Minimizer of a unimodal positive-argument function.

    A log-spaced grid locates the minimum, then golden-section search in
    ``log K`` refines it between the neighbouring grid points.
    """
    lo, hi = map(float, bracket)
    if not (0 < lo < hi):
        raise BracketError(f"bracket must satisfy 0 < lo < hi, got {bracket!r}")
    ks = np.geomspace(lo, hi, grid)
    vals = np.array([fK(k) for k in ks])
    i = int(np.nanargmin(vals))
    if i == 0 or i == grid - 1:
        raise BracketError(f"minimum at bracket edge K={ks[i]:.6g}; no interior minimum")
    g = lambda t: fK(math.exp(t))
    t = _golden(g, math.log(ks[i - 1]), math.log(ks[i + 1]), rtol)
    return math.exp(t)


def limit_gap(x, eps):
    """``|Log_(1+eps, 1-eps)(x) - ln x|`` evaluated from the closed form with sinh."""
    lnx = math.log(x)
    return abs(math.sinh(eps * lnx) / eps - lnx)
