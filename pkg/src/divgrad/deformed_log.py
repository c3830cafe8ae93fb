"""Two-parameter deformed logarithm.

``log_d(x) = (x**(a-1) - x**(b-1)) / (a - b)`` with either
``0 < a <= 1 <= b`` or ``0 < b <= 1 <= a``. The natural logarithm is the
``a, b -> 1`` limit and is represented explicitly by ``LogParams.natural``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InadmissibleParams

_MIN_GAP = 1e-12

FAMILIES = ("shannon", "tsallis", "kaniadakis", "abe", "gamma", "kls")


@dataclass(frozen=True)
class LogParams:
    a: float = 1.0
    b: float = 1.0
    natural: bool = False

    def __post_init__(self):
        if self.natural:
            return
        a, b = float(self.a), float(self.b)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise InadmissibleParams(f"non-finite parameters a={a!r}, b={b!r}")
        if abs(a - b) < _MIN_GAP:
            raise InadmissibleParams(
                f"a={a!r} and b={b!r} coincide; use LogParams.natural_log() for the limit"
            )
        if not ((0 < a <= 1 <= b) or (0 < b <= 1 <= a)):
            raise InadmissibleParams(
                f"(a, b) = ({a!r}, {b!r}) violates 0 < a <= 1 <= b or 0 < b <= 1 <= a"
            )

    @classmethod
    def natural_log(cls):
        return cls(1.0, 1.0, natural=True)

    @classmethod
    def identity(cls):
        """``(2, 1)``: ``log_d(x) = x - 1``, which turns log forms back into plain differences."""
        return cls(2.0, 1.0)

    @property
    def weight_a(self):
        """(a - 1) / (a - b), non-negative on the admissible domain."""
        if self.natural:
            return float("nan")
        return (self.a - 1.0) / (self.a - self.b)

    @property
    def weight_b(self):
        """(b - 1) / (a - b), non-positive on the admissible domain."""
        if self.natural:
            return float("nan")
        return (self.b - 1.0) / (self.a - self.b)

    def __str__(self):
        if self.natural:
            return "natural"
        return f"(a={self.a:g}, b={self.b:g})"


@dataclass(frozen=True)
class FamilyParams:
    family: str
    t: Optional[float] = None
    K: Optional[float] = None
    z: Optional[float] = None
    gamma: Optional[float] = None
    r: Optional[float] = None


def _need(fp, name):
    value = getattr(fp, name)
    if value is None:
        raise InadmissibleParams(f"family {fp.family!r} requires parameter {name!r}")
    return float(value)


def make_params(fp):
    """Map a named entropy family onto its ``(a, b)`` pair.

    >>> make_params(FamilyParams("tsallis", t=2.0))
    LogParams(a=2.0, b=1.0, natural=False)
    """
    family = fp.family.lower()
    if family == "shannon":
        return LogParams.natural_log()
    if family == "tsallis":
        t = _need(fp, "t")
        return LogParams(t, 1.0)
    if family == "kaniadakis":
        k = _need(fp, "K")
        return LogParams(1.0 + k, 1.0 - k)
    if family == "abe":
        z = _need(fp, "z")
        if z == 0:
            raise InadmissibleParams("Abe parameter z must be non-zero")
        return LogParams(z, 1.0 / z)
    if family == "gamma":
        g = _need(fp, "gamma")
        return LogParams(2.0 * g + 1.0, 1.0 - g)
    if family == "kls":
        r = _need(fp, "r")
        k = _need(fp, "K")
        return LogParams(1.0 + r + k, 1.0 + r - k)
    raise InadmissibleParams(f"unknown family {fp.family!r}; expected one of {FAMILIES}")


def _positive(x, name):
    arr = np.asarray(x, dtype=float)
    bad = ~(arr > 0) | ~np.isfinite(arr)
    if np.any(bad):
        if arr.ndim == 0:
            raise DomainError(f"{name} = {float(arr)!r} must be strictly positive")
        j = int(np.flatnonzero(bad.ravel())[0])
        raise DomainError(f"{name}[{j}] = {float(arr.ravel()[j])!r} must be strictly positive")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def log_d(x, lp):
    """Deformed logarithm of ``x`` (scalar or array), exactly 0 at ``x = 1``."""
    x = _positive(x, "x")
    lnx = np.log(x)
    if lp.natural:
        return _out(lnx)
    # expm1 keeps the difference accurate when (a-1)ln x and (b-1)ln x are small
    val = (np.expm1((lp.a - 1.0) * lnx) - np.expm1((lp.b - 1.0) * lnx)) / (lp.a - lp.b)
    return _out(val)


def dlog_d(s, lp):
    """Derivative of ``log_d`` at ``s``; the positive weight shared by every gradient."""
    s = _positive(s, "s")
    if lp.natural:
        return _out(1.0 / s)
    lns = np.log(s)
    val = lp.weight_a * np.exp((lp.a - 2.0) * lns) - lp.weight_b * np.exp((lp.b - 2.0) * lns)
    return _out(val)


def log_d_ratio_term(r, lp):
    """``log_d(r) + r * dlog_d(r)``, i.e. ``d/dt [t log_d(t / c)]`` at ``t / c = r``.

    Returns the two positive pieces ``(plus, minus)`` whose difference is the term.
    Deformed logarithms only: ``ln r + 1`` has no fixed-sign split of this kind.
    """
    r = _positive(r, "r")
    if lp.natural:
        raise InadmissibleParams("log_d_ratio_term needs a deformed logarithm, not the natural one")
    lnr = np.log(r)
    ta = lp.a / (lp.a - lp.b) * np.exp((lp.a - 1.0) * lnr)
    tb = lp.b / (lp.a - lp.b) * np.exp((lp.b - 1.0) * lnr)
    if lp.a > lp.b:
        return _out(ta), _out(tb)
    return _out(-tb), _out(-ta)
