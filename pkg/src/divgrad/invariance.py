"""Invariance factors and scale-invariant divergences.

A factor ``K(p, q)`` is homogeneous of degree -1 in ``q``, so ``D(p || K q)``
does not change when ``q`` is rescaled. Two kinds are provided: the nominal
factor ``K0`` (the minimizer of ``K -> D(p || K q)``, available in closed form
for the alpha, beta, alpha-beta and dual-KL families) and the fallback
``K* = sum(p) / sum(q)``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._fields import as_pair, total
from .divergences import (
    DivergenceParams,
    _alpha_of,
    _alphabeta_check,
    _beta_of,
    _exclude,
    _unit_interval,
    alpha_terms,
    alphabeta_terms,
    beta_terms,
    dual_kl_terms,
    f_terms,
    g_terms,
    mean_gap_terms,
)
from .errors import ParamError
from .verify import FDSpec, fd_gradient

NOMINAL_FAMILIES = ("alpha", "beta", "alphabeta", "dual_kl")
PRODUCT_FAMILIES = ("alpha", "beta", "alphabeta")
STAR_FAMILIES = ("GH", "AG", "AH", "F", "G", "dual_kl_star", "dual_kl_nominal")


@dataclass(frozen=True)
class InvarianceFactor:
    kind: str
    value: float
    family: str

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class ProductSplit:
    """``T * (A - X * Y)`` with ``A`` independent of ``q``."""

    T: float
    A: float
    X: float
    Y: float
    dX: np.ndarray = field(repr=False)
    dY: np.ndarray = field(repr=False)
    case_tag: str
    # A - X Y from the base divergence at K0 q, summed term by term
    gap: Optional[float] = None

    @property
    def value(self):
        return self.T * (self.A - self.X * self.Y if self.gap is None else self.gap)

    @property
    def dXY(self):
        return self.X * self.dY + self.Y * self.dX


@dataclass(frozen=True)
class NormalizedPair:
    p: np.ndarray
    q: np.ndarray
    sp: float
    sq: float


def star_factor(p, q):
    p, q = as_pair(p, q)
    return InvarianceFactor("star", total(p) / total(q), "star")


def nominal_factor(family, p, q, dp=None):
    """Closed-form minimizer ``K0`` of ``K -> D(p || K q)``."""
    p, q = as_pair(p, q)
    if family == "alpha":
        a = _alpha_of(dp)
        _exclude("alpha", a, 0.0, 1.0)
        k = (total(p**a * q ** (1.0 - a)) / total(q)) ** (1.0 / a)
    elif family == "beta":
        b = _beta_of(dp)
        _exclude("beta", b, 0.0, 1.0)
        k = total(p * q ** (b - 1.0)) / total(q**b)
    elif family == "alphabeta":
        a, b = _alpha_of(dp), _beta_of(dp)
        _alphabeta_check(a, b)
        s = a + b - 1.0
        k = (total(p**a * q ** (b - 1.0)) / total(q**s)) ** (1.0 / a)
    elif family == "dual_kl":
        # proportionality constant fixed to 1
        k = float(np.exp(total(q * np.log(p / q)) / total(q)))
    else:
        raise ParamError(f"no nominal factor for family {family!r}; expected {NOMINAL_FAMILIES}")
    return InvarianceFactor("nominal", k, family)


def invariant_split(family, p, q, dp):
    """Product form of the divergence evaluated at its nominal factor."""
    p, q = as_pair(p, q)
    if family == "alpha":
        a = _alpha_of(dp)
        _exclude("alpha", a, 0.0, 1.0)
        S = total(p**a * q ** (1.0 - a))
        Q = total(q)
        T = 1.0 / (1.0 - a)
        X = S ** (1.0 / a)
        Y = Q ** (1.0 - 1.0 / a)
        dX = (1.0 - a) / a * S ** (1.0 / a - 1.0) * p**a * q ** (-a)
        dY = np.full(p.size, (a - 1.0) / a * Q ** (-1.0 / a))
        tag = "alpha>0" if a > 0 else "alpha<0"
        k0 = (S / Q) ** (1.0 / a)
        gap = total(alpha_terms(p, k0 * q, a)) / T
        return ProductSplit(T, total(p), X, Y, dX, dY, tag, gap)
    if family == "beta":
        b = _beta_of(dp)
        _exclude("beta", b, 0.0, 1.0)
        C = total(p * q ** (b - 1.0))
        Qb = total(q**b)
        T = 1.0 / (b * (b - 1.0))
        X = C**b
        Y = Qb ** (1.0 - b)
        dX = b * (b - 1.0) * C ** (b - 1.0) * p * q ** (b - 2.0)
        dY = b * (1.0 - b) * Qb ** (-b) * q ** (b - 1.0)
        gap = total(beta_terms(p, C / Qb * q, b)) / T
        return ProductSplit(T, total(p**b), X, Y, dX, dY, "beta", gap)
    if family == "alphabeta":
        a, b = _alpha_of(dp), _beta_of(dp)
        _alphabeta_check(a, b)
        s = a + b - 1.0
        C = total(p**a * q ** (b - 1.0))
        Q1 = total(q**s)
        T = 1.0 / ((b - 1.0) * s)
        X = C ** (s / a)
        Y = Q1 ** ((1.0 - b) / a)
        dX = s * (b - 1.0) / a * C ** ((b - 1.0) / a) * p**a * q ** (b - 2.0)
        dY = s * (1.0 - b) / a * Q1 ** (-s / a) * q ** (s - 1.0)
        tag = "alpha>0" if a > 0 else "alpha<0"
        k0 = (C / Q1) ** (1.0 / a)
        gap = total(alphabeta_terms(p, k0 * q, a, b)) / T
        return ProductSplit(T, total(p**s), X, Y, dX, dY, tag, gap)
    raise ParamError(f"no product form for family {family!r}; expected {PRODUCT_FAMILIES}")


def normalized_fields(p, q):
    p, q = as_pair(p, q)
    sp, sq = total(p), total(q)
    return NormalizedPair(p / sp, q / sq, sp, sq)


def invariant_value(family, p, q, alpha=None):
    """Scale-invariant divergence built with ``K*`` (or ``K0`` for ``dual_kl_nominal``).

    The product families (``alpha``, ``beta``, ``alphabeta``) are also accepted,
    with ``alpha`` a :class:`DivergenceParams`; they dispatch to
    :func:`invariant_split`.
    """
    if family in PRODUCT_FAMILIES:
        dp = alpha if isinstance(alpha, DivergenceParams) else DivergenceParams(alpha=alpha)
        return invariant_split(family, p, q, dp).value
    p, q = as_pair(p, q)
    if family == "dual_kl_nominal":
        k0 = nominal_factor("dual_kl", p, q).value
        return total(dual_kl_terms(p, k0 * q))
    nf = normalized_fields(p, q)
    pb, qb = nf.p, nf.q
    if family == "dual_kl_star":
        return nf.sp * total(dual_kl_terms(pb, qb))
    if alpha is None:
        raise ParamError(f"family {family!r} requires alpha")
    a = float(alpha)
    _unit_interval(a, upper_open=family in ("F", "G"))
    if family in ("GH", "AG", "AH"):
        # sum(MA) = 1 for normalized fields, so 1 - sum(M) is a sum of gaps
        return nf.sp * total(mean_gap_terms(family, pb, qb, a))
    if family == "F":
        return nf.sp * total(f_terms(pb, qb, a))
    if family == "G":
        return nf.sp * total(g_terms(pb, qb, a))
    raise ParamError(f"unknown invariant family {family!r}; expected {STAR_FAMILIES + PRODUCT_FAMILIES}")


def factor_ode_residual(K, p, q, h=1e-6):
    """``K + sum_j q_j dK/dq_j`` by central differences; zero for any valid factor."""
    p, q = as_pair(p, q)

    def k_of(qq):
        return float(K(p, qq))

    g = fd_gradient(k_of, q, FDSpec(h=h))
    return k_of(q) + total(q * g)

