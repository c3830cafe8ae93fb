"""Base divergences and their splits ``D = A - B`` into positive parts.

Every split carries the per-component derivatives ``dA[j] = dA/dq_j`` and
``dB[j] = dB/dq_j`` together with a ``case_tag`` naming the sign case that
produced it, so that gradient decompositions never re-derive signs.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._fields import as_pair, total
from .errors import InfeasibleCase, ParamError

EXCLUSION = 1e-6


@dataclass(frozen=True)
class DivergenceParams:
    alpha: Optional[float] = None
    beta: Optional[float] = None


@dataclass(frozen=True)
class BaseSplit:
    A: float
    B: float
    dA: np.ndarray = field(repr=False)
    dB: np.ndarray = field(repr=False)
    case_tag: str
    # A - B summed from non-negative per-component terms; avoids cancellation near p = q
    gap: Optional[float] = None

    @property
    def value(self):
        return self.A - self.B if self.gap is None else self.gap


@dataclass(frozen=True)
class MeanFields:
    MA: np.ndarray
    MG: np.ndarray
    MH: np.ndarray
    dMA: np.ndarray
    dMG: np.ndarray
    dMH: np.ndarray
    Z: np.ndarray
    T: np.ndarray


def _alpha_of(dp):
    a = dp.alpha if isinstance(dp, DivergenceParams) else dp
    if a is None:
        raise ParamError("alpha is required")
    return float(a)


def _beta_of(dp):
    if dp.beta is None:
        raise ParamError("beta is required")
    return float(dp.beta)


def _exclude(name, value, *centers):
    for c in centers:
        if abs(value - c) < EXCLUSION:
            raise ParamError(f"{name}={value!r} lies in the exclusion zone around {c}")


def _unit_interval(alpha, upper_open=False):
    if not (0.0 <= alpha <= 1.0) or (upper_open and alpha >= 1.0):
        bound = "[0, 1)" if upper_open else "[0, 1]"
        raise ParamError(f"alpha={alpha!r} must lie in {bound}")


# -- cancellation-free per-component terms ----------------------------------
#
# Each family is a sum of non-negative per-component terms that vanish at
# p_j = q_j. Writing them through u = ln(p/q) with expm1/log1p keeps the
# relative accuracy of the total even when the divergence is tiny compared
# with A and B.


def _log_ratio(p, q):
    return np.log(p / q)


def _pow_gap(u, c):
    """``t**c - 1 - c (t - 1)`` at ``t = exp(u)``."""
    return np.expm1(c * u) - c * np.expm1(u)


def _xlogx_gap(w):
    """``t ln t - t + 1`` at ``t = exp(w)``."""
    return w * np.exp(w) - np.expm1(w)


def alpha_terms(p, q, a):
    return q * _pow_gap(_log_ratio(p, q), a) / (a * (a - 1.0))


def beta_terms(p, q, b):
    return q**b * _pow_gap(_log_ratio(p, q), b) / (b * (b - 1.0))


def alphabeta_terms(p, q, a, b):
    s = a + b - 1.0
    u = _log_ratio(p, q)
    return q**s * (np.expm1(s * u) - s / a * np.expm1(a * u)) / ((b - 1.0) * s)


def mean_gap_terms(kind, p, q, a):
    """Per-component ``MG - MH``, ``MA - MG`` or ``MA - MH``."""
    u = _log_ratio(p, q)
    em = np.expm1(u)
    if kind == "AG":
        return -q * _pow_gap(u, a)
    h = np.log1p((1.0 - a) * em)
    if kind == "GH":
        mg = p**a * q ** (1.0 - a)
        return -mg * np.expm1((1.0 - a) * u - h)
    if kind == "AH":
        ma = a * p + (1.0 - a) * q
        return -ma * np.expm1(u - h - np.log1p(a * em))
    raise ParamError(f"unknown mean divergence {kind!r}; expected GH, AG or AH")


def f_terms(p, q, a):
    """``p ln(p/T) - p + T`` with ``T = a p + (1 - a) q``."""
    v = np.log1p((1.0 - a) * np.expm1(-_log_ratio(p, q)))
    return (a * p + (1.0 - a) * q) * _xlogx_gap(-v)


def g_terms(p, q, a):
    """``T ln(T/p) - T + p``."""
    v = np.log1p((1.0 - a) * np.expm1(-_log_ratio(p, q)))
    return p * _xlogx_gap(v)


def dual_kl_terms(p, q):
    return p * _xlogx_gap(-_log_ratio(p, q))


def alpha_divergence(p, q, alpha):
    """Direct evaluation of the alpha divergence, no split."""
    p, q = as_pair(p, q)
    a = float(alpha)
    _exclude("alpha", a, 0.0, 1.0)
    return total(alpha_terms(p, q, a))


def alpha_split(p, q, dp):
    p, q = as_pair(p, q)
    a = _alpha_of(dp)
    _exclude("alpha", a, 0.0, 1.0)
    n = p.size
    sp, sq = total(p), total(q)
    s = total(p**a * q ** (1.0 - a))
    r = p**a * q ** (-a)
    if 0.0 < a < 1.0:
        A = sp / (1.0 - a) + sq / a
        B = s / (a * (1.0 - a))
        dA = np.full(n, 1.0 / a)
        dB = r / a
        tag = "0<alpha<1"
    elif a > 1.0:
        A = sq / a + s / (a * (a - 1.0))
        B = sp / (a - 1.0)
        dA = (1.0 - r) / a
        dB = np.zeros(n)
        tag = "alpha>1"
    else:
        A = sp / (1.0 - a) + s / (a * (a - 1.0))
        B = -sq / a
        dA = -r / a
        dB = np.full(n, -1.0 / a)
        tag = "alpha<0"
    return BaseSplit(A, B, dA, dB, tag, total(alpha_terms(p, q, a)))


def beta_divergence(p, q, beta):
    p, q = as_pair(p, q)
    b = float(beta)
    _exclude("beta", b, 0.0, 1.0)
    return total(beta_terms(p, q, b))


def beta_split(p, q, dp):
    p, q = as_pair(p, q)
    b = _beta_of(dp)
    _exclude("beta", b, 0.0, 1.0)
    pb = total(p**b)
    cross = total(p * q ** (b - 1.0))
    qb = total(q**b)
    if 0.0 < b < 1.0:
        A = cross / (1.0 - b) + qb / b
        B = pb / (b * (1.0 - b))
        dA = -p * q ** (b - 2.0) + q ** (b - 1.0)
        dB = np.zeros(p.size)
        tag = "0<beta<1"
    elif b > 1.0:
        A = pb / (b * (b - 1.0)) + qb / b
        B = cross / (b - 1.0)
        dA = q ** (b - 1.0)
        dB = p * q ** (b - 2.0)
        tag = "beta>1"
    else:
        A = pb / (b * (b - 1.0)) - cross / (b - 1.0)
        B = -qb / b
        dA = -p * q ** (b - 2.0)
        dB = -(q ** (b - 1.0))
        tag = "beta<0"
    return BaseSplit(A, B, dA, dB, tag, total(beta_terms(p, q, b)))


def alphabeta_divergence(p, q, alpha, beta):
    p, q = as_pair(p, q)
    a, b = float(alpha), float(beta)
    _alphabeta_check(a, b)
    return total(alphabeta_terms(p, q, a, b))


def _alphabeta_check(a, b):
    _exclude("alpha", a, 0.0)
    _exclude("beta", b, 1.0)
    _exclude("alpha+beta", a + b, 1.0)


_AB_CASES = {
    (True, True, True): "*1",
    (True, False, True): "*2",
    (True, True, False): "*3",
    (True, False, False): "*4",
    (False, True, True): "*1bis",
    (False, False, True): "*2bis",
    (False, True, False): "*3bis",
    (False, False, False): "*4bis",
}


def case_from_signs(alpha_pos, beta_minus_one_pos, sum_minus_one_pos):
    """Case name for the signs of (alpha, beta - 1, alpha + beta - 1)."""
    tag = _AB_CASES[(bool(alpha_pos), bool(beta_minus_one_pos), bool(sum_minus_one_pos))]
    if tag in ("*3", "*2bis"):
        raise InfeasibleCase(f"case {tag} has contradictory signs and cannot occur")
    return tag


def alphabeta_case(alpha, beta):
    """Name of the sign case for (alpha, beta - 1, alpha + beta - 1)."""
    a, b = float(alpha), float(beta)
    _alphabeta_check(a, b)
    return case_from_signs(a > 0, b - 1.0 > 0, a + b - 1.0 > 0)


def alphabeta_split(p, q, dp):
    p, q = as_pair(p, q)
    a, b = _alpha_of(dp), _beta_of(dp)
    tag = alphabeta_case(a, b)
    s = a + b - 1.0
    P1 = total(p**s)
    Q1 = total(q**s)
    C = total(p**a * q ** (b - 1.0))
    dq = q ** (s - 1.0) / a
    dc = p**a * q ** (b - 2.0) / a
    zero = np.zeros(p.size)
    if tag in ("*1", "*4bis"):
        A = P1 / ((b - 1.0) * s) + Q1 / (a * s)
        B = C / (a * (b - 1.0))
        dA, dB = dq, dc
    elif tag in ("*2", "*3bis"):
        A = Q1 / (a * s) + C / (a * (1.0 - b))
        B = P1 / ((1.0 - b) * s)
        dA, dB = dq - dc, zero
    else:  # *4, *1bis
        A = P1 / ((b - 1.0) * s) - C / (a * (b - 1.0))
        B = Q1 / (a * (1.0 - a - b))
        dA, dB = -dc, -dq
    return BaseSplit(A, B, dA, dB, tag, total(alphabeta_terms(p, q, a, b)))


def mean_fields(p, q, alpha):
    """Per-component weighted arithmetic, geometric and harmonic means of (p, q)."""
    p, q = as_pair(p, q)
    a = float(alpha)
    _unit_interval(a)
    mix = a * p + (1.0 - a) * q
    hden = (1.0 - a) * p + a * q
    MA = mix
    MG = p**a * q ** (1.0 - a)
    MH = p * q / hden
    return MeanFields(
        MA=MA,
        MG=MG,
        MH=MH,
        dMA=np.full(p.size, 1.0 - a),
        dMG=(1.0 - a) * p**a * q ** (-a),
        dMH=(1.0 - a) * p**2 / hden**2,
        Z=p / mix,
        T=mix,
    )


def mean_split(kind, p, q, alpha):
    """Split of the divergence between two means (GH, AG or AH)."""
    kind = kind.upper()
    a = float(alpha)
    if kind == "AG":
        # AG = alpha (1 - alpha) D_alpha
        _unit_interval(a)
        base = alpha_split(p, q, DivergenceParams(alpha=a))
        c = a * (1.0 - a)
        gap = total(mean_gap_terms("AG", *as_pair(p, q), a))
        return BaseSplit(c * base.A, c * base.B, c * base.dA, c * base.dB, "AG", gap)
    mf = mean_fields(p, q, a)
    p, q = as_pair(p, q)
    if kind == "GH":
        return BaseSplit(total(mf.MG), total(mf.MH), mf.dMG, mf.dMH, "GH", total(mean_gap_terms("GH", p, q, a)))
    if kind == "AH":
        return BaseSplit(total(mf.MA), total(mf.MH), mf.dMA, mf.dMH, "AH", total(mean_gap_terms("AH", p, q, a)))
    raise ParamError(f"unknown mean divergence {kind!r}; expected GH, AG or AH")


def f_divergence(p, q, alpha):
    """``sum p ln Z + (1 - alpha)(q - p)`` with ``Z = p / (alpha p + (1 - alpha) q)``."""
    a = float(alpha)
    _unit_interval(a, upper_open=True)
    mf = mean_fields(p, q, a)
    p, q = as_pair(p, q)
    return total(f_terms(p, q, a)), mf


def g_divergence(p, q, alpha):
    """``sum T ln(T / p) + (1 - alpha)(p - q)`` with ``T = alpha p + (1 - alpha) q``."""
    a = float(alpha)
    _unit_interval(a, upper_open=True)
    mf = mean_fields(p, q, a)
    p, q = as_pair(p, q)
    return total(g_terms(p, q, a)), mf


def dual_kl(p, q):
    """Kullback-Leibler divergence of q from p, ``KL(q || p)``."""
    p, q = as_pair(p, q)
    return total(dual_kl_terms(p, q))


def kl(p, q):
    """``KL(p || q) = sum p ln(p/q) + q - p``, the alpha -> 0 member of the F family."""
    p, q = as_pair(p, q)
    return total(dual_kl_terms(q, p))


def taneja_rs(p, q, alpha, r, s):
    """Two-parameter generalization of the arithmetic-geometric mean divergence."""
    r, s = float(r), float(s)
    _exclude("r", r, 1.0)
    _exclude("s", s, 1.0)
    mf = mean_fields(p, q, alpha)
    e = (s - 1.0) / (r - 1.0)
    u = total(mf.MG ** (1.0 - r) * mf.MA**r)
    v = total(mf.MA)
    return (u**e - v**e) / (s - 1.0)
