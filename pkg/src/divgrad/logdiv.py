"""Deformed-logarithm divergences, their gradients and U - V decompositions.

For a split ``D = A - B`` the deformed form is ``log_d(A) - log_d(B)``; for a
product split ``T (A - X Y)`` it is ``T [log_d(A) - log_d(X Y)]`` with the
product kept whole. Only the natural logarithm may be distributed over
``X Y``. Families that already contain a logarithm (F, G, dual KL) get the
deformed logarithm substituted in place of ``ln``.

Every gradient is returned with the opposite gradient written as ``U - V``,
``U, V > 0`` componentwise, which is what the multiplicative algorithms
consume. All ``Z`` weights go through :func:`dlog_d`.
"""

from dataclasses import dataclass, field

import numpy as np

from ._fields import as_pair, total
from .deformed_log import LogParams, dlog_d, log_d, log_d_ratio_term
from .divergences import (
    BaseSplit,
    DivergenceParams,
    _alpha_of,
    _unit_interval,
    alpha_split,
    alphabeta_split,
    beta_split,
    dual_kl_terms,
    mean_fields,
    mean_gap_terms,
    mean_split,
)
from .errors import ParamError
from .invariance import ProductSplit, invariant_split, nominal_factor, normalized_fields

BASE_FAMILIES = ("alpha", "beta", "alphabeta", "GH", "AG", "AH", "F", "G", "dual_kl")
_CANONICAL = {name.lower(): name for name in BASE_FAMILIES}


@dataclass(frozen=True)
class GradientDecomposition:
    value: float
    grad: np.ndarray
    U: np.ndarray
    V: np.ndarray
    strict: bool
    case_tag: str = ""

    def consistency_residual(self):
        """``max_j |U_j - V_j + grad_j| / (U_j + V_j)``."""
        scale = np.maximum(self.U + self.V, np.finfo(float).tiny)
        return float(np.max(np.abs(self.U - self.V + self.grad) / scale))

    def stationarity_residual(self, q):
        """``|sum q_j grad_j| / sum |q_j grad_j|``; 0 when the gradient vanishes."""
        w = np.asarray(q, dtype=float) * self.grad
        denom = total(np.abs(w))
        return 0.0 if denom == 0 else abs(total(w)) / denom


def log_gap(B, gap, lp):
    """``log_d(B + gap) - log_d(B)`` computed from ``ln(1 + gap / B)`` without cancellation."""
    L = np.log1p(gap / B)
    if lp.natural:
        return L
    lnb = np.log(B)
    ta = np.exp((lp.a - 1.0) * lnb) * np.expm1((lp.a - 1.0) * L)
    tb = np.exp((lp.b - 1.0) * lnb) * np.expm1((lp.b - 1.0) * L)
    return (ta - tb) / (lp.a - lp.b)


def ld_value(split, lp):
    if isinstance(split, ProductSplit):
        xy = split.X * split.Y
        if split.gap is not None:
            return split.T * log_gap(xy, split.gap, lp)
        if lp.natural:
            return split.T * (np.log(split.A) - np.log(split.X) - np.log(split.Y))
        return split.T * (log_d(split.A, lp) - log_d(xy, lp))
    if split.gap is not None:
        return log_gap(split.B, split.gap, lp)
    return log_d(split.A, lp) - log_d(split.B, lp)


def _chain(split, lp):
    za = dlog_d(split.A, lp)
    zb = dlog_d(split.B, lp)
    return za, zb, za * split.dA - zb * split.dB


# -- base forms -------------------------------------------------------------


def _base_alpha(p, q, dp, lp):
    sp = alpha_split(p, q, dp)
    a = _alpha_of(dp)
    za, zb, grad = _chain(sp, lp)
    r = p**a * q ** (-a)
    if sp.case_tag == "0<alpha<1":
        U, V = zb * r / a, np.full(p.size, za / a)
    elif sp.case_tag == "alpha>1":
        U, V = za * r / a, np.full(p.size, za / a)
    else:
        U, V = np.full(p.size, -zb / a), -za * r / a
    return GradientDecomposition(ld_value(sp, lp), grad, U, V, True, sp.case_tag)


def _base_beta(p, q, dp, lp):
    sp = beta_split(p, q, dp)
    b = float(dp.beta)
    za, zb, grad = _chain(sp, lp)
    up = p * q ** (b - 2.0)
    vq = q ** (b - 1.0)
    if sp.case_tag == "0<beta<1":
        U, V = za * up, za * vq
    elif sp.case_tag == "beta>1":
        U, V = zb * up, za * vq
    else:
        U, V = za * up, zb * vq
    return GradientDecomposition(ld_value(sp, lp), grad, U, V, True, sp.case_tag)


def _base_alphabeta(p, q, dp, lp):
    sp = alphabeta_split(p, q, dp)
    a, b = float(dp.alpha), float(dp.beta)
    za, zb, grad = _chain(sp, lp)
    c = p**a * q ** (b - 2.0) / a
    m = q ** (a + b - 2.0) / a
    U, V = {
        "*1": (zb * c, za * m),
        "*2": (za * c, za * m),
        "*4": (za * c, zb * m),
        "*1bis": (-zb * m, -za * c),
        # V follows from case *2 with the sign of alpha flipped
        "*3bis": (-za * m, -za * c),
        "*4bis": (-za * m, -zb * c),
    }[sp.case_tag]
    return GradientDecomposition(ld_value(sp, lp), grad, U, V, True, sp.case_tag)


def _base_mean(kind):
    def build(p, q, dp, lp):
        sp = mean_split(kind, p, q, _alpha_of(dp))
        za, zb, grad = _chain(sp, lp)
        return GradientDecomposition(ld_value(sp, lp), grad, zb * sp.dB, za * sp.dA, True, kind)

    return build


def _base_f(p, q, dp, lp):
    a = _alpha_of(dp)
    _unit_interval(a, upper_open=True)
    mf = mean_fields(p, q, a)
    z = mf.Z
    value = total(mf.T * _entropy_gap(-_log_tp(p, q, a), lp))
    u = (1.0 - a) * z**2 * dlog_d(z, lp)
    v = np.full(p.size, 1.0 - a)
    return GradientDecomposition(value, v - u, u, v, True, "F")


def four_case_split(p, q):
    """Non-negative ``U, V`` with ``U - V = ln p - ln q`` by the signs of ``ln p``, ``ln q``."""
    lp_, lq = np.log(p), np.log(q)
    U = np.empty_like(lp_)
    V = np.empty_like(lp_)
    hi_p, hi_q = p >= 1.0, q >= 1.0
    both_hi = hi_p & hi_q
    both_lo = ~hi_p & ~hi_q
    p_only = hi_p & ~hi_q
    q_only = ~hi_p & hi_q
    U[both_hi], V[both_hi] = lp_[both_hi], lq[both_hi]
    U[both_lo], V[both_lo] = -lq[both_lo], -lp_[both_lo]
    U[p_only], V[p_only] = lp_[p_only] - lq[p_only], 0.0
    U[q_only], V[q_only] = 0.0, lq[q_only] - lp_[q_only]
    return U, V


def dual_kl_natural_decomposition(p, q):
    """Gradient of ``KL(q || p)`` with the non-strict four-case split of its opposite."""
    p, q = as_pair(p, q)
    U, V = four_case_split(p, q)
    value = total(dual_kl_terms(p, q))
    return GradientDecomposition(value, np.log(q) - np.log(p), U, V, False, "dual_kl:natural")


def _entropy_gap(w, lp):
    """``z log_d(z) - z + 1`` at ``z = exp(w)``; non-negative, no cancellation at large scale."""
    if lp.natural:
        return w * np.exp(w) - np.expm1(w)
    a, b = lp.a, lp.b
    gap_a = np.expm1(a * w) - a * np.expm1(w)
    gap_b = np.expm1(b * w) - b * np.expm1(w)
    return (gap_a - gap_b) / (a - b)


def _log_tp(p, q, a):
    """``ln(T / p)`` through ``ln(p / q)``."""
    return np.log1p((1.0 - a) * np.expm1(-np.log(p / q)))


def _ratio_family(p, ref, w, lp):
    """Positive parts of ``w (1 - psi(ref / p))``."""
    plus, minus = log_d_ratio_term(ref / p, lp)
    return w * (1.0 + minus), w * plus


def _base_g(p, q, dp, lp):
    a = _alpha_of(dp)
    _unit_interval(a, upper_open=True)
    t = mean_fields(p, q, a).T
    value = total(p * _entropy_gap(_log_tp(p, q, a), lp))
    if lp.natural:
        U, V = four_case_split(p, t)
        w = 1.0 - a
        return GradientDecomposition(value, w * (np.log(t) - np.log(p)), w * U, w * V, False, "G:natural")
    U, V = _ratio_family(p, t, 1.0 - a, lp)
    tag = "G:a>b" if lp.a > lp.b else "G:a<b"
    return GradientDecomposition(value, V - U, U, V, True, tag)


def _base_dual_kl(p, q, dp, lp):
    if lp.natural:
        return dual_kl_natural_decomposition(p, q)
    U, V = _ratio_family(p, q, 1.0, lp)
    value = total(p * _entropy_gap(np.log(q / p), lp))
    tag = "dual_kl:a>b" if lp.a > lp.b else "dual_kl:a<b"
    return GradientDecomposition(value, V - U, U, V, True, tag)


# -- invariant forms with the nominal factor (product splits) ----------------


def natural_ld2_gradient(family, p, q, dp):
    """Gradient of ``T (ln A - ln X - ln Y)``, the natural-log product form."""
    family = family.replace("_invariant", "")
    p, q = as_pair(p, q)
    sp = invariant_split(family, p, q, dp)
    grad = -sp.T * (sp.dX / sp.X + sp.dY / sp.Y)
    value = ld_value(sp, LogParams.natural_log())
    if family == "alpha":
        a = float(dp.alpha)
        S = total(p**a * q ** (1.0 - a))
        u = p**a * q ** (-a) / (a * S)
        v = np.full(p.size, 1.0 / (a * total(q)))
    elif family == "beta":
        b = float(dp.beta)
        u = p * q ** (b - 2.0) / total(p * q ** (b - 1.0))
        v = q ** (b - 1.0) / total(q**b)
        a = 1.0
    else:
        a, b = float(dp.alpha), float(dp.beta)
        s = a + b - 1.0
        u = p**a * q ** (b - 2.0) / (a * total(p**a * q ** (b - 1.0)))
        v = q ** (s - 1.0) / (a * total(q**s))
    U, V = (u, v) if a > 0 else (-v, -u)
    return GradientDecomposition(value, grad, U, V, True, sp.case_tag + ":natural")


def _invariant_product(family):
    def build(p, q, dp, lp):
        if lp.natural:
            return natural_ld2_gradient(family, p, q, dp)
        sp = invariant_split(family, p, q, dp)
        xy = sp.X * sp.Y
        z = dlog_d(xy, lp)
        grad = -sp.T * z * sp.dXY
        k0 = nominal_factor(family, p, q, dp).value
        if family == "alpha":
            a = float(dp.alpha)
            n_term = k0 ** (1.0 - a) * p**a * q ** (-a)
            m_term = np.full(p.size, k0)
        elif family == "beta":
            b = float(dp.beta)
            n_term = k0 ** (b - 1.0) * p * q ** (b - 2.0)
            m_term = k0**b * q ** (b - 1.0)
            a = 1.0
        else:
            a, b = float(dp.alpha), float(dp.beta)
            s = a + b - 1.0
            n_term = k0 ** (b - 1.0) * p**a * q ** (b - 2.0)
            m_term = k0**s * q ** (s - 1.0)
        if a > 0:
            U, V = z * n_term / a, z * m_term / a
        else:
            U, V = -z * m_term / a, -z * n_term / a
        return GradientDecomposition(ld_value(sp, lp), grad, U, V, True, sp.case_tag)

    return build


# -- invariant forms with K* (normalized variables) -------------------------


def _star(nf, g_plus, g_minus):
    """Gradient and U, V of ``sum(p) * h(q / sum(q))`` from the positive parts of dh/dqbar."""
    k = nf.sp / nf.sq
    s_plus = total(nf.q * g_plus)
    s_minus = total(nf.q * g_minus)
    grad = k * ((g_plus - g_minus) - (s_plus - s_minus))
    U = k * (s_plus + g_minus)
    V = k * (s_minus + g_plus)
    return grad, U, V


def _star_mean(kind):
    def build(p, q, dp, lp):
        a = _alpha_of(dp)
        nf = normalized_fields(p, q)
        mf = mean_fields(nf.p, nf.q, a)
        mg, mh = total(mf.MG), total(mf.MH)
        zero = np.zeros(p.size)
        # the sums of MA over normalized fields equal 1, so every h is a
        # log difference whose gap is a sum of per-component mean gaps
        gap = total(mean_gap_terms(kind, nf.p, nf.q, a))
        if kind == "GH":
            zg, zh = dlog_d(mg, lp), dlog_d(mh, lp)
            h = log_gap(mh, gap, lp)
            g_plus, g_minus = zg * mf.dMG, zh * mf.dMH
        elif kind == "AG":
            h = log_gap(mg, gap, lp)
            g_plus, g_minus = zero, dlog_d(mg, lp) * mf.dMG
        else:
            h = log_gap(mh, gap, lp)
            g_plus, g_minus = zero, dlog_d(mh, lp) * mf.dMH
        grad, U, V = _star(nf, g_plus, g_minus)
        return GradientDecomposition(nf.sp * h, grad, U, V, True, kind + ":star")

    return build


def _star_f(p, q, dp, lp):
    a = _alpha_of(dp)
    _unit_interval(a, upper_open=True)
    nf = normalized_fields(p, q)
    mf = mean_fields(nf.p, nf.q, a)
    z = mf.Z
    h = total(mf.T * _entropy_gap(-_log_tp(nf.p, nf.q, a), lp))
    g_minus = (1.0 - a) * z**2 * dlog_d(z, lp)
    grad, U, V = _star(nf, np.zeros(p.size), g_minus)
    return GradientDecomposition(nf.sp * h, grad, U, V, True, "F:star")


def _star_ratio(nf, ref, w, lp, log_r):
    """Shared by G and dual KL: ``h = sum ref log_d(ref / pbar)`` with ``d ref / d qbar = w``."""
    r = ref / nf.p
    h = total(nf.p * _entropy_gap(log_r, lp))
    if lp.natural:
        # ln r + 1 = (-ln pbar) - (-ln ref) + const; the constant drops out
        g_plus, g_minus = -w * np.log(nf.p), -w * np.log(ref)
    else:
        plus, minus = log_d_ratio_term(r, lp)
        g_plus, g_minus = w * plus, w * minus
    grad, U, V = _star(nf, g_plus, g_minus)
    return nf.sp * h, grad, U, V


def _sign_tag(name, lp):
    if lp.natural:
        return name + ":natural"
    return name + (":a>b" if lp.a > lp.b else ":a<b")


def _star_g(p, q, dp, lp):
    a = _alpha_of(dp)
    _unit_interval(a, upper_open=True)
    nf = normalized_fields(p, q)
    t = mean_fields(nf.p, nf.q, a).T
    value, grad, U, V = _star_ratio(nf, t, 1.0 - a, lp, _log_tp(nf.p, nf.q, a))
    return GradientDecomposition(value, grad, U, V, True, _sign_tag("G:star", lp))


def _star_dual_kl(p, q, dp, lp):
    nf = normalized_fields(p, q)
    value, grad, U, V = _star_ratio(nf, nf.q, 1.0, lp, np.log(nf.q / nf.p))
    return GradientDecomposition(value, grad, U, V, True, _sign_tag("dual_kl:star", lp))


def _nominal_dual_kl(p, q, dp, lp):
    if not lp.natural:
        raise ParamError("the nominal-factor dual KL form is defined for the natural logarithm only")
    k0 = nominal_factor("dual_kl", p, q).value
    mean_log = total(q * np.log(p / q)) / total(q)
    neg = k0 * (np.log(p / q) - mean_log)
    value = total(dual_kl_terms(p, k0 * q))
    return GradientDecomposition(
        value, -neg, np.maximum(neg, 0.0), np.maximum(-neg, 0.0), False, "dual_kl:nominal"
    )


_BASE = {
    "alpha": _base_alpha,
    "beta": _base_beta,
    "alphabeta": _base_alphabeta,
    "GH": _base_mean("GH"),
    "AG": _base_mean("AG"),
    "AH": _base_mean("AH"),
    "F": _base_f,
    "G": _base_g,
    "dual_kl": _base_dual_kl,
}

_INVARIANT = {
    "alpha": _invariant_product("alpha"),
    "beta": _invariant_product("beta"),
    "alphabeta": _invariant_product("alphabeta"),
    "GH": _star_mean("GH"),
    "AG": _star_mean("AG"),
    "AH": _star_mean("AH"),
    "F": _star_f,
    "G": _star_g,
    "dual_kl": _star_dual_kl,
}


def canonical_family(family):
    try:
        return _CANONICAL[family.lower()]
    except KeyError:
        raise ParamError(f"unknown family {family!r}; expected one of {BASE_FAMILIES}") from None


def _builder(family, variant):
    family = canonical_family(family)
    variant = variant.lower()
    if variant == "base":
        return _BASE[family]
    if variant == "invariant":
        return _INVARIANT[family]
    if variant == "nominal":
        if family in ("alpha", "beta", "alphabeta"):
            return _INVARIANT[family]
        if family == "dual_kl":
            return _nominal_dual_kl
        raise ParamError(f"family {family!r} has no closed-form nominal factor; use variant 'star'")
    if variant == "star":
        if family in ("alpha", "beta", "alphabeta"):
            raise ParamError(f"family {family!r} is made invariant with its nominal factor; use 'nominal'")
        return _INVARIANT[family]
    raise ParamError(f"unknown variant {variant!r}; expected base, invariant, nominal or star")


def ld_gradient(family, variant, p, q, dp=None, lp=None):
    """Value, gradient in ``q`` and U - V decomposition of a (deformed) log divergence.

    ``lp=None`` selects :func:`plain_log` for the family, i.e. the divergence
    itself rather than a logarithmic transform of it.
    """
    build = _builder(family, variant)
    p, q = as_pair(p, q)
    if dp is None:
        dp = DivergenceParams()
    if lp is None:
        lp = plain_log(family)
    return build(p, q, dp, lp)


def ld_divergence(family, variant, p, q, dp=None, lp=None):
    return ld_gradient(family, variant, p, q, dp, lp).value


def plain_log(family):
    """Log parameters under which the transformed value equals the divergence itself.

    Split families use ``(2, 1)`` since ``log_d(x) = x - 1`` turns
    ``log_d(A) - log_d(B)`` back into ``A - B``; F, G and dual KL keep ``ln``.
    """
    if canonical_family(family) in ("F", "G", "dual_kl"):
        return LogParams.natural_log()
    return LogParams.identity()
