import math

import numpy as np
import pytest

from divgrad import (
    DivergenceParams,
    FDSpec,
    LogParams,
    ParamError,
    alpha_split,
    alphabeta_split,
    beta_split,
    dual_kl_natural_decomposition,
    fd_gradient,
    invariant_split,
    invariant_value,
    ld_divergence,
    ld_gradient,
    ld_value,
    log_d,
    mean_split,
    natural_ld2_gradient,
    plain_log,
    relative_error,
)
from divgrad.logdiv import four_case_split

from conftest import CASES, DEFORMED, LOGS, case_id, random_pair

VARIANTS = ("base", "invariant")


def _fd(family, variant, p, q, dp, lp):
    return fd_gradient(lambda x: ld_gradient(family, variant, p, x, dp, lp).value, q, FDSpec())


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("case", CASES, ids=case_id)
@pytest.mark.parametrize("log", list(LOGS))
def test_gradient_and_decomposition(rng, variant, case, log):
    family, dp = case
    lp = LOGS[log]
    for _ in range(3):
        p, q = random_pair(rng)
        dec = ld_gradient(family, variant, p, q, dp, lp)
        assert relative_error(dec.grad, _fd(family, variant, p, q, dp, lp)) < 1e-5
        assert np.all(np.abs(dec.U - dec.V + dec.grad) <= 1e-10 * (dec.U + dec.V))
        if not lp.natural:
            assert dec.strict
        if dec.strict:
            assert np.all(dec.U > 0) and np.all(dec.V > 0)
        else:
            assert np.all(dec.U >= 0) and np.all(dec.V >= 0)
        if variant == "invariant":
            w = q * dec.grad
            assert abs(w.sum()) <= 1e-8 * np.abs(w).sum()
            for lam in (0.1, 3.0, 10.0):
                other = ld_gradient(family, variant, p, lam * q, dp, lp).value
                assert abs(other - dec.value) <= 1e-9 * (1 + abs(dec.value))


@pytest.mark.parametrize("case", CASES, ids=case_id)
def test_base_gradient_vanishes_at_p_equals_q(rng, case):
    family, dp = case
    p, _ = random_pair(rng)
    for lp in LOGS.values():
        dec = ld_gradient(family, "base", p, p.copy(), dp, lp)
        assert np.max(np.abs(dec.grad)) <= 1e-9 * max(1.0, np.max(dec.U))
        assert dec.value == pytest.approx(0.0, abs=1e-12)


def _split(family, p, q, dp, variant):
    if variant == "invariant":
        return invariant_split(family, p, q, dp)
    if family in ("GH", "AG", "AH"):
        return mean_split(family, p, q, dp.alpha)
    return {"alpha": alpha_split, "beta": beta_split, "alphabeta": alphabeta_split}[family](p, q, dp)


SPLIT_CASES = [c for c in CASES if c[0] not in ("F", "G", "dual_kl")]


@pytest.mark.parametrize("case", SPLIT_CASES, ids=case_id)
def test_identity_log_collapse(rng, case):
    family, dp = case
    ident = LogParams.identity()
    variants = ("base", "invariant") if family in ("alpha", "beta", "alphabeta") else ("base",)
    for variant in variants:
        for _ in range(10):
            p, q = random_pair(rng)
            sp = _split(family, p, q, dp, variant)
            assert abs(ld_value(sp, ident) - sp.value) <= 1e-12 * abs(sp.value) + 1e-13 * abs(sp.A)
            dec = ld_gradient(family, variant, p, q, dp, ident)
            fd = fd_gradient(lambda x: _split(family, p, x, dp, variant).value, q, FDSpec())
            assert relative_error(dec.grad, fd) < 1e-5


def test_alpha_case2_identity_weights(rng):
    p, q = random_pair(rng)
    a = 1.7
    dec = ld_gradient("alpha", "base", p, q, DivergenceParams(alpha=a), LogParams.identity())
    assert dec.case_tag == "alpha>1"
    np.testing.assert_allclose(dec.U, p**a * q ** (-a) / a, rtol=1e-13)
    np.testing.assert_allclose(dec.V, np.full(p.size, 1.0 / a), rtol=1e-13)


@pytest.mark.parametrize("case", SPLIT_CASES, ids=case_id)
def test_value_limit_to_natural(rng, case):
    family, dp = case
    eps = 1e-5
    lpe = LogParams(1 + eps, 1 - eps)
    p, q = random_pair(rng)
    sp = _split(family, p, q, dp, "base")
    ref = math.log(sp.A) - math.log(sp.B)
    assert abs(ld_value(sp, lpe) - ref) <= 1e-8 * (abs(math.log(sp.A)) + abs(math.log(sp.B)) + 1)


@pytest.mark.parametrize(
    "family,dp",
    [
        ("alpha", DivergenceParams(alpha=0.5)),
        ("alpha", DivergenceParams(alpha=-0.8)),
        ("beta", DivergenceParams(beta=1.5)),
        ("beta", DivergenceParams(beta=-0.5)),
        ("alphabeta", DivergenceParams(alpha=1.5, beta=1.5)),
        ("alphabeta", DivergenceParams(alpha=-0.5, beta=0.7)),
    ],
)
def test_natural_ld2(rng, family, dp):
    p, q = random_pair(rng)
    dec = natural_ld2_gradient(family + "_invariant", p, q, dp)
    fd = fd_gradient(lambda x: natural_ld2_gradient(family, p, x, dp).value, q, FDSpec())
    assert relative_error(dec.grad, fd) < 1e-5
    near = ld_gradient(family, "invariant", p, q, dp, LogParams(1 + 1e-5, 1 - 1e-5))
    assert relative_error(near.grad, dec.grad) < 1e-4
    zero = natural_ld2_gradient(family, p, 2.0 * p, dp)
    assert np.max(np.abs(zero.grad)) <= 1e-12 * np.max(zero.U)


def test_natural_ld2_alpha_closed_form(rng):
    p, q = random_pair(rng)
    a = 0.6
    dec = natural_ld2_gradient("alpha", p, q, DivergenceParams(alpha=a))
    S = np.sum(p**a * q ** (1 - a))
    expected = (1.0 / a) * (1.0 / q.sum() - p**a * q ** (-a) / S)
    np.testing.assert_allclose(dec.grad, expected, rtol=1e-12)


def test_product_block_is_not_distributed(rng):
    lp = LOGS["kaniadakis0.3"]
    for family, dp in [("alpha", DivergenceParams(alpha=0.5)), ("beta", DivergenceParams(beta=1.5))]:
        p, q = random_pair(rng)
        sp = invariant_split(family, p, q, dp)
        whole = log_d(sp.X * sp.Y, lp)
        assert abs(log_d(sp.X, lp) + log_d(sp.Y, lp) - whole) > 1e-6 * abs(whole)
        assert ld_value(sp, lp) == pytest.approx(sp.T * (log_d(sp.A, lp) - whole))


def test_dual_kl_natural_four_cases():
    d = dual_kl_natural_decomposition([2.0, 0.5, 3.0, 0.2], [0.5, 2.0, 1.5, 0.4])
    assert not d.strict
    ln = math.log
    np.testing.assert_allclose(d.U, [ln(4.0), 0.0, ln(3.0), -ln(0.4)], rtol=1e-15)
    np.testing.assert_allclose(d.V, [0.0, ln(4.0), ln(1.5), -ln(0.2)], rtol=1e-15)
    np.testing.assert_allclose(d.U - d.V, -d.grad, atol=1e-15)
    same = dual_kl_natural_decomposition([0.5, 2.0], [0.5, 2.0])
    np.testing.assert_array_equal(same.grad, 0.0)
    np.testing.assert_array_equal(same.U, same.V)


def test_four_case_split_table(rng):
    p, q = rng.uniform(0.1, 10, 200), rng.uniform(0.1, 10, 200)
    U, V = four_case_split(p, q)
    lp_, lq = np.log(p), np.log(q)
    for j in range(p.size):
        if p[j] >= 1 and q[j] >= 1:
            expected = (lp_[j], lq[j])
        elif p[j] < 1 and q[j] < 1:
            expected = (-lq[j], -lp_[j])
        elif p[j] >= 1:
            expected = (lp_[j] - lq[j], 0.0)
        else:
            expected = (0.0, lq[j] - lp_[j])
        assert (U[j], V[j]) == expected


@pytest.mark.parametrize("log", list(DEFORMED))
def test_deformed_dual_kl_is_strict_for_both_signs(rng, log):
    lp = DEFORMED[log]
    for variant in ("base", "star"):
        p, q = random_pair(rng, n=30, lo=0.01, hi=100.0)
        dec = ld_gradient("dual_kl", variant, p, q, None, lp)
        assert dec.strict and np.all(dec.U > 0) and np.all(dec.V > 0)


def test_dual_kl_nominal(rng):
    p, q = random_pair(rng)
    dec = ld_gradient("dual_kl", "nominal", p, q)
    assert not dec.strict
    assert relative_error(dec.grad, _fd("dual_kl", "nominal", p, q, None, None)) < 1e-5
    assert dec.value == pytest.approx(invariant_value("dual_kl_nominal", p, q))
    w = q * dec.grad
    assert abs(w.sum()) <= 1e-8 * np.abs(w).sum()
    with pytest.raises(ParamError):
        ld_gradient("dual_kl", "nominal", p, q, lp=LogParams(2.0, 1.0))


def test_star_values_match_invariant_value(rng):
    p, q = random_pair(rng)
    dp = DivergenceParams(alpha=0.35)
    for family in ("GH", "AG", "AH", "F", "G"):
        got = ld_divergence(family, "star", p, q, dp)
        assert got == pytest.approx(invariant_value(family, p, q, 0.35), rel=1e-12, abs=1e-13)
    assert ld_divergence("dual_kl", "star", p, q) == pytest.approx(invariant_value("dual_kl_star", p, q), rel=1e-12)


def test_plain_log():
    assert plain_log("alpha") == LogParams.identity()
    assert plain_log("gh") == LogParams.identity()
    assert plain_log("F").natural and plain_log("dual_kl").natural


def test_variant_and_family_errors(rng):
    p, q = random_pair(rng)
    dp = DivergenceParams(alpha=0.5)
    with pytest.raises(ParamError):
        ld_gradient("GH", "nominal", p, q, dp)
    with pytest.raises(ParamError):
        ld_gradient("alpha", "star", p, q, dp)
    with pytest.raises(ParamError):
        ld_gradient("gamma", "base", p, q, dp)
    with pytest.raises(ParamError):
        ld_gradient("alpha", "sideways", p, q, dp)
    with pytest.raises(ParamError):
        ld_gradient("alpha", "base", p, q, DivergenceParams())
    with pytest.raises(ParamError, match="exclusion"):
        ld_gradient("alphabeta", "base", p, q, DivergenceParams(alpha=0.5, beta=0.5))


def test_consistency_and_stationarity_helpers(rng):
    p, q = random_pair(rng)
    dec = ld_gradient("beta", "invariant", p, q, DivergenceParams(beta=1.5), LOGS["abe1.5"])
    assert dec.consistency_residual() <= 1e-12
    assert dec.stationarity_residual(q) <= 1e-10
    base = ld_gradient("beta", "base", p, q, DivergenceParams(beta=1.5), LOGS["abe1.5"])
    assert base.stationarity_residual(q) > 1e-3
