from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf

from lmhs import periodflow as pf
from lmhs.errors import DomainError, IllConditioned, NormalizationFailed
from lmhs.exactlin import PeriodEntry
from lmhs.hpnum import PrecisionCtx
from lmhs.logpoly import LogPoly

CTX = pf.FIT_CTX


@pytest.mark.parametrize("t", ["0.01", "1e-5", "1e-12"])
def test_three_routes_for_level_one(t, oracles):
    with mpmath.workdps(30):
        ref = mpf(oracles[f"J({t})"])
        for fn in (pf.J_agm, pf.J_xform, pf.J_uform):
            v = fn(t)
            assert abs(v.value - ref) < mpf("1e-25"), fn.__name__
        assert abs(pf.pi_d(1, t).value - 2 * ref) < mpf("1e-24")


@given(st.floats(1e-10, 0.9))
@settings(max_examples=20)
def test_quadrature_routes_agree_with_agm(t):
    a, b = pf.J_agm(t), pf.J_uform(t)
    with CTX.work():
        assert abs(a.value - b.value) <= b.err + a.err + mpf("1e-40")


@pytest.mark.parametrize("t", ["0.1", "0.01", "0.001"])
@pytest.mark.parametrize("method", ["substituted", "direct"])
def test_level_two_against_nested_quadrature(t, method, oracles):
    ref = float(oracles[f"P2({t})"])
    v = pf.pi_d(2, t, method=method)
    assert float(v.value) == pytest.approx(ref, rel=1e-12)
    assert abs(float(v.value) - ref) <= float(v.err) + 1e-12 * ref


def test_level_three_against_nested_quadrature(oracles):
    ref = float(oracles["P3(0.05)"])
    for method in ("substituted", "direct"):
        assert float(pf.pi_d(3, "0.05", method=method).value) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_growth_is_log_power(d):
    # P_d / (two leading log terms) approaches 1 as t -> 0
    def ratio(t):
        L = -mpmath.log(t)
        two = 2 * (L**d / mpmath.factorial(d) + (d + 1) * mpmath.log(4) * L ** (d - 1) / mpmath.factorial(d - 1))
        return float(pf.pi_d(d, t).value) / float(two)

    near, far = ratio(1e-20), ratio(1e-12)
    assert 1 <= near < far
    assert near - 1 < 0.35


def test_phase_cycle():
    assert [pf.pi_d_phase(d) for d in range(1, 7)] == [3, 0, 1, 2, 3, 0]


@pytest.mark.parametrize("t", [0, 1, -0.5, 2])
def test_domain(t):
    with pytest.raises(DomainError):
        pf.J_agm(t)
    with pytest.raises(DomainError):
        pf.pi_d(2, t) if 0 < t < 1 else pf.J_uform(t)


# --- fitting -----------------------------------------------------------------


def synthetic(coeffs, corr, ts):
    out = []
    for t in ts:
        L = mpmath.log(t)
        v = sum(c * L**j for j, c in enumerate(coeffs)) + sum(c * t * L**j for j, c in enumerate(corr))
        out.append((t, v))
    return out


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.lists(st.floats(-3, 3), min_size=3, max_size=3))
@settings(max_examples=25)
def test_fit_recovers_synthetic_polynomial(coeffs, corr):
    with CTX.work():
        ts = pf.geometric_ladder("1e-8", "1e-2", 12)
        P = pf.fit_log_poly(synthetic(coeffs, corr, ts), 2, ctx=CTX, corrections=1)
        for c, want in zip(P.coeffs, coeffs):
            assert abs(c.value - mpf(want)) < mpf("1e-25")


def test_fit_needs_residual_degrees_of_freedom():
    with CTX.work():
        ts = pf.geometric_ladder("1e-8", "1e-2", 4)
        with pytest.raises(IllConditioned):
            pf.fit_log_poly(synthetic([1, 2, 3], [0, 0, 0], ts), 2, ctx=CTX, corrections=1)


def test_fit_tolerance_is_enforced():
    with CTX.work():
        ts = pf.geometric_ladder("1e-8", "1e-2", 10)
        noisy = [(t, v + (mpf("1e-6") if i % 2 else -mpf("1e-6"))) for i, (t, v) in
                 enumerate(synthetic([1, 2, 3], [1, 1, 1], ts))]
        with pytest.raises(IllConditioned):
            pf.fit_log_poly(noisy, 2, ctx=CTX, corrections=1, tolerance="1e-12")


def test_fit_config_validation():
    with pytest.raises(ValueError):
        pf.FitConfig(samples=(0.5,))
    assert len(pf.FitConfig(samples=(1e-3, 1e-2)).samples) == 2
    ts = pf.geometric_ladder("1e-6", "1e-2", 5)
    assert ts[0] == mpf("1e-6") and abs(ts[-1] - mpf("1e-2")) < mpf("1e-40")


def test_leading_coefficients():
    fixed = pf.leading_fixed(3)
    assert fixed[3].value == mpf(-1) / 6
    with mpmath.workprec(192):
        assert abs(fixed[2].value - 4 * mpmath.log(4) / 2) < mpf("1e-50")
    assert pf.period_prefactor(3) == -8


def test_d1_fit_and_normalization():
    ts = pf.geometric_ladder("1e-12", "1e-3", 12)
    P = pf.fit_period(1, ts)
    with CTX.work():
        # R_1 = J = -log t + log 16 + o(1)
        assert abs(P.coeff(0).value - mpmath.log(16)) < mpf("1e-15")
        N = pf.normalize_local_coordinate(P, 1, alpha=16)
        assert abs(N.coeff(0).value) < mpf("1e-15")
    with pytest.raises(NormalizationFailed):
        pf.normalize_local_coordinate(P, 1, alpha=4)


def test_d2_fit_without_pinning():
    ts = pf.geometric_ladder("1e-9", "1e-3", 12)
    P = pf.fit_period(2, ts, fix_leading=False, corrections=2)
    with CTX.work():
        assert abs(P.coeff(2).value - mpf(1) / 2) < mpf("1e-6")
        assert abs(P.coeff(1).value + 3 * mpmath.log(4)) < mpf("1e-5")
        N = pf.normalize_local_coordinate(P, 2, tolerance="1e-5")
        assert abs(N.coeff(1).value) < mpf("1e-5")


def test_bottom_row():
    with CTX.work():
        P = LogPoly((2, 3, 5), e=2, prefactor=Fraction(4))
        row = pf.bottom_row(P, 2)
        assert row[-1] == PeriodEntry(1)
        assert row[0].twopii_pow == -2 and abs(row[0].value.value - 8) < mpf("1e-40")
        assert row[1].twopii_pow == -1 and abs(row[1].value.value + 6) < mpf("1e-40")
        exact = LogPoly((2, 3, 5), e=2, prefactor=Fraction(4), exact=(PeriodEntry.xi(-48), None, None))
        assert pf.bottom_row(exact, 2)[0] == PeriodEntry.xi(-48)
        assert "twopii_exponent" in row[0].to_json()
