from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st
from mpmath import mpf

from lmhs.errors import InsufficientPrecision, NoMatch
from lmhs.exactlin import PeriodEntry
from lmhs.hpnum import DEFAULT_CTX, BigReal, PrecisionCtx, zeta
from lmhs.zetaseries import identities as ids
from lmhs.zetaseries.symbolic import Poly, power_series_power, shift_poly

S = Poly.sym


def test_region_one_generating_function_matches_tables():
    assert ids.region1_generic(3) == ids.REGION_I_D3
    assert ids.region1_generic(6) == ids.REGION_I_D6


def test_normalized_d3_exact_form():
    c0, c1, c2, c3 = ids.normalized_d3_in_zetas()
    assert c3 == Poly.const(Fraction(-1, 6))
    assert c2.is_zero()
    assert c1 == 2 * S("z2")
    g2_rhs = Fraction(8, 3) * S("g1") ** 3 + 2 * S("g1") * S("z2") - 12 * S("z3")
    # with the G2 identity the constant collapses to -6 zeta(3)
    assert c0.subs(X=g2_rhs) == -6 * S("z3")


def test_a30_bracket_is_the_g2_identity():
    g2_rhs = Fraction(8, 3) * S("g1") ** 3 + 2 * S("g1") * S("z2") - 12 * S("z3")
    assert ids.a30_bracket_exact().subs(X=g2_rhs).is_zero()


def test_region_one_zeta5_coefficient():
    assert ids.region1_zeta5_part() == -36


def test_partial_d6_top_coefficients():
    top = ids.partial_d6_exact()
    assert top[6] == Poly.const(Fraction(1, 720))
    assert top[5].is_zero()
    assert top[4] == Fraction(-5, 24) * S("z2")
    # scaled by 2^6/(2 pi i)^6 these are 4/45 and 5/9 on l^6 and l^4
    assert 64 * Fraction(1, 720) == Fraction(4, 45)
    assert 64 * Fraction(-5, 24) * ids.ZETA2_OVER_TWOPII_SQ == Fraction(5, 9)


def test_shift_poly_against_binomial_expansion():
    x = S("x")
    coeffs = [Poly.const(1), S("a"), S("b"), S("c")]
    shifted = shift_poly(coeffs, S("d"))
    lhs = sum((c * x**j for j, c in enumerate(shifted)), Poly())
    rhs = sum((c * (x + S("d")) ** j for j, c in enumerate(coeffs)), Poly())
    assert lhs == rhs


@given(st.lists(st.fractions(-5, 5, max_denominator=4), min_size=2, max_size=4), st.integers(1, 5))
def test_power_series_power(h, d):
    h = [Poly.const(1)] + [Poly.const(c) for c in h[1:]]
    order = len(h) - 1
    got = power_series_power(h, d, order)
    want = [Poly.const(1)]
    for _ in range(d):
        nxt = [Poly() for _ in range(order + 1)]
        for i, a in enumerate(want):
            for j, b in enumerate(h):
                if i + j <= order:
                    nxt[i + j] = nxt[i + j] + a * b
        want = nxt
    assert got[: order + 1] == want


def test_poly_algebra():
    a, b = S("a"), S("b")
    assert (a + b) ** 2 == a * a + 2 * a * b + b * b
    assert (a - a).is_zero()
    assert (a * b).subs(a=2, b=Fraction(1, 2)) == Poly.const(1)
    assert (a ** 2 + 1).evaluate({"a": 3}) == 10


# --- numeric assembly --------------------------------------------------------


def test_beta_delta_identity(symbols):
    rep = ids.beta_delta_identity(DEFAULT_CTX)
    assert rep.passed and rep.covered
    assert rep.residual < mpf("1e-10")


def test_g2_identity(symbols):
    rep = ids.g2_identity(DEFAULT_CTX)
    assert rep.passed and rep.covered
    assert rep.to_json()["pass"] is True


def test_theorem_d3(symbols):
    P = ids.theorem_d3(DEFAULT_CTX, values=symbols)
    assert P.exact[0] == PeriodEntry.xi(-48, 3)
    assert P.exact[1] == Fraction(-2, 3)
    checks = ids.theorem_d3_checks(P, symbols, DEFAULT_CTX)
    assert all(c.passed for c in checks)
    q = ids.recognize_rational(P.ell_coeff(0)[0], symbols["z3"], 1000)
    assert q == -48


def test_partial_d6_numeric(symbols):
    P = ids.partial_d6(DEFAULT_CTX, values=symbols)
    with DEFAULT_CTX.work():
        assert abs(P.ell_numeric(6).value - mpf(4) / 45) < mpf("1e-30")
        assert abs(P.ell_numeric(4).value - mpf(5) / 9) < mpf("1e-30")
        a30 = P.coeff(3)
        assert abs(a30.value) <= a30.err


# --- rational recognition ------------------------------------------------------


@given(st.integers(-5000, 5000), st.integers(1, 1000))
def test_recognize_rational_recovers_fractions(p, q):
    ctx = PrecisionCtx(128)
    with ctx.work():
        z3 = zeta(3, ctx)
        x = BigReal(mpf(p) / q * z3.value, mpf("1e-30"))
        assert ids.recognize_rational(x, z3, 1000) == Fraction(p, q)


def test_recognize_rational_failures():
    with mpmath.workprec(128):
        with pytest.raises(InsufficientPrecision):
            ids.recognize_rational(BigReal(mpf(-48), mpf("1e-3")), BigReal(1), 1000)
        with pytest.raises(NoMatch):
            ids.recognize_rational(BigReal(mpmath.pi, mpf("1e-30")), BigReal(1), 1000)
