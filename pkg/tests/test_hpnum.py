import mpmath
import pytest
from fractions import Fraction
from hypothesis import given, strategies as st
from mpmath import mpf

from lmhs.errors import DomainError
from lmhs.hpnum import (
    BigReal,
    PrecisionCtx,
    f_n,
    li2,
    li3,
    quadrature,
    verify_polylog_integral_lemmas,
    zeta,
    zeta_value,
)

CTX = PrecisionCtx(256)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 11])
def test_zeta_against_mpmath(n):
    z = zeta(n, CTX)
    with mpmath.workprec(300):
        ref = mpmath.zeta(n)
    assert abs(z.value - ref) <= z.err + mpf(2) ** -250
    assert z.err < mpf("1e-70")


def test_zeta_value_special_arguments():
    with CTX.work():
        assert zeta_value(1, CTX).contains(mpmath.log(4))
        assert zeta_value(0, CTX).value == mpf(-1) / 2
        assert zeta_value(-1, CTX).contains(mpf(-1) / 12, slack=2)
    with pytest.raises(DomainError):
        zeta(1, CTX)


@pytest.mark.parametrize("w", ["0.1", "0.5", "0.75", "0.99", "1"])
def test_polylogs_against_mpmath(w):
    with CTX.work():
        for fn, s in ((li2, 2), (li3, 3)):
            v = fn(mpf(w), CTX)
            ref = mpmath.polylog(s, mpf(w))
            assert abs(v.value - ref) <= v.err + mpf(2) ** -240


def test_polylog_domain():
    with pytest.raises(DomainError):
        li2(mpf("1.5"), CTX)
    assert li2(Fraction(0), CTX).value == 0


def test_li2_half():
    with CTX.work():
        lhs = li2(Fraction(1, 2), CTX) * 2
        rhs = zeta(2, CTX) - zeta_value(1, CTX) ** 2 / 4
        assert abs(lhs.value - rhs.value) < mpf("1e-60")


@pytest.mark.parametrize(
    "f,a,b,exact",
    [
        (lambda x: 1 / mpmath.sqrt(x), 0, 1, lambda: mpf(2)),
        (lambda x: mpmath.log(x), 0, 1, lambda: mpf(-1)),
        (lambda x: 1 / mpmath.sqrt(x * (1 - x)), 0, mpf(1) / 2, lambda: mpmath.pi / 2),
        (lambda x: mpmath.exp(-x * x), -mpmath.inf, mpmath.inf, lambda: mpmath.sqrt(mpmath.pi)),
        (lambda x: 1 / (1 + x * x), 0, mpmath.inf, lambda: mpmath.pi / 2),
        (lambda x: x**3, 2, 5, lambda: mpf(5**4 - 2**4) / 4),
    ],
)
def test_quadrature_known_integrals(f, a, b, exact):
    ctx = PrecisionCtx(128, "1e-30")
    r = quadrature(f, a, b, ctx)
    with ctx.work():
        assert abs(r.value - exact()) < mpf("1e-28")


def test_singularity_at_nonzero_endpoint_is_resolved_to_half_precision():
    # 1 - x cannot be formed below 2^-prec next to x = 1, so about half the bits survive
    ctx = PrecisionCtx(128, "1e-20")
    r = quadrature(lambda x: 1 / mpmath.sqrt(x * (1 - x)), 0, 1, ctx)
    with ctx.work():
        assert abs(r.value - mpmath.pi) < mpf("1e-20")


def test_quadrature_breakpoints_and_orientation():
    ctx = PrecisionCtx(128, "1e-30")
    f = lambda x: abs(x - mpf(1) / 3)
    r = quadrature(f, 0, 1, ctx, singular_endpoints=(False, False), breakpoints=[mpf(1) / 3])
    with ctx.work():
        assert abs(r.value - mpf(5) / 18) < mpf("1e-28")
    back = quadrature(f, 1, 0, ctx, singular_endpoints=(False, False), breakpoints=[mpf(1) / 3])
    assert abs(back.value + r.value) < mpf("1e-30")


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("u", ["0", "0.3", "0.9"])
def test_f_n_recursion_matches_closed_forms(n, u):
    ctx = PrecisionCtx(128, "1e-15")
    a = f_n(n, mpf(u), ctx, "recursion")
    b = f_n(n, mpf(u), ctx, "closed")
    assert abs(a.value - b.value) < mpf("1e-13")


def test_f_n_at_zero_gives_gamma(oracles):
    ctx = PrecisionCtx(128, "1e-20")
    for n in (1, 2, 3):
        v = f_n(n, 0, ctx, "closed")
        with ctx.work():
            assert abs(v.value - mpf(oracles[f"gamma{n}"])) < mpf("1e-20")


def test_f_n_domain():
    with pytest.raises(DomainError):
        f_n(0, 0)
    with pytest.raises(DomainError):
        f_n(1, mpf(2))
    with pytest.raises(DomainError):
        f_n(4, mpf("0.5"), mode="closed")


def test_polylog_lemmas():
    rep = verify_polylog_integral_lemmas(CTX)
    assert rep.passed
    assert all(v < mpf("1e-20") for k, v in rep.residuals.items() if k.startswith("reflection"))


def test_precision_ctx_validation():
    with pytest.raises(ValueError):
        PrecisionCtx(32)
    with pytest.raises(ValueError):
        PrecisionCtx(128, "0")
    assert PrecisionCtx(128).with_bits(200).working_bits == 200


reals = st.floats(-1e6, 1e6, allow_nan=False)
errs = st.floats(0, 1e-3)


@given(reals, errs, reals, errs, st.floats(-1, 1), st.floats(-1, 1))
def test_interval_arithmetic_encloses(x, ex, y, ey, sx, sy):
    """Perturb each operand within its bar: the true result stays inside the propagated bar."""
    with mpmath.workprec(128):
        a, b = BigReal(x, ex), BigReal(y, ey)
        xt, yt = mpf(x) + sx * ex, mpf(y) + sy * ey
        for got, true in ((a + b, xt + yt), (a - b, xt - yt), (a * b, xt * yt)):
            assert got.contains(true, slack=1 + 1e-9) or abs(got.value - true) < 1e-20
        if abs(y) > 2 * ey + 1e-3:
            q = a / b
            assert q.contains(xt / yt, slack=1 + 1e-9) or abs(q.value - xt / yt) < 1e-20


def test_division_by_interval_containing_zero():
    with pytest.raises(ZeroDivisionError):
        BigReal(1) / BigReal(0, 1)
    with pytest.raises(ValueError):
        BigReal(2) ** -1
