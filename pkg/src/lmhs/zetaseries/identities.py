"""Assembly of the limiting log-polynomials and the identity checks.

The d = 3 period near the degeneration splits into regions whose
contributions are polynomials in log(eps) with coefficients built from
gamma_1..gamma_3 and the series beta, delta, nu, nu', psi.  Adding them and
substituting log(eps) = log(s) + (d+1) gamma_1 (that is t = 4^(d+1) s) gives
the canonically normalized polynomial.  The same is done for the top four
terms at d = 6.

Every polynomial is kept twice: exactly, as :class:`Poly` objects in formal
symbols, and numerically, with the symbols replaced by computed values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from ..errors import InsufficientPrecision, NoMatch, ToleranceExceeded
from ..exactlin import PeriodEntry
from ..hpnum import DEFAULT_CTX, BigReal, PrecisionCtx, zeta, zeta1
from ..logpoly import LogPoly
from .constants import GAMMA_CLOSED, gamma_n, named_constant
from .symbolic import Poly, power_series_power, shift_poly

S = Poly.sym
g1, g2, g3, g4, g5, g6 = (S(f"g{i}") for i in range(1, 7))
beta, delta, nu, nu_p, psi = S("beta"), S("delta"), S("nu"), S("nu_p"), S("psi")
z2, z3, X = S("z2"), S("z3"), S("X")
F = Fraction

# region contributions at d = 3, coefficients of log^j(eps), j = 0..3
REGION_I_D3 = [g1**3 - 6 * g1 * g2 + 3 * g3, 3 * g2 - 3 * g1**2, F(3, 2) * g1, Poly.const(F(-1, 6))]
REGION_IIA_D3 = [g1**3 - 2 * g1 * g2 + g1 * beta + nu - psi, -(2 * g1**2 + beta), g1 / 2, Poly()]
REGION_IIB_D3 = [g1 * delta + nu_p, -delta, Poly(), Poly()]

# region (I) at d = 6 as displayed, coefficients of log^j(eps), j = 0..6
REGION_I_D6 = [
    -6 * g6 + 30 * g1 * g5 + 30 * g2 * g4 + 15 * g3**2 - 20 * g2**3 - 120 * g1 * g2 * g3
    - 60 * g1**2 * g4 + 90 * g1**2 * g2**2 + 60 * g1**3 * g3 - 30 * g1**4 * g2 + g1**6,
    -6 * g5 + 30 * g1 * g4 + 30 * g2 * g3 - 60 * g1 * g2**2 - 60 * g1**2 * g3 + 60 * g1**3 * g2 - 6 * g1**5,
    -3 * g4 + 15 * g1 * g3 + F(15, 2) * g2**2 - 30 * g1**2 * g2 + F(15, 2) * g1**4,
    -g3 + 5 * g1 * g2 - F(10, 3) * g1**3,
    -g2 / 4 + F(5, 8) * g1**2,
    -g1 / 20,
    Poly.const(F(1, 720)),
]

# regions (I) + (IIa,b) at d = 6, top four coefficients (log^3 .. log^6)
PARTIAL_D6_TOP = {
    6: Poly.const(F(1, 720)),
    5: -F(7, 120) * g1,
    4: F(49, 48) * g1**2 - F(5, 24) * z2,
    3: -F(109, 12) * g1**3 + F(37, 6) * g1 * z2 - 2 * z3 - X / 6,
}

# zeta(2)/(2 pi i)^2 = -1/24
ZETA2_OVER_TWOPII_SQ = F(-1, 24)


def gamma_as_zetas(n: int) -> Poly:
    """gamma_n as an exact polynomial in the symbols z1, z2, ... (z1 = log 4)."""
    out = Poly()
    for part, c in GAMMA_CLOSED[n].items():
        term = Poly.const(c)
        for p in part:
            term = term * S(f"z{p}")
        out = out + term
    return out


def region1_generic(d: int) -> list:
    """Region (I) polynomial for any d from the Pochhammer generating function.

    With h(z) = 1 + sum_n (-1)^(n+1) gamma_n z^n, the coefficient of
    (-log eps)^j is [z^(d-j)] h(z)^d / j!.
    """
    h = [Poly.const(1)] + [(-1) ** (n + 1) * S(f"g{n}") for n in range(1, d + 1)]
    hd = power_series_power(h, d, d)
    return [hd[d - j] * F((-1) ** j, math.factorial(j)) for j in range(d + 1)]


def region_poly_d3_exact() -> tuple[list, list]:
    """(raw, normalized) exact coefficient lists for d = 3."""
    raw = [a + b + c for a, b, c in zip(REGION_I_D3, REGION_IIA_D3, REGION_IIB_D3)]
    return raw, shift_poly(raw, 4 * g1)


def normalized_d3_in_zetas() -> list:
    """The normalized d = 3 coefficients after inserting the closed forms of
    gamma_2, gamma_3 and beta + delta = 2 gamma_1^2 + gamma_2, with X = nu + nu' - psi."""
    _, norm = region_poly_d3_exact()
    g2z = z2 - g1**2 / 2
    g3z = 2 * z3 - z2 * g1 + g1**3 / 6
    out = []
    for c in norm:
        # beta and delta only enter through beta + delta, psi and the nu's only through X
        c = c.subs(delta=2 * g1**2 + g2 - beta, nu=X - nu_p + psi)
        out.append(c.subs(g2=g2z, g3=g3z))
    return out


def partial_d6_exact() -> list:
    """Normalized (log s + 7 gamma_1 substituted) top coefficients at d = 6; None below log^3."""
    coeffs = [Poly()] * 3 + [PARTIAL_D6_TOP[j] for j in range(3, 7)]
    shifted = shift_poly(coeffs, 7 * g1)
    return [None, None, None] + shifted[3:]


# ---------------------------------------------------------------------------
# numeric values of the symbols


@dataclass
class SymbolValues:
    values: dict
    series: dict  # name -> SeriesValue for the multi-index constants

    def __getitem__(self, key):
        return self.values[key]


_SERIES_CACHE: dict = {}


def _series(name: str, cutoffs):
    key = (name, tuple(cutoffs) if cutoffs is not None else None)
    if key not in _SERIES_CACHE:
        _SERIES_CACHE[key] = named_constant(name, cutoffs=cutoffs)
    return _SERIES_CACHE[key]


def _series_big(sv) -> BigReal:
    return BigReal(mpf(sv.value.value), sv.value.err)


def symbol_values(ctx: PrecisionCtx = DEFAULT_CTX, cutoffs=None, need_series=True, gamma_max=3) -> SymbolValues:
    with ctx.work():
        vals = {f"g{n}": gamma_n(n, "direct", ctx) for n in range(1, gamma_max + 1)}
        vals["z1"] = zeta1(ctx)
        for n in range(2, 7):
            vals[f"z{n}"] = zeta(n, ctx)
        series = {}
        if need_series:
            for name, sym in (("beta", "beta"), ("delta", "delta"), ("psi", "psi"), ("nu", "nu"), ("nu_prime", "nu_p")):
                series[name] = _series(name, cutoffs)
                vals[sym] = _series_big(series[name])
            vals["X"] = vals["nu"] + vals["nu_p"] - vals["psi"]
        return SymbolValues(vals, series)


def _numeric(coeffs, sv: SymbolValues, ctx) -> tuple:
    with ctx.work():
        return tuple(None if c is None else BigReal.coerce(c.evaluate(sv.values)) for c in coeffs)


# ---------------------------------------------------------------------------
# d = 3


def region_poly_d3(ctx: PrecisionCtx = DEFAULT_CTX, cutoffs=None, values: SymbolValues | None = None) -> LogPoly:
    """Normalized d = 3 polynomial in log(s) with numeric coefficients."""
    sv = values or symbol_values(ctx, cutoffs)
    raw, _ = region_poly_d3_exact()
    with ctx.work():
        unnormalized = LogPoly(_numeric(raw, sv, ctx))
        return unnormalized.shift(4 * sv["g1"])


def region_poly_d3_raw(ctx: PrecisionCtx = DEFAULT_CTX, cutoffs=None, values: SymbolValues | None = None) -> LogPoly:
    sv = values or symbol_values(ctx, cutoffs)
    raw, _ = region_poly_d3_exact()
    return LogPoly(_numeric(raw, sv, ctx))


@dataclass
class CoefficientCheck:
    name: str
    computed: BigReal
    target: BigReal
    residual: mpf
    tolerance: mpf
    relative: bool

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


THEOREM_D3_EXACT = (
    PeriodEntry.xi(-48, 3),
    PeriodEntry.coerce(16 * ZETA2_OVER_TWOPII_SQ),
    PeriodEntry.coerce(0),
    PeriodEntry.coerce(F(-4, 3)),
)


def theorem_d3_checks(P: LogPoly, values: SymbolValues, ctx, rel_l1=mpf("1e-6"), rel_l0=mpf("1e-4")) -> list:
    """Compare the scaled normalized polynomial 8/(2 pi i)^3 * P against the exact targets."""
    with ctx.work():
        z2v, z3v = values["z2"], values["z3"]
        c3, c2, c1, c0 = (P.ell_coeff(j)[0] for j in (3, 2, 1, 0))
        checks = [
            CoefficientCheck("l^3", c3, BigReal.coerce(F(-4, 3)), abs((c3 - F(-4, 3)).value), mpf(2) ** (-100), False),
            CoefficientCheck("l^2", c2, BigReal(0), abs(c2.value), max(c2.err, mpf(2) ** (-100)), False),
            CoefficientCheck(
                "l^1 (real part of 16 zeta(2) (2 pi i)^-2)", c1, z2v * 16,
                abs((c1.value - 16 * z2v.value) / (16 * z2v.value)), rel_l1, True,
            ),
            CoefficientCheck(
                "l^0 (real part of -48 zeta(3) (2 pi i)^-3)", c0, z3v * (-48),
                abs((c0.value + 48 * z3v.value) / (48 * z3v.value)), rel_l0, True,
            ),
        ]
    return checks


def theorem_d3(ctx: PrecisionCtx = DEFAULT_CTX, cutoffs=None, values: SymbolValues | None = None) -> LogPoly:
    """The normalized d = 3 period polynomial in l(s), scaled by 2^3/(2 pi i)^3.

    Returns a LogPoly with numeric coefficients and the exact l-coefficients
    (-48 Xi_3, 16 zeta(2)/(2 pi i)^2 = -2/3, 0, -4/3) attached; raises
    ToleranceExceeded when the numbers do not match them.
    """
    sv = values or symbol_values(ctx, cutoffs)
    P = region_poly_d3(ctx, values=sv).scaled(8, 3)
    checks = theorem_d3_checks(P, sv, ctx)
    failed = [c for c in checks if not c.passed]
    if failed:
        raise ToleranceExceeded(
            "normalized d=3 polynomial does not match: " + ", ".join(c.name for c in failed),
            {c.name: c.residual for c in checks},
        )
    return LogPoly(P.coeffs, P.e, P.prefactor, exact=THEOREM_D3_EXACT)


# ---------------------------------------------------------------------------
# d = 6


def region1_poly_d6(ctx: PrecisionCtx = DEFAULT_CTX, values: SymbolValues | None = None) -> LogPoly:
    """Region (I) contribution at d = 6 in log(eps), all seven coefficients."""
    sv = values or symbol_values(ctx, need_series=False, gamma_max=6)
    return LogPoly(_numeric(REGION_I_D6, sv, ctx))


def region1_zeta5_part() -> Fraction:
    """Exact coefficient of zeta(5) in the log(eps) coefficient of the d = 6 region (I) polynomial."""
    subs = {f"g{n}": gamma_as_zetas(n) for n in range(1, 7)}
    c1 = REGION_I_D6[1].subs(**subs)
    return c1.coeff_of((("z5", 1),))


def partial_d6(ctx: PrecisionCtx = DEFAULT_CTX, cutoffs=None, values: SymbolValues | None = None) -> LogPoly:
    """Top four normalized coefficients at d = 6 times 2^6/(2 pi i)^6; lower ones are None.

    The exact l-coefficients attached are 4/45 (l^6), 0 (l^5), 5/9 (l^4) and
    0 for l^3, the last being equivalent to the G2 identity.
    """
    sv = values or symbol_values(ctx, cutoffs)
    coeffs = _numeric(partial_d6_exact(), sv, ctx)
    exact = (None, None, None, PeriodEntry.coerce(0), PeriodEntry.coerce(64 * F(-5, 24) * ZETA2_OVER_TWOPII_SQ),
             PeriodEntry.coerce(0), PeriodEntry.coerce(F(64, 720)))
    return LogPoly(coeffs, 6, 64, exact=exact)


def a30_bracket_exact() -> Poly:
    """The normalized l^3 coefficient (times (2 pi i)^3 / 2^6) as an exact polynomial."""
    return partial_d6_exact()[3]


# ---------------------------------------------------------------------------
# rational recognition


def recognize_rational(x, base, max_den: int = 1000) -> Fraction:
    """Best rational p/q (q <= max_den) with x ~ (p/q) * base, by continued fractions."""
    x = BigReal.coerce(x)
    base = BigReal.coerce(base)
    if x.value == 0 and x.err == 0:
        return Fraction(0)
    ratio = x / base
    if ratio.err >= mpf(1) / (2 * max_den**2):
        raise InsufficientPrecision(
            f"ratio known to {mpmath.nstr(ratio.err, 3)}, need below {1 / (2 * max_den**2):.3g} for denominators <= {max_den}"
        )
    with mpmath.workprec(max(mpmath.mp.prec, 128)):
        approx = Fraction(mpmath.nstr(ratio.value, 40, min_fixed=-mpmath.inf, max_fixed=mpmath.inf))
    q = approx.limit_denominator(max_den)
    residual = abs(ratio.value - mpf(q.numerator) / q.denominator)
    if residual > 10 * max(ratio.err, mpf(2) ** (-mpmath.mp.prec + 8) * abs(ratio.value)):
        raise NoMatch(f"closest p/q = {q} leaves residual {mpmath.nstr(residual, 3)}")
    return q


# ---------------------------------------------------------------------------
# identity reports


@dataclass
class IdentityReport:
    identity: str
    lhs: BigReal
    rhs: BigReal
    residual: mpf
    tolerance: mpf
    error_bar: mpf = mpf(0)

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    @property
    def covered(self) -> bool:
        """Whether the reported error bars account for the residual."""
        return self.residual <= self.error_bar

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "lhs": mpmath.nstr(self.lhs.value, 20),
            "rhs": mpmath.nstr(self.rhs.value, 20),
            "residual": mpmath.nstr(self.residual, 5),
            "tolerance": mpmath.nstr(self.tolerance, 5),
            "error_bar": mpmath.nstr(self.error_bar, 5),
            "pass": bool(self.passed),
        }


def beta_delta_identity(ctx: PrecisionCtx = DEFAULT_CTX, cutoffs=None, tolerance="1e-6") -> IdentityReport:
    with ctx.work():
        b = _series_big(_series("beta", cutoffs))
        d = _series_big(_series("delta", cutoffs))
        G1, G2 = gamma_n(1, ctx=ctx), gamma_n(2, ctx=ctx)
        lhs = b + d
        rhs = G1 * G1 * 2 + G2
        res = abs(lhs.value - rhs.value)
        return IdentityReport("beta + delta = 2 gamma_1^2 + gamma_2", lhs, rhs, res, mpf(tolerance), lhs.err + rhs.err)


def g2_rhs(ctx: PrecisionCtx = DEFAULT_CTX) -> BigReal:
    with ctx.work():
        G1 = gamma_n(1, ctx=ctx)
        return G1**3 * F(8, 3) + G1 * zeta(2, ctx) * 2 - zeta(3, ctx) * 12


def g2_identity(ctx: PrecisionCtx = DEFAULT_CTX, cutoffs=None, tolerance="1e-4") -> IdentityReport:
    with ctx.work():
        X = _series_big(_series("nu", cutoffs)) + _series_big(_series("nu_prime", cutoffs)) - _series_big(
            _series("psi", cutoffs)
        )
        rhs = g2_rhs(ctx)
        res = abs(X.value - rhs.value)
        return IdentityReport(
            "nu + nu' - psi = (8/3) gamma_1^3 + 2 gamma_1 zeta(2) - 12 zeta(3)", X, rhs, res, mpf(tolerance), X.err + rhs.err
        )
