"""Period integrals of the iterated families and their log-polynomial asymptotics.

The level-1 period is

    J(t) = int_1^{1/t} dx / sqrt(x (x-1) (1-tx))
         = int_0^1 du / sqrt(u (1-u) (u + (1-u) t))      (u = (x-1) t / (1-t))
         = pi / AGM(1, sqrt(t)),

and the higher levels are built from P_1 = 2 J by

    P_d(t) = int_t^1 P_{d-1}(y) dy / sqrt(y (1-y) (y-t))   (d even)
    P_d(t) = int_t^1 P_{d-1}(y) dy / sqrt(y (y-t))         (d odd).

These kernels come from integrating the defining equation of the d = 3 family
w^2 = (1-t x3) x3 (x2-x3)(x2-1)(x1-x2)(x1-1) x1 one coordinate at a time in
y = 1/x; every step then contributes one power of log t as t -> 0.

All integrands are real and positive.  The complex periods are pi_d = -i^d P_d
(square roots taken on the real slice, the phase kept as a power of i).
Near t = 0 the normalized period is  Pi_d(t) = prefactor * (2 pi i)^(-d) * R(t)
with R a polynomial in log t up to O(t log^d t); fit_log_poly recovers it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np
from mpmath import mpf
from numpy.polynomial import chebyshev as C

from .errors import DomainError, IllConditioned, NoConvergence, NormalizationFailed
from .exactlin import PeriodEntry
from .hpnum import BigReal, PrecisionCtx, quadrature
from .logpoly import LogPoly

# Pi_1 = -(2 / (2 pi i)) * J(t)
PI1_PREFACTOR = Fraction(-2)
PI1_E = 1

FIT_CTX = PrecisionCtx(192, "1e-25")


def _check_t(t) -> None:
    if not 0 < t < 1:
        raise DomainError(f"t must lie in (0, 1), got {t}")


# ---------------------------------------------------------------------------
# level 1 at high precision


def agm(a, b, ctx: PrecisionCtx | None = None):
    """Arithmetic-geometric mean of two positive reals."""
    with (ctx.work() if ctx else mpmath.workprec(mpmath.mp.prec)):
        a, b = mpf(a), mpf(b)
        tol = mpf(2) ** (8 - mpmath.mp.prec)
        while abs(a - b) > tol * a:
            a, b = (a + b) / 2, mpmath.sqrt(a * b)
        return (a + b) / 2


def J_agm(t, ctx: PrecisionCtx = FIT_CTX) -> BigReal:
    with ctx.work():
        t = mpf(t)
        _check_t(t)
        v = mpmath.pi / agm(1, mpmath.sqrt(t), ctx)
        return BigReal(v, 64 * ctx.eps * v)


def J_xform(t, ctx: PrecisionCtx = FIT_CTX) -> BigReal:
    """The integral over x in [1, 1/t] with the endpoint singularities handled by tanh-sinh."""
    with ctx.work():
        t = mpf(t)
        _check_t(t)
        hi = 1 / t
        # 1 - t x written against the rounded endpoint so it never goes negative
        return quadrature(lambda x: 1 / mpmath.sqrt(x * (x - 1) * t * (hi - x)), 1, hi, ctx)


def J_uform(t, ctx: PrecisionCtx = FIT_CTX) -> BigReal:
    """The same integral after u = (x-1) t/(1-t)."""
    with ctx.work():
        t = mpf(t)
        _check_t(t)

        def f(u):
            return 1 / mpmath.sqrt(u * (1 - u) * (u + (1 - u) * t))

        return quadrature(f, 0, 1, ctx)


def Pi_1(t, ctx: PrecisionCtx = FIT_CTX) -> BigReal:
    """The real integral J(t) behind Pi_1(t) = -(2/(2 pi i)) J(t), by quadrature of the u-form."""
    return J_uform(t, ctx)


# ---------------------------------------------------------------------------
# levels d >= 2 in double precision


def _ts_nodes(level: int):
    """tanh-sinh nodes on [-1, 1]: (distance to -1, distance to +1, weight), float64."""
    h = 2.0**-level
    # run out to distances near the underflow limit: inverse square roots
    # at the ends make the far nodes matter
    kmax = int(math.ceil(6.2 / h))
    s = np.arange(-kmax, kmax + 1) * h
    v = 0.5 * math.pi * np.sinh(s)
    with np.errstate(over="ignore"):
        dl = 2.0 / (1.0 + np.exp(-2 * v))  # 1 + tanh v
        dr = 2.0 / (1.0 + np.exp(2 * v))  # 1 - tanh v
        w = h * 0.5 * math.pi * np.cosh(s) / np.cosh(v) ** 2
    keep = (dl > 1e-300) & (dr > 1e-300) & (w > 1e-300)
    return dl[keep], dr[keep], w[keep]


def P1_array(y: np.ndarray) -> np.ndarray:
    """2 pi / AGM(1, sqrt(y)), vectorized."""
    a = np.ones_like(y)
    b = np.sqrt(y)
    for _ in range(64):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.all(np.abs(a - b) <= 1e-16 * a):
            break
    return 2 * math.pi / (0.5 * (a + b))


def _sqrt_power(j: int) -> int:
    # P_j(y) carries a factor (1-y)^(m/2) with m = floor((j-1)/2)
    return (j - 1) // 2


class _Level:
    """P_j on [t, 1] as a Chebyshev interpolant in log y, with the (1-y)^(m/2) factor split off."""

    def __init__(self, j: int, func: Callable[[np.ndarray], np.ndarray], t: float, degree: int):
        self.j = j
        self.m = _sqrt_power(j)
        self.lo = math.log(t)

        def g(L):
            y = np.exp(L)
            return func(y) / (1 - y) ** (self.m / 2) if self.m else func(y)

        nodes = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
        L = self.lo + (nodes + 1) * (0 - self.lo) / 2
        # y = 1 exactly is never a node, so dividing by (1-y) is safe
        vals = g(L)
        self.coef = C.chebfit(nodes, vals, degree)

    def __call__(self, y: np.ndarray) -> np.ndarray:
        L = np.log(y)
        x = 2 * (L - self.lo) / (0 - self.lo) - 1
        q = C.chebval(x, self.coef)
        return q * (1 - y) ** (self.m / 2) if self.m else q


def _next_level_substituted(j: int, prev: Callable, y: np.ndarray, level: int) -> np.ndarray:
    """P_j at the points y from P_{j-1} via y' = y + (1-y) sin^2(theta)."""
    dl, dr, w = _ts_nodes(level)
    theta = (np.pi / 4) * dl  # theta in [0, pi/2]; dl is the distance to theta = 0 scaled by 4/pi
    wt = (np.pi / 4) * w
    s2 = np.sin(theta) ** 2
    Y = y[:, None]
    arg = Y + (1 - Y) * s2[None, :]
    vals = prev(arg.ravel()).reshape(arg.shape)
    if j % 2 == 0:
        integrand = 2 * vals / np.sqrt(arg)
        return integrand @ wt
    integrand = 2 * np.cos(theta)[None, :] * vals / np.sqrt(arg)
    return np.sqrt(1 - y) * (integrand @ wt)


def _next_level_direct(j: int, prev: Callable, y: np.ndarray, one_minus_y: np.ndarray, level: int) -> np.ndarray:
    """P_j at the points y by tanh-sinh directly in the integration variable.

    Distances to the upper end are carried separately since they underflow
    when formed as 1 - y near y = 1.
    """
    dl, dr, w = _ts_nodes(level)
    span = (one_minus_y / 2)[:, None]
    below = span * dl[None, :]  # y' - y
    above = span * dr[None, :]  # 1 - y'
    arg = np.where(dl[None, :] <= dr[None, :], y[:, None] + below, 1 - above)
    vals = prev(arg.ravel(), above.ravel()).reshape(arg.shape)
    # the Jacobian span is folded into the square roots so nothing underflows
    if j % 2 == 0:
        integrand = vals / np.sqrt(arg) / np.sqrt(dl * dr)[None, :]
    else:
        integrand = vals * np.sqrt(span) / np.sqrt(arg * dl[None, :])
    return integrand @ w


def pi_d_modulus(d: int, t: float, method: str = "substituted", level: int = 6, cheb_degree: int = 96) -> float:
    """|pi_d(t)| = P_d(t) in double precision.

    ``method="substituted"`` uses the smooth theta-form at every level with
    Chebyshev-cached inner levels; ``method="direct"`` nests tanh-sinh in the
    original variables (affordable for d <= 3).
    """
    if not 1 <= d <= 6:
        raise DomainError("d must be between 1 and 6")
    _check_t(t)
    y0 = np.array([float(t)])
    if d == 1:
        return float(P1_array(y0)[0])
    if method == "direct":
        if d > 3:
            raise DomainError("direct nesting is only provided for d <= 3")

        def level_fn(j):
            if j == 1:
                return lambda y, _: P1_array(y)
            inner = level_fn(j - 1)
            return lambda y, omy: _next_level_direct(j, inner, y, omy, level)

        return float(level_fn(d)(y0, 1 - y0)[0])
    if method != "substituted":
        raise ValueError(f"unknown method {method!r}")
    prev: Callable = P1_array
    for j in range(2, d + 1):
        if j == d:
            return float(_next_level_substituted(j, prev, y0, level)[0])
        fn = (lambda p, jj: (lambda y: _next_level_substituted(jj, p, y, level)))(prev, j)
        prev = _Level(j, fn, float(t), cheb_degree)
    raise AssertionError("unreachable")


def pi_d_phase(d: int) -> int:
    """Exponent k with pi_d = i^k * P_d."""
    return (d + 2) % 4


def pi_d(d: int, t, ctx: PrecisionCtx | None = None, method: str = "substituted") -> BigReal:
    """Modulus of pi_d(t); the phase is i^pi_d_phase(d).

    d = 1 is evaluated at the precision of ``ctx`` (quadrature of the x-form);
    d >= 2 in double precision with the error taken as the change between two
    quadrature levels.
    """
    if d == 1:
        ctx = ctx or FIT_CTX
        j = J_xform(t, ctx)
        return j * 2
    tf = float(t)
    a = pi_d_modulus(d, tf, method, level=6)
    b = pi_d_modulus(d, tf, method, level=7)
    err = abs(a - b) + 1e-13 * abs(b) * d
    if not math.isfinite(b):
        raise NoConvergence(f"P_{d}({t}) did not converge")
    return BigReal(mpf(b), mpf(err))


# ---------------------------------------------------------------------------
# fitting


@dataclass
class FitConfig:
    samples: tuple
    fixed: Mapping[int, object] = field(default_factory=dict)
    tolerance: object = None
    corrections: int = 2

    def __post_init__(self):
        self.samples = tuple(mpf(t) for t in self.samples)
        if any(not (0 < t <= mpf("0.1")) for t in self.samples):
            raise ValueError("fit samples must lie in (0, 0.1]")


def geometric_ladder(t_min, t_max, n: int) -> list:
    t_min, t_max = mpf(t_min), mpf(t_max)
    if n < 2:
        return [t_max]
    r = (t_max / t_min) ** (mpf(1) / (n - 1))
    return [t_min * r**i for i in range(n)]


def fit_log_poly(
    samples: Sequence[tuple],
    degree: int,
    fixed: Mapping[int, object] | None = None,
    ctx: PrecisionCtx = FIT_CTX,
    corrections: int = 2,
    tolerance=None,
    e: int = 0,
    prefactor: Fraction = Fraction(1),
) -> LogPoly:
    """Least-squares fit R(t) = sum_j c_j log^j t + sum_{k<=corrections, j<=degree} b_kj t^k log^j t.

    ``fixed`` pins some c_j.  Error bars combine the propagated sample errors
    with three standard deviations of the residual; IllConditioned is raised
    when any exceeds ``tolerance``.
    """
    fixed = dict(fixed or {})
    with ctx.work():
        free = [j for j in range(degree + 1) if j not in fixed]
        extra = [(k, j) for k in range(1, corrections + 1) for j in range(degree + 1)]
        ncols = len(free) + len(extra)
        if len(samples) < ncols + 1:
            raise IllConditioned(
                f"{len(samples)} samples leave no residual to estimate errors for {ncols} unknowns"
            )
        rows, rhs, errs = [], [], []
        for t, val in samples:
            t = mpf(t)
            v = BigReal.coerce(val)
            L = mpmath.log(t)
            target = v.value - sum(mpf(BigReal.coerce(c).value) * L**j for j, c in fixed.items())
            rows.append([L**j for j in free] + [t**k * L**j for k, j in extra])
            rhs.append(target)
            errs.append(v.err)
        A = mpmath.matrix(rows)
        b = mpmath.matrix(rhs)
        AtA = A.T * A
        try:
            inv = mpmath.inverse(AtA)
        except ZeroDivisionError as exc:
            raise IllConditioned("normal equations are singular") from exc
        pinv = inv * A.T
        x = pinv * b
        resid = A * x - b
        dof = len(samples) - ncols
        rss = sum(r**2 for r in resid)
        sigma = mpmath.sqrt(rss / dof) if dof > 0 else mpf(0)
        coeffs = []
        k = 0
        bars = {}
        for j in range(degree + 1):
            if j in fixed:
                coeffs.append(BigReal.coerce(fixed[j]))
                continue
            prop = sum(abs(pinv[k, i]) * errs[i] for i in range(len(samples)))
            stat = 3 * sigma * mpmath.sqrt(abs(inv[k, k]))
            bars[j] = prop + stat
            coeffs.append(BigReal(x[k], prop + stat))
            k += 1
        if tolerance is not None:
            tol = mpf(tolerance)
            bad = {j: e_ for j, e_ in bars.items() if e_ > tol}
            if bad:
                raise IllConditioned(
                    "error bars exceed tolerance: "
                    + ", ".join(f"c_{j} +/- {mpmath.nstr(v, 3)}" for j, v in sorted(bad.items()))
                )
        return LogPoly(tuple(coeffs), e, prefactor)


def period_prefactor(d: int) -> Fraction:
    """Pi_d = prefactor * (2 pi i)^(-d) * R_d(t) with R_d = P_d / 2 (and R_1 = J)."""
    return Fraction((-2) ** d)


def leading_fixed(d: int, count: int = 2) -> dict:
    """Known top coefficients of R_d in powers of log t.

    They encode a_{d0} = 2^d/d! and a_{d-1,0} = -2^d (d+1) l(4)/(d-1)!, which in
    terms of R_d read c_d = (-1)^d/d! and c_{d-1} = (-1)^(d-1) (d+1) log 4/(d-1)!.
    """
    out = {d: BigReal.coerce(Fraction((-1) ** d, math.factorial(d)))}
    if count >= 2:
        with mpmath.workprec(FIT_CTX.working_bits):
            out[d - 1] = BigReal((-1) ** (d - 1) * (d + 1) * 2 * mpmath.log(2) / math.factorial(d - 1))
    return out


def sample_R(d: int, ts: Sequence, ctx: PrecisionCtx = FIT_CTX) -> list:
    """(t, R_d(t)) pairs; d = 1 at the precision of ctx, higher d in double precision."""
    if d == 1:
        return [(t, Pi_1(t, ctx)) for t in ts]
    return [(t, pi_d(d, t) * mpf(0.5)) for t in ts]


def fit_period(d: int, ts: Sequence, fix_leading: bool = True, corrections: int = 2, tolerance=None,
               ctx: PrecisionCtx = FIT_CTX) -> LogPoly:
    """Fit the log-polynomial of Pi_d from samples at the points ts.

    With ``fix_leading`` the top two coefficients are pinned (only the top one
    at d = 1, where pinning both would leave nothing to fit).
    """
    fixed = leading_fixed(d, 1 if d == 1 else 2) if fix_leading else None
    return fit_log_poly(sample_R(d, ts, ctx), d, fixed, ctx, corrections, tolerance, d, period_prefactor(d))


# ---------------------------------------------------------------------------
# normalization and the bottom row


def normalize_local_coordinate(P: LogPoly, d: int, alpha=None, tolerance=None) -> LogPoly:
    """Substitute t = alpha * s (default alpha = 4^(d+1)) and check that the log^(d-1) coefficient vanishes."""
    alpha = 4 ** (d + 1) if alpha is None else alpha
    with mpmath.workprec(max(mpmath.mp.prec, FIT_CTX.working_bits)):
        shifted = P.shift(BigReal(mpmath.log(mpf(alpha))))
        c = shifted.coeff(d - 1)
        if c is not None:
            tol = max(c.err, mpf(tolerance) if tolerance is not None else mpf(0))
            if abs(c.value) > tol:
                raise NormalizationFailed(
                    f"log^{d - 1} coefficient {mpmath.nstr(c.value, 5)} exceeds its tolerance {mpmath.nstr(tol, 3)}"
                )
        return shifted


@dataclass(frozen=True)
class EllValue:
    """A real number times an integer power of 2 pi i."""

    value: BigReal
    twopii_pow: int

    def __str__(self):
        return f"{mpmath.nstr(self.value.value, 15)}*(2 pi i)^{self.twopii_pow}"

    def to_json(self):
        return {"value": mpmath.nstr(self.value.value, 25), "err": mpmath.nstr(self.value.err, 3),
                "twopii_exponent": self.twopii_pow}


def bottom_row(P: LogPoly, d: int) -> list:
    """(A_0, -1! A_1/2, 2! A_2/2^2, ..., 1) for the l-coefficients A_k of a normalized polynomial.

    Exact coefficients (PeriodEntry) are used where the polynomial carries them.
    """
    out = []
    for k in range(d):
        w = Fraction(math.factorial(k), (-2) ** k)
        if P.exact is not None and P.exact[k] is not None:
            out.append(P.exact[k] * PeriodEntry.coerce(w))
            continue
        r, p = P.ell_coeff(k)
        out.append(None if r is None else EllValue(r * w, p))
    out.append(PeriodEntry.coerce(1))
    return out
