"""High-precision reals, zeta values, Li2/Li3, quadrature and the f_n iterated integrals.

mpmath supplies the multiprecision float type and elementary functions
(exp, log, pi).  Zeta values, the polylogarithms and the quadrature rules
are implemented here.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
from mpmath import mpf

from .errors import DomainError, NoConvergence

DEFAULT_BITS = 256
DEFAULT_TARGET = "1e-30"
NESTED_TARGET = "1e-12"


@dataclass(frozen=True)
class PrecisionCtx:
    working_bits: int = DEFAULT_BITS
    target_abs_error: object = DEFAULT_TARGET

    def __post_init__(self):
        if self.working_bits < 64:
            raise ValueError("working_bits must be at least 64")
        with mpmath.workprec(self.working_bits):
            t = mpf(self.target_abs_error)
        if not t > 0:
            raise ValueError("target_abs_error must be positive")
        object.__setattr__(self, "target_abs_error", t)

    @contextmanager
    def work(self):
        with mpmath.workprec(self.working_bits):
            yield

    @property
    def eps(self) -> mpf:
        return mpf(2) ** (-self.working_bits)

    def with_bits(self, bits: int) -> "PrecisionCtx":
        return PrecisionCtx(bits, self.target_abs_error)

    def with_target(self, target) -> "PrecisionCtx":
        return PrecisionCtx(self.working_bits, target)


DEFAULT_CTX = PrecisionCtx()


@dataclass(frozen=True)
class BigReal:
    """A multiprecision value with an absolute error bound."""

    value: mpf
    err: mpf = field(default_factory=lambda: mpf(0))

    def __post_init__(self):
        object.__setattr__(self, "value", mpf(self.value))
        object.__setattr__(self, "err", abs(mpf(self.err)))

    @staticmethod
    def coerce(x) -> "BigReal":
        if isinstance(x, BigReal):
            return x
        if isinstance(x, Fraction):
            return BigReal(mpf(x.numerator) / x.denominator, _ulp(mpf(x.numerator) / x.denominator))
        return BigReal(mpf(x))

    def _round(self, v, e):
        return BigReal(v, e + _ulp(v))

    def __add__(self, other):
        o = BigReal.coerce(other)
        return self._round(self.value + o.value, self.err + o.err)

    __radd__ = __add__

    def __sub__(self, other):
        o = BigReal.coerce(other)
        return self._round(self.value - o.value, self.err + o.err)

    def __rsub__(self, other):
        return BigReal.coerce(other) - self

    def __neg__(self):
        return BigReal(-self.value, self.err)

    def __mul__(self, other):
        o = BigReal.coerce(other)
        e = abs(self.value) * o.err + abs(o.value) * self.err + self.err * o.err
        return self._round(self.value * o.value, e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = BigReal.coerce(other)
        lo = abs(o.value) - o.err
        if lo <= 0:
            raise ZeroDivisionError("divisor interval contains zero")
        q = self.value / o.value
        e = (self.err + abs(q) * o.err) / lo
        return self._round(q, e)

    def __rtruediv__(self, other):
        return BigReal.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = BigReal(mpf(1))
        for _ in range(k):
            out = out * self
        return out

    def __abs__(self):
        return BigReal(abs(self.value), self.err)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"BigReal({mpmath.nstr(self.value, 25)} +/- {mpmath.nstr(self.err, 3)})"

    def contains(self, x, slack=1) -> bool:
        return abs(self.value - mpf(x)) <= slack * self.err


def _ulp(v) -> mpf:
    if not v:
        return mpf(0)
    return abs(v) * mpf(2) ** (1 - mpmath.mp.prec)


def as_mpf(x) -> mpf:
    return x.value if isinstance(x, BigReal) else mpf(x)


# ---------------------------------------------------------------------------
# zeta values


@lru_cache(maxsize=None)
def _borwein_d(n: int) -> tuple[int, ...]:
    # d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), all integers
    out = []
    acc = Fraction(0)
    for i in range(n + 1):
        acc += Fraction(math.factorial(n + i - 1) * 4**i, math.factorial(n - i) * math.factorial(2 * i))
        out.append(acc * n)
    assert all(x.denominator == 1 for x in out)
    return tuple(int(x) for x in out)


def _borwein_terms(bits: int) -> int:
    return int(math.ceil((bits + 16) * math.log(2) / math.log(3 + math.sqrt(8)))) + 2


_ZETA_CACHE: dict = {}


def zeta(n: int, ctx: PrecisionCtx = DEFAULT_CTX) -> BigReal:
    """Riemann zeta at an integer n >= 2 (Borwein's alternating-series acceleration)."""
    if not isinstance(n, int) or n < 2:
        raise DomainError("zeta(n) needs an integer n >= 2")
    key = (n, ctx.working_bits)
    if key not in _ZETA_CACHE:
        _ZETA_CACHE[key] = _zeta_borwein(n, ctx)
    return _ZETA_CACHE[key]


def _zeta_borwein(n: int, ctx: PrecisionCtx) -> BigReal:
    nt = _borwein_terms(ctx.working_bits)
    d = _borwein_d(nt)
    with ctx.work():
        dn = d[nt]
        s = mpf(0)
        for k in range(nt):
            s += (-1) ** k * mpf(d[k] - dn) / mpf(k + 1) ** n
        denom = 1 - mpf(2) ** (1 - n)
        val = -s / (dn * denom)
        bound = 3 / (3 + mpmath.sqrt(8)) ** nt / denom
        return BigReal(val, bound + 8 * _ulp(val))


def zeta1(ctx: PrecisionCtx = DEFAULT_CTX) -> BigReal:
    """The regularized value log 4 that plays the role of zeta(1)."""
    with ctx.work():
        v = 2 * mpmath.log(2)
        return BigReal(v, 4 * _ulp(v))


def zeta_value(n: int, ctx: PrecisionCtx = DEFAULT_CTX) -> BigReal:
    """zeta(n) for n >= 2, log 4 for n = 1, and the Bernoulli values for n <= 0."""
    if n >= 2:
        return zeta(n, ctx)
    if n == 1:
        return zeta1(ctx)
    with ctx.work():
        if n == 0:
            return BigReal(mpf(-1) / 2)
        k = 1 - n  # zeta(1-k) = -B_k / k
        p, q = mpmath.bernfrac(k)
        return BigReal.coerce(Fraction(-p, q * k))


# ---------------------------------------------------------------------------
# polylogarithms on [0, 1]


def _to_mpf(x) -> mpf:
    if isinstance(x, BigReal):
        return x.value
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def _polylog(s: int, w, ctx: PrecisionCtx) -> BigReal:
    with ctx.work():
        w = _to_mpf(w)
        if w < 0 or w > 1:
            raise DomainError(f"Li_{s} is only provided on [0, 1], got {w}")
        if w == 0:
            return BigReal(mpf(0))
        eps = ctx.eps
        if w <= 0.5:
            total = mpf(0)
            k = 1
            wk = w
            while True:
                term = wk / mpf(k) ** s
                total += term
                if term < eps * total:
                    break
                k += 1
                wk *= w
            tail = 2 * wk * w / mpf(k + 1) ** s
            return BigReal(total, tail + 4 * k * _ulp(total))
        # log-series around w = 1:  Li_s(e^mu) = sum_{k != s-1} zeta(s-k) mu^k/k!
        #                               + mu^(s-1)/(s-1)! (H_{s-1} - log(-mu))
        mu = mpmath.log(w)
        total = mpf(0)
        err = mpf(0)
        if mu != 0:
            harmonic = sum(mpf(1) / j for j in range(1, s))
            total += mu ** (s - 1) / math.factorial(s - 1) * (harmonic - mpmath.log(-mu))
        # |zeta(s-k)| <= 4 k!/(2 pi)^k for k >= s, so the tail is geometric in |mu|/(2 pi)
        ratio = abs(mu) / (2 * mpmath.pi)
        k = 0
        muk = mpf(1)
        fact = 1
        while True:
            if k != s - 1:
                z = zeta_value(s - k, ctx)
                total += z.value * muk / fact
                err += z.err * abs(muk) / fact
            k += 1
            muk *= mu
            fact *= k
            if k > s and 8 * ratio**k < eps * max(abs(total), eps):
                break
        tail = 8 * ratio**k
        return BigReal(total, err + tail + 8 * k * _ulp(total))


def li2(w, ctx: PrecisionCtx = DEFAULT_CTX) -> BigReal:
    """Dilogarithm on [0, 1]."""
    return _polylog(2, w, ctx)


def li3(w, ctx: PrecisionCtx = DEFAULT_CTX) -> BigReal:
    """Trilogarithm on [0, 1]."""
    return _polylog(3, w, ctx)


# ---------------------------------------------------------------------------
# quadrature


@lru_cache(maxsize=64)
def _tanh_sinh_level(level: int, prec: int):
    """Nodes of one refinement level on [-1, 1] as (distance to -1, distance to +1, weight).

    Level 0 holds the nodes on the grid of step 1; level k > 0 holds only the new
    odd multiples of 2^-k.  Distances to the endpoints are computed directly so
    that nodes crowding an endpoint keep full relative accuracy.
    """
    with mpmath.workprec(prec):
        h = mpf(2) ** (-level)
        half_pi = mpmath.pi / 2
        # the distances are exact, so nodes may crowd an endpoint far below the
        # working precision; an x^(-1/2) singularity still contributes about
        # sqrt(dist) there, hence the cutoff at 2^(-2 prec)
        tiny = mpf(2) ** (-2 * prec)
        out = []
        j = 0 if level == 0 else 1
        step = 1 if level == 0 else 2
        while True:
            t = j * h
            v = half_pi * mpmath.sinh(t)
            e2v = mpmath.exp(2 * v)
            dist = 2 / (1 + e2v)  # 1 - tanh(v)
            cv = mpmath.cosh(v)
            w = half_pi * mpmath.cosh(t) / (cv * cv)
            if dist < tiny:
                break
            if t == 0:
                out.append((mpf(1), mpf(1), w))
            else:
                out.append((2 - dist, dist, w))
                out.append((dist, 2 - dist, w))
            j += step
        return tuple(out)


@lru_cache(maxsize=64)
def _gauss_legendre(n: int, prec: int):
    """Nodes and weights on [-1, 1] by Newton iteration on P_n."""
    with mpmath.workprec(prec + 20):
        nodes = []
        for i in range(1, n + 1):
            x = mpmath.cos(mpmath.pi * (i - mpf(1) / 4) / (n + mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpf(2) ** (-prec - 10):
                    break
            p0, p1 = mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append((1 + x, 1 - x, w))
        return tuple(nodes)


def _tolerance(ctx: PrecisionCtx, rel_tol, current) -> mpf:
    tol = ctx.target_abs_error
    if rel_tol is not None:
        tol = max(tol, mpf(rel_tol) * abs(current))
    return tol


def _tanh_sinh(g: Callable, rel_tol, prec: int, max_level: int, ctx):
    """g(dl, dr) on [-1, 1] given the distances to both ends."""
    total = mpf(0)
    for dl, dr, w in _tanh_sinh_level(0, prec):
        total += w * g(dl, dr)
    prev = total  # this is the level-0 sum (step 1)
    for level in range(1, max_level + 1):
        h = mpf(2) ** (-level)
        for dl, dr, w in _tanh_sinh_level(level, prec):
            total += w * g(dl, dr)
        est = total * h
        diff = abs(est - prev)
        if level >= 3 and diff <= _tolerance(ctx, rel_tol, est):
            return est, diff
        prev = est
    raise NoConvergence(f"tanh-sinh did not converge by level {max_level} (last change {mpmath.nstr(diff, 5)})")


def _gauss(g: Callable, rel_tol, prec: int, max_nodes: int, ctx):
    prev = None
    n = 8
    while n <= max_nodes:
        est = mpf(0)
        for dl, dr, w in _gauss_legendre(n, prec):
            est += w * g(dl, dr)
        if prev is not None:
            diff = abs(est - prev)
            if diff <= _tolerance(ctx, rel_tol, est):
                return est, diff
        prev = est
        n *= 2
    raise NoConvergence(f"Gauss-Legendre did not converge with {max_nodes} nodes")


def quadrature(
    f: Callable[[mpf], mpf],
    a,
    b,
    ctx: PrecisionCtx = DEFAULT_CTX,
    singular_endpoints: Sequence[bool] = (True, True),
    breakpoints: Sequence = (),
    rel_tol=None,
    max_level: int = 12,
) -> BigReal:
    """Integral of f over [a, b]; either end may be +-inf.

    Intervals with a flagged (or infinite) endpoint use double-exponential
    (tanh-sinh) quadrature, which absorbs integrable endpoint singularities
    such as inverse square roots.  Intervals with two regular endpoints use
    Gauss-Legendre with doubling node counts.  The error estimate is the change
    between the last two refinements.  Interior breakpoints split the range.
    """
    with ctx.work():
        a = mpmath.mpmathify(as_mpf(a) if isinstance(a, BigReal) else a)
        b = mpmath.mpmathify(as_mpf(b) if isinstance(b, BigReal) else b)
        if a == b:
            return BigReal(mpf(0))
        if a > b:
            r = quadrature(f, b, a, ctx, tuple(reversed(singular_endpoints)), breakpoints, rel_tol, max_level)
            return -r
        pts = [a] + sorted(mpmath.mpmathify(p) for p in breakpoints if a < p < b) + [b]
        total = mpf(0)
        err = mpf(0)
        # guard bits so that abscissas next to a finite endpoint keep their offset
        prec = ctx.working_bits + 40
        for i, (lo, hi) in enumerate(zip(pts[:-1], pts[1:])):
            sing_lo = singular_endpoints[0] if i == 0 else False
            sing_hi = singular_endpoints[1] if i == len(pts) - 2 else False
            v, e = _integrate_piece(f, lo, hi, sing_lo, sing_hi, prec, rel_tol, max_level, ctx)
            total += v
            err += e
        return BigReal(total, err + 16 * _ulp(total))


def _integrate_piece(f, lo, hi, sing_lo, sing_hi, prec, rel_tol, max_level, ctx):
    inf = mpmath.inf
    if lo == -inf and hi == inf:
        v1, e1 = _integrate_piece(f, lo, mpf(0), True, False, prec, rel_tol, max_level, ctx)
        v2, e2 = _integrate_piece(f, mpf(0), hi, False, True, prec, rel_tol, max_level, ctx)
        return v1 + v2, e1 + e2
    with mpmath.workprec(prec):
        if hi == inf:
            # u = lo + x/(1-x), x = dl/2 in [0, 1)
            def g(dl, dr):
                return f(lo + dl / dr) * 2 / (dr * dr)
        elif lo == -inf:
            def g(dl, dr):
                return f(hi - dr / dl) * 2 / (dl * dl)
        else:
            r = (hi - lo) / 2
            dropped = []

            def g(dl, dr):
                x = lo + r * dl if dl <= dr else hi - r * dr
                if x == lo or x == hi:
                    # the node rounds onto an endpoint and is skipped
                    dropped.append(x)
                    return mpf(0)
                return f(x) * r
        if hi == inf or lo == -inf or sing_lo or sing_hi:
            v, e = _tanh_sinh(g, rel_tol, prec, max_level, ctx)
            if lo != -inf and hi != inf and dropped:
                # an inverse square root at a skipped endpoint leaves about 2^(-prec/2)
                e += abs(v) * mpf(2) ** (8 - prec // 2)
            return v, e
        return _gauss(g, rel_tol, ctx.working_bits, 256, ctx)


# ---------------------------------------------------------------------------
# the iterated integrals f_n


def _check_u(n: int, u) -> mpf:
    if n not in (0, 1, 2, 3) and not (isinstance(n, int) and n >= 0):
        raise DomainError("n must be a non-negative integer")
    u = _to_mpf(u)
    if u < 0 or u > 1 or (u == 0 and n == 0):
        raise DomainError(f"f_{n}(u) needs u in (0, 1] (u = 0 allowed for n >= 1), got {u}")
    return u


def f_n(n: int, u, ctx: PrecisionCtx | None = None, mode: str = "recursion") -> BigReal:
    """f_0(u) = 1/u - 1 and f_n(u) = integral_1^u (1/(v-1) + 1/(v+1)) f_{n-1}(v) dv.

    ``mode="recursion"`` integrates numerically level by level (Gauss-Legendre,
    relative tolerance so that f_{n-1}(v)/(v-1) stays accurate near v = 1);
    ``mode="closed"`` uses the polylogarithm expressions for n <= 3.
    f_n(0) equals gamma_n.
    """
    ctx = ctx or PrecisionCtx(128, NESTED_TARGET)
    with ctx.work():
        u = _check_u(n, u)
        if mode == "closed":
            return _f_closed(n, u, ctx)
        if mode != "recursion":
            raise ValueError(f"unknown mode {mode!r}")
        rel = ctx.target_abs_error / 16
        return _f_recursive(n, u, ctx, rel)


def _f_recursive(n: int, u, ctx, rel) -> BigReal:
    if n == 0:
        return BigReal(1 / u - 1)
    if u == 1:
        return BigReal(mpf(0))

    def integrand(v):
        inner = _f_recursive(n - 1, v, ctx, rel).value
        return (1 / (v - 1) + 1 / (v + 1)) * inner

    r = quadrature(integrand, mpf(1), u, ctx, singular_endpoints=(False, False), rel_tol=rel)
    # the nested levels each contribute at most rel * |value|
    return BigReal(r.value, r.err + n * rel * abs(r.value))


def _f_closed(n: int, u, ctx) -> BigReal:
    if n == 0:
        return BigReal(1 / u - 1)
    if u == 1:
        return BigReal(mpf(0))
    w = (u + 1) / 2
    lw = mpmath.log(w)
    if n == 1:
        return BigReal(-2 * (mpmath.log(u + 1) - mpmath.log(2)))
    if n == 2:
        return li2(1 - w, ctx) * 2 - lw**2
    if n == 3:
        z2, z3 = zeta(2, ctx), zeta(3, ctx)
        return (
            li3(1 - w, ctx) * 2
            - li3(w, ctx) * 2
            + z3 * 2
            + z2 * (2 * lw)
            - mpmath.log(1 - w) * lw**2
            - lw**3 / 3
        )
    raise DomainError("closed forms are available for n <= 3")


# ---------------------------------------------------------------------------
# the polylogarithm antiderivative identities


@dataclass
class PolylogLemmaReport:
    residuals: dict
    tolerance: mpf

    @property
    def max_residual(self) -> mpf:
        return max(self.residuals.values()) if self.residuals else mpf(0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def _antiderivative_a(w, ctx):
    # primitive of log(w)^2 / (w - 1)
    lw = mpmath.log(w)
    return (mpmath.log(1 - w) * lw**2 + 2 * lw * li2(w, ctx).value - 2 * li3(w, ctx).value)


def _integrand_a(w):
    return mpmath.log(w) ** 2 / (w - 1)


def _antiderivative_b(w, ctx):
    # primitive of log(w) log(1 - w) / w
    return li3(w, ctx).value - li2(w, ctx).value * mpmath.log(w)


def _integrand_b(w):
    return mpmath.log(w) * mpmath.log(1 - w) / w


def verify_polylog_integral_lemmas(ctx: PrecisionCtx = DEFAULT_CTX,
                                   samples=("0.2", "0.5", "0.8")) -> PolylogLemmaReport:
    """Residuals of the two antiderivative identities and of the Li2 reflection formula.

    Each identity is checked twice: central finite differences of the primitive
    against the integrand, and quadrature of the integrand from the anchor 1/2
    against the difference of primitives.
    """
    res = {}
    with ctx.work():
        h = mpf(2) ** (-(ctx.working_bits // 4))
        z2 = zeta(2, ctx).value
        anchor = mpf(1) / 2
        for s in samples:
            w = mpf(s)
            for label, F, fw in (
                ("log2/(w-1)", _antiderivative_a, _integrand_a),
                ("log*log(1-w)/w", _antiderivative_b, _integrand_b),
            ):
                fd = (F(w + h, ctx) - F(w - h, ctx)) / (2 * h)
                res[f"derivative {label} at {s}"] = abs(fd - fw(w))
                integral = quadrature(fw, anchor, w, ctx, singular_endpoints=(False, False))
                res[f"integral {label} at {s}"] = abs(integral.value - (F(w, ctx) - F(anchor, ctx)))
            refl = li2(w, ctx).value + li2(1 - w, ctx).value + mpmath.log(w) * mpmath.log(1 - w) - z2
            res[f"reflection at {s}"] = abs(refl)
        # the finite differences are O(h^2) accurate
        tol = max(ctx.target_abs_error, 100 * h * h)
    return PolylogLemmaReport(res, tol)
