"""Polynomials in l(t) = log(t)/(2 pi i) with exact (2 pi i)-power bookkeeping.

A LogPoly stores real coefficients c_j of log^j(t) together with an overall
factor prefactor * (2 pi i)^(-e).  Since log^j(t) = (2 pi i)^j l(t)^j, the
coefficient of l(t)^j is prefactor * c_j * (2 pi i)^(j - e): a real number
times an integer power of 2 pi i.  Substituting t = alpha * s shifts log(t) by
the real number log(alpha), so normalization never needs complex numerics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mpf

from .hpnum import BigReal


@dataclass(frozen=True)
class LogPoly:
    coeffs: tuple  # c_0..c_d as BigReal, or None where a coefficient is not known
    e: int = 0
    prefactor: Fraction = Fraction(1)
    exact: tuple | None = field(default=None, compare=False)  # exact l-coefficients, PeriodEntry or None

    def __post_init__(self):
        cs = tuple(None if c is None else BigReal.coerce(c) for c in self.coeffs)
        if len(cs) > 7:
            raise ValueError("LogPoly degree is at most 6")
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "prefactor", Fraction(self.prefactor))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, j: int):
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else BigReal(mpf(0))

    def ell_coeff(self, j: int) -> tuple:
        """(real part r, exponent p) with the l^j coefficient equal to r * (2 pi i)^p."""
        c = self.coeff(j)
        if c is None:
            return None, j - self.e
        return c * self.prefactor, j - self.e

    def ell_numeric(self, j: int):
        """The l^j coefficient as a real number when its (2 pi i)-power is even, else None."""
        r, p = self.ell_coeff(j)
        if r is None or p % 2:
            return None
        unit = BigReal(-4 * mpmath.pi**2) ** (abs(p) // 2)
        return r * unit if p >= 0 else r / unit

    def scaled(self, factor: Fraction, de: int = 0) -> "LogPoly":
        """Multiply by factor * (2 pi i)^(-de)."""
        return LogPoly(self.coeffs, self.e + de, self.prefactor * Fraction(factor))

    def shift(self, delta) -> "LogPoly":
        """Substitute log t = log s + delta."""
        delta = BigReal.coerce(delta)
        d = self.degree
        out = []
        for k in range(d + 1):
            acc = BigReal(mpf(0))
            for j in range(k, d + 1):
                c = self.coeffs[j]
                if c is None:
                    acc = None
                    break
                acc = acc + c * math.comb(j, k) * delta ** (j - k)
            out.append(acc)
        return LogPoly(tuple(out), self.e, self.prefactor)

    def loop_average(self) -> "LogPoly":
        """Average over t = eps e^(i theta), theta in [-pi, pi].

        l(t) = l(eps) + theta/(2 pi), and the even moments of theta/(2 pi) are
        4^(-r)/(2r+1), so l^j picks up lower terms (l^3 -> l^3 + l/4).  On the
        log^j coefficients this reads c'_k = sum_r C(k+2r, k) c_{k+2r} (-pi^2)^r/(2r+1).
        """
        d = self.degree
        out = []
        for k in range(d + 1):
            acc = BigReal(mpf(0))
            for r in range((d - k) // 2 + 1):
                c = self.coeffs[k + 2 * r]
                if c is None:
                    acc = None
                    break
                acc = acc + c * math.comb(k + 2 * r, k) * (BigReal(-mpmath.pi**2) ** r) / (2 * r + 1)
            out.append(acc)
        return LogPoly(tuple(out), self.e, self.prefactor)

    def to_json(self) -> dict:
        def fmt(c):
            return None if c is None else {"value": mpmath.nstr(c.value, 30), "err": mpmath.nstr(c.err, 3)}

        out = {
            "log_coeffs": [fmt(c) for c in self.coeffs],
            "prefactor": str(self.prefactor),
            "twopii_exponent": -self.e,
        }
        if self.exact is not None:
            out["exact_ell_coeffs"] = [None if x is None else str(x) for x in self.exact]
        return out

