"""Exact polynomials with rational coefficients in named symbols.

Used for the bookkeeping of the assembled log-polynomials: symbols such as
"g1" (gamma_1), "z2" (zeta(2)) or "X" (nu + nu' - psi) are kept formal, so
cancellations after the normalizing shift can be checked exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                key = tuple(sorted((s, p) for s, p in mono if p))
                clean[key] = clean.get(key, Fraction(0)) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): c})

    @classmethod
    def sym(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    @staticmethod
    def coerce(x) -> "Poly":
        return x if isinstance(x, Poly) else Poly.const(x)

    def __add__(self, other):
        other = Poly.coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-Poly.coerce(other))

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        other = Poly.coerce(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                powers = dict(k1)
                for s, p in k2:
                    powers[s] = powers.get(s, 0) + p
                key = tuple(sorted(powers.items()))
                out[key] = out.get(key, Fraction(0)) + v1 * v2
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, q):
        return self * (Fraction(1) / Fraction(q))

    def __pow__(self, n: int):
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return self.terms == Poly.coerce(other).terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def subs(self, **values) -> "Poly":
        """Substitute polynomials (or numbers) for symbols."""
        out = Poly()
        for mono, c in self.terms.items():
            term = Poly.const(c)
            for s, p in mono:
                term = term * (Poly.coerce(values[s]) ** p if s in values else Poly.sym(s) ** p)
            out = out + term
        return out

    def evaluate(self, values: Mapping):
        """Numerical value given a mapping symbol -> number (BigReal, mpf, float ...)."""
        total = 0
        for mono, c in self.terms.items():
            term = c
            for s, p in mono:
                term = values[s] ** p * term
            total = term + total
        return total

    def coeff_of(self, mono: tuple) -> Fraction:
        return self.terms.get(tuple(sorted(mono)), Fraction(0))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            m = "*".join(s if p == 1 else f"{s}^{p}" for s, p in mono)
            parts.append(f"{c}" + (f"*{m}" if m else ""))
        return " + ".join(parts)


def shift_poly(coeffs: list, delta) -> list:
    """Coefficients of sum_j c_j (x + delta)^j as a polynomial in x."""
    d = len(coeffs) - 1
    out = []
    for k in range(d + 1):
        acc = Poly()
        for j in range(k, d + 1):
            acc = acc + coeffs[j] * Poly.coerce(delta) ** (j - k) * math.comb(j, k)
        out.append(acc)
    return out


def power_series_power(h: list, d: int, order: int) -> list:
    """Coefficients [z^0..z^order] of h(z)^d for a truncated series h."""
    out = [Poly.const(1)] + [Poly() for _ in range(order)]
    for _ in range(d):
        nxt = [Poly() for _ in range(order + 1)]
        for i, a in enumerate(out):
            if a.is_zero():
                continue
            for j in range(order + 1 - i):
                if j < len(h):
                    nxt[i + j] = nxt[i + j] + a * h[j]
        out = nxt
    return out
