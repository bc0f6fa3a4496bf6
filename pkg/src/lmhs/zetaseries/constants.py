"""The constants gamma_n, gamma~_n and the five multi-index constants.

Closed forms are kept as exact dictionaries {partition: coefficient}, where a
partition (p_1, ..., p_r) stands for zeta(p_1)...zeta(p_r) and zeta(1) means
log 4.  Products of even zeta values are compared after rewriting every
zeta(2k) as a rational multiple of pi^(2k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import mpmath
from mpmath import mpf

from ..errors import DomainError
from ..hpnum import DEFAULT_CTX, BigReal, PrecisionCtx, zeta_value
from .series import DenFactor, SeriesSpec, SeriesValue, eval_series

HALF = Fraction(1, 2)

Partition = tuple  # non-increasing tuple of positive integers

# closed forms as printed, including the regrouped even-zeta coefficients
GAMMA_CLOSED: dict[int, dict[Partition, Fraction]] = {
    1: {(1,): Fraction(1)},
    2: {(2,): Fraction(1), (1, 1): Fraction(-1, 2)},
    3: {(3,): Fraction(2), (2, 1): Fraction(-1), (1, 1, 1): Fraction(1, 6)},
    4: {(4,): Fraction(9, 4), (3, 1): Fraction(-2), (2, 1, 1): Fraction(1, 2), (1, 1, 1, 1): Fraction(-1, 24)},
    5: {
        (5,): Fraction(6),
        (4, 1): Fraction(-9, 4),
        (3, 2): Fraction(-2),
        (3, 1, 1): Fraction(1),
        (2, 1, 1, 1): Fraction(-1, 6),
        (1, 1, 1, 1, 1): Fraction(1, 120),
    },
    6: {
        (6,): Fraction(79, 16),
        (5, 1): Fraction(-6),
        (4, 1, 1): Fraction(9, 8),
        (3, 3): Fraction(-2),
        (3, 2, 1): Fraction(2),
        (3, 1, 1, 1): Fraction(-1, 3),
        (2, 1, 1, 1, 1): Fraction(1, 24),
        (1, 1, 1, 1, 1, 1): Fraction(-1, 720),
    },
}

GAMMA_TILDE_CLOSED: dict[int, dict[Partition, Fraction]] = {
    0: {(): Fraction(1)},
    1: {(1,): Fraction(1)},
    2: {(2,): Fraction(1), (1, 1): Fraction(1, 2)},
    3: {(3,): Fraction(2), (2, 1): Fraction(1), (1, 1, 1): Fraction(1, 6)},
}


@dataclass(frozen=True)
class PartitionCoeff:
    partition: Partition
    coefficient: Fraction


# ---------------------------------------------------------------------------
# partitions and the coefficient rules


def partitions(d: int, largest: int | None = None):
    """Partitions of d as non-increasing tuples."""
    largest = d if largest is None else largest
    if d == 0:
        yield ()
        return
    for first in range(min(d, largest), 0, -1):
        for rest in partitions(d - first, first):
            yield (first,) + rest


def single_coeff(p: int) -> Fraction:
    return Fraction(1) if p == 1 else Fraction(2**p - 2, p)


def partition_coeffs(d: int) -> list[PartitionCoeff]:
    """Coefficients of zeta(p_1)...zeta(p_r) in gamma_d by the multiplicity rules.

    A part equal to 1 carries c_1 = 1, so the zeta(1)^c block contributes
    (-1)^c / c! times the coefficient of the remaining parts, and the whole
    rule collapses to (-1)^(r-1) prod c_{p_i} / prod m_k!.
    """
    if not 1 <= d <= 8:
        raise DomainError("partition_coeffs is provided for 1 <= d <= 8")
    out = []
    for part in partitions(d):
        coeff = Fraction((-1) ** (len(part) - 1))
        for p in part:
            coeff *= single_coeff(p)
        for p in set(part):
            coeff /= math.factorial(part.count(p))
        out.append(PartitionCoeff(part, coeff))
    return out


# ---------------------------------------------------------------------------
# exact comparison of zeta polynomials


def _even_zeta_over_pi(k: int) -> Fraction:
    # zeta(2k) = (-1)^(k+1) B_2k (2 pi)^(2k) / (2 (2k)!)
    p, q = mpmath.bernfrac(2 * k)
    return Fraction((-1) ** (k + 1) * int(p) * 2 ** (2 * k), 2 * int(q) * math.factorial(2 * k))


def reduce_even_zetas(poly: Mapping[Partition, Fraction]) -> dict[tuple, Fraction]:
    """Rewrite zeta(2k) as rational * pi^(2k); keys become (pi power, odd parts)."""
    out: dict[tuple, Fraction] = {}
    for part, c in poly.items():
        pi_pow = 0
        odd = []
        for p in part:
            if p > 1 and p % 2 == 0:
                c = c * _even_zeta_over_pi(p // 2)
                pi_pow += p
            else:
                odd.append(p)
        key = (pi_pow, tuple(sorted(odd, reverse=True)))
        out[key] = out.get(key, Fraction(0)) + c
    return {k: v for k, v in out.items() if v}


def same_zeta_polynomial(a: Mapping, b: Mapping) -> bool:
    return reduce_even_zetas(a) == reduce_even_zetas(b)


def evaluate_zeta_polynomial(poly: Mapping[Partition, Fraction], ctx: PrecisionCtx = DEFAULT_CTX) -> BigReal:
    with ctx.work():
        total = BigReal(mpf(0))
        for part, c in poly.items():
            term = BigReal.coerce(c)
            for p in part:
                term = term * zeta_value(p, ctx)
            total = total + term
        return total


# ---------------------------------------------------------------------------
# gamma_n and gamma~_n


def _gamma_ratio_coeffs(a, b, terms: int) -> list:
    """C_j with Gamma(z+a)/Gamma(z+b) ~ z^(a-b) sum_j C_j z^(-j) as z -> oo."""
    # log of the ratio minus (a-b) log z = sum_n (-1)^(n+1) (B_{n+1}(a) - B_{n+1}(b)) / (n (n+1) z^n)
    L = [mpf(0)] + [
        (-1) ** (n + 1) * (mpmath.bernpoly(n + 1, a) - mpmath.bernpoly(n + 1, b)) / (n * (n + 1))
        for n in range(1, terms)
    ]
    # exponentiate the power series in 1/z: C' = L' C
    C = [mpf(1)] + [mpf(0)] * (terms - 1)
    for j in range(1, terms):
        C[j] = sum(k * L[k] * C[j - k] for k in range(1, j + 1)) / j
    return C


_HEAD = 200
_TAIL_TERMS = 40


def _pochhammer_terms(n_max: int):
    p = mpf(1)
    for k in range(n_max):
        yield k, p
        p = p * (2 * k + 1) / (2 * k + 2)


def gamma_n(n: int, mode: str = "direct", ctx: PrecisionCtx = DEFAULT_CTX) -> BigReal:
    """gamma_n = sum_{k>=1} (1/2)_k / k^n, by direct summation or from the closed form.

    The direct sum adds the first 200 terms exactly and the remainder through
    the large-k expansion of (1/2)_k, whose terms are Hurwitz zeta values.
    """
    if not (isinstance(n, int) and 1 <= n <= 6):
        raise DomainError("gamma_n is provided for n = 1..6")
    if mode == "closed":
        return evaluate_zeta_polynomial(GAMMA_CLOSED[n], ctx)
    if mode != "direct":
        raise ValueError(f"unknown mode {mode!r}")
    with ctx.work():
        head = mpmath.fsum(p / mpf(k) ** n for k, p in _pochhammer_terms(_HEAD) if k >= 1)
        # (1/2)_k = Gamma(k + 1/2) / (sqrt(pi) Gamma(k + 1))
        C = _gamma_ratio_coeffs(mpf(1) / 2, mpf(1), _TAIL_TERMS)
        tail_terms = [C[j] * mpmath.zeta(n + mpf(1) / 2 + j, _HEAD) for j in range(_TAIL_TERMS)]
        tail = mpmath.fsum(tail_terms) / mpmath.sqrt(mpmath.pi)
        err = abs(tail_terms[-1]) * 4 + 64 * mpf(2) ** (-ctx.working_bits) * abs(head)
        return BigReal(head + tail, err)


def gamma_tilde_n(n: int, mode: str = "direct", ctx: PrecisionCtx = DEFAULT_CTX) -> BigReal:
    """gamma~_n = (1/pi) sum_{k>=0} (1/2)_k / (k + 1/2)^(n+1)."""
    if not (isinstance(n, int) and 0 <= n <= 3):
        raise DomainError("gamma_tilde_n is provided for n = 0..3")
    if mode == "closed":
        return evaluate_zeta_polynomial(GAMMA_TILDE_CLOSED[n], ctx)
    if mode != "direct":
        raise ValueError(f"unknown mode {mode!r}")
    with ctx.work():
        h = mpf(1) / 2
        head = mpmath.fsum(p / (k + h) ** (n + 1) for k, p in _pochhammer_terms(_HEAD))
        # with z = k + 1/2, (1/2)_k = Gamma(z) / (sqrt(pi) Gamma(z + 1/2))
        C = _gamma_ratio_coeffs(mpf(0), h, _TAIL_TERMS)
        tail_terms = [C[j] * mpmath.zeta(n + 1 + h + j, _HEAD + h) for j in range(_TAIL_TERMS)]
        tail = mpmath.fsum(tail_terms) / mpmath.sqrt(mpmath.pi)
        err = (abs(tail_terms[-1]) * 4 + 64 * mpf(2) ** (-ctx.working_bits) * abs(head)) / mpmath.pi
        return BigReal((head + tail) / mpmath.pi, err)


# ---------------------------------------------------------------------------
# series specs


def _spec(n, poch, den, leaves=None, pi_pow=-1, names=None) -> SeriesSpec:
    return SeriesSpec(
        n, tuple(poch), tuple(DenFactor(c, o) for c, o in den), Fraction(1), pi_pow, leaves, names
    )


def gamma_spec(n: int) -> SeriesSpec:
    return _spec(1, [(1,)], [((1,), 0)] * n, pi_pow=0, names=("k",))


def gamma_tilde_spec(n: int) -> SeriesSpec:
    return _spec(1, [(1,)], [((1,), HALF)] * (n + 1), names=("k",))


_UNIT2 = [(1, 0), (0, 1)]
_UNIT4 = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]

# index order (a, b) and (a, b, k1, k2)
NAMED_SPECS: dict[str, SeriesSpec] = {
    "nu": _spec(
        4, _UNIT4,
        [((-1, 1, 0, 0), HALF), ((0, 1, 1, 0), HALF), ((1, 0, 1, 0), 0), ((1, 0, 0, 1), 0)],
        leaves=(1, 3), names=("a", "b", "k1", "k2"),
    ),
    "nu_prime": _spec(
        4, _UNIT4,
        [((-1, 1, 0, 0), HALF), ((0, 1, 1, 0), HALF), ((0, 1, 0, 1), HALF), ((1, 0, 1, 0), 0)],
        leaves=(0, 3), names=("a", "b", "k1", "k2"),
    ),
    "beta": _spec(2, _UNIT2, [((0, 1), HALF), ((1, 0), 0), ((1, 1), HALF)], leaves=(1,), names=("a", "b")),
    "delta": _spec(2, _UNIT2, [((0, 1), HALF), ((0, 1), HALF), ((1, 1), HALF)], leaves=(0,), names=("a", "b")),
    "psi": _spec(
        2, _UNIT2, [((0, 1), HALF), ((1, 0), 0), ((1, 0), 0), ((1, 1), HALF)], leaves=(1,), names=("a", "b")
    ),
}


def named_constant(name: str, ctx: PrecisionCtx | None = None, cutoffs=None) -> SeriesValue:
    if name not in NAMED_SPECS:
        raise KeyError(f"unknown constant {name!r}; known: {sorted(NAMED_SPECS)}")
    return eval_series(NAMED_SPECS[name], ctx, cutoffs)
