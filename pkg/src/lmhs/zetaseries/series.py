"""Multi-index Pochhammer-ratio series with primed-sum semantics.

A series is described by a :class:`SeriesSpec`:

    scale * sum' prod_i (1/2)_{P_i(k)} / prod_j (D_j(k) + o_j)

over non-negative integer tuples k, where (1/2)_n = C(2n, n)/4^n, the P_i and
D_j are integer linear forms and o_j is 0 or 1/2.  Lattice points where a
denominator factor vanishes or a Pochhammer argument is negative are skipped.

Evaluation splits the indices into *leaves* and *outer* indices.  A leaf is
an index whose only Pochhammer factor is (1/2)_k itself and which enters its
denominator factors with coefficient +-1; its sum is done in closed form
through the beta kernel

    G(s) = sum_k (1/2)_k / (k + s) = sqrt(pi) Gamma(s) / Gamma(s + 1/2)

and partial fractions.  The outer indices are summed over boxes [0, K)^r for a
ladder of cutoffs K, and the box sums are extrapolated to K -> oo by Richardson
extrapolation in h = K^(-1/2).  All of this runs in float64; rounding stays
around 1e-13, far below the tolerances the series are used at.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from scipy.special import bernoulli

from ..errors import DivergenceDetected, DomainError
from ..hpnum import BigReal

DEFAULT_LADDER = tuple(2**e for e in range(8, 15))
# boxes of three or more outer indices are only affordable at small K
DEFAULT_LADDER_3D = tuple(2**e for e in range(3, 8))
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class DenFactor:
    coeffs: tuple[int, ...]
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        off = Fraction(self.offset)
        if off not in (0, HALF):
            raise ValueError("denominator offsets must be 0 or 1/2")
        object.__setattr__(self, "offset", off)


@dataclass(frozen=True)
class SeriesSpec:
    num_indices: int
    poch: tuple[tuple[int, ...], ...]
    den: tuple[DenFactor, ...]
    scale_rat: Fraction = Fraction(1)
    pi_pow: int = 0
    leaves: tuple[int, ...] | None = None
    names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.num_indices
        if not 1 <= n <= 4:
            raise ValueError("a series has 1 to 4 indices")
        poch = tuple(tuple(int(c) for c in p) for p in self.poch)
        den = tuple(d if isinstance(d, DenFactor) else DenFactor(*d) for d in self.den)
        for form in poch + tuple(d.coeffs for d in den):
            if len(form) != n:
                raise ValueError(f"linear form {form} does not have {n} coefficients")
        object.__setattr__(self, "poch", poch)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "scale_rat", Fraction(self.scale_rat))
        if self.leaves is not None:
            leaves = tuple(sorted(set(int(i) for i in self.leaves)))
            for i in leaves:
                if not _leaf_ok(self, i):
                    raise ValueError(f"index {i} cannot be summed as a leaf")
            object.__setattr__(self, "leaves", leaves)

    def to_json(self) -> dict:
        out = {
            "indices": self.num_indices,
            "poch": [list(p) for p in self.poch],
            "den": [{"coeffs": list(d.coeffs), "offset": str(d.offset)} for d in self.den],
            "scale": {"rat": str(self.scale_rat), "pi_pow": self.pi_pow},
        }
        if self.leaves is not None:
            out["leaves"] = list(self.leaves)
        return out

    @classmethod
    def from_json(cls, data) -> "SeriesSpec":
        if isinstance(data, str):
            data = json.loads(data)
        scale = data.get("scale", {})
        return cls(
            num_indices=int(data["indices"]),
            poch=tuple(tuple(p) for p in data["poch"]),
            den=tuple(DenFactor(tuple(d["coeffs"]), Fraction(d.get("offset", "0"))) for d in data["den"]),
            scale_rat=Fraction(scale.get("rat", "1")),
            pi_pow=int(scale.get("pi_pow", 0)),
            leaves=tuple(data["leaves"]) if data.get("leaves") is not None else None,
        )

    @property
    def scale(self) -> float:
        return float(self.scale_rat) * math.pi**self.pi_pow


@dataclass
class SeriesValue:
    value: BigReal
    truncation_cutoff: tuple  # per index; None for indices summed in closed form
    tail_estimate: BigReal
    ladder: tuple = ()
    raw: tuple = ()

    def to_json(self) -> dict:
        return {
            "value": _fmt(self.value.value),
            "error": _fmt(self.value.err),
            "truncation_cutoff": list(self.truncation_cutoff),
            "tail_estimate": _fmt(self.tail_estimate.value),
        }


def _fmt(x) -> str:
    return f"{float(x):.16e}"


# ---------------------------------------------------------------------------
# leaf detection


def _leaf_ok(spec: SeriesSpec, i: int) -> bool:
    unit = tuple(1 if j == i else 0 for j in range(spec.num_indices))
    involving = [p for p in spec.poch if p[i] != 0]
    if involving != [unit]:
        return False
    dens = [d for d in spec.den if d.coeffs[i] != 0]
    if not dens or any(abs(d.coeffs[i]) != 1 for d in dens):
        return False
    # identical factors would need a kernel for roots of multiplicity >= 2 everywhere
    return len({(d.coeffs, d.offset) for d in dens}) == len(dens)


def choose_leaves(spec: SeriesSpec) -> tuple[int, ...]:
    """Greedy choice of indices to sum in closed form, keeping one outer index."""
    if spec.leaves is not None:
        return spec.leaves
    chosen: list[int] = []
    for i in range(spec.num_indices):
        if len(chosen) + 1 >= spec.num_indices:
            break
        if not _leaf_ok(spec, i):
            continue
        shares = any(d.coeffs[i] and d.coeffs[j] for d in spec.den for j in chosen)
        if not shares:
            chosen.append(i)
    return tuple(chosen)


# ---------------------------------------------------------------------------
# float64 tables


class _Tables:
    """p_k = (1/2)_k and d_k = digamma(k+1) - digamma(k+1/2) for 0 <= k < size."""

    def __init__(self):
        self.size = 0
        self.p = np.empty(0)
        self.d = np.empty(0)

    def ensure(self, n: int):
        if n <= self.size:
            return
        size = max(n, 2 * self.size, 1024)
        k = np.arange(1, size, dtype=np.float64)
        self.p = np.concatenate(([1.0], np.cumprod((2 * k - 1) / (2 * k))))
        self.d = _digamma_gap(size)
        self.size = size


def _digamma_gap(size: int) -> np.ndarray:
    # digamma(j+1) - digamma(j+1/2); exact recursion for small j, asymptotic series beyond
    small = 64
    out = np.empty(size)
    acc = Fraction(0)
    base = 2 * math.log(2)
    for j in range(min(small, size)):
        if j:
            acc += Fraction(1, j) - Fraction(2, 2 * j - 1)
        out[j] = base + float(acc)
    if size > small:
        j = np.arange(small, size, dtype=np.float64)
        x, y = j + 1.0, j + 0.5
        val = np.log1p(0.5 / y) - 0.5 / x + 0.5 / y
        b = bernoulli(12)
        for k in range(1, 7):
            val -= b[2 * k] / (2 * k) * (x ** (-2 * k) - y ** (-2 * k))
        out[small:] = val
    return out


_TABLES = _Tables()


def _kernel_G(t2: np.ndarray, tab: _Tables) -> np.ndarray:
    """sum_k p_k/(k + s) for s = t2/2, with the k = -s term dropped when s is a non-positive integer."""
    out = np.zeros(t2.shape)
    odd = (t2 & 1) == 1
    m = (t2 - 1) // 2
    pos_half = odd & (t2 > 0)
    out[pos_half] = math.pi * tab.p[m[pos_half]]
    # negative half-integers: Gamma(s + 1/2) has a pole, the kernel vanishes
    even = ~odd
    j = t2 // 2
    pos_int = even & (t2 > 0)
    jj = j[pos_int]
    out[pos_int] = 1.0 / (jj * tab.p[jj])
    skip = even & (t2 <= 0)
    jj = -j[skip]
    out[skip] = tab.p[jj] * tab.d[jj]
    return out


def _kernel_D(t2: np.ndarray, tab: _Tables) -> np.ndarray:
    """sum_k p_k/(k + s)^2 for s = t2/2 (s must not be a non-positive integer)."""
    out = np.zeros(t2.shape)
    odd = (t2 & 1) == 1
    pos_half = odd & (t2 > 0)
    m = (t2[pos_half] - 1) // 2
    out[pos_half] = math.pi * tab.p[m] * tab.d[m]
    neg_half = odd & (t2 < 0)
    m = (-t2[neg_half] - 1) // 2
    out[neg_half] = math.pi / ((m + 1) * tab.p[m + 1])
    even = ~odd
    pos_int = even & (t2 > 0)
    j = t2[pos_int] // 2
    out[pos_int] = (1.0 / j - tab.d[j]) / (j * tab.p[j])
    if np.any(even & (t2 <= 0)):
        raise DomainError("double root at a skipped lattice point")
    return out


# ---------------------------------------------------------------------------
# evaluation of one box of outer points


class _Plan:
    def __init__(self, spec: SeriesSpec):
        self.spec = spec
        self.leaves = choose_leaves(spec)
        self.outer = tuple(i for i in range(spec.num_indices) if i not in self.leaves)
        leafset = set(self.leaves)
        self.outer_poch = [p for p in spec.poch if not any(p[i] for i in leafset)]
        self.outer_den = [d for d in spec.den if not any(d.coeffs[i] for i in leafset)]
        self.leaf_den = {i: [d for d in spec.den if d.coeffs[i]] for i in self.leaves}

    def terms(self, grids: Sequence[np.ndarray], tab: _Tables) -> np.ndarray:
        """Term values at the outer points given by broadcastable integer grids."""
        def form(coeffs, twice=False):
            acc = 0
            for pos, idx in enumerate(self.outer):
                c = coeffs[idx]
                if c:
                    acc = acc + (2 * c if twice else c) * grids[pos]
            return acc

        shape = np.broadcast(*grids).shape
        val = np.ones(shape)
        keep = np.ones(shape, dtype=bool)
        for p in self.outer_poch:
            arg = np.broadcast_to(form(p), shape)
            keep &= arg >= 0
            val *= tab.p[np.where(arg >= 0, arg, 0)]
        for d in self.outer_den:
            t2 = np.broadcast_to(form(d.coeffs, twice=True) + int(2 * d.offset), shape)
            keep &= t2 != 0
            val /= np.where(t2 != 0, t2, 1) / 2.0
        for leaf in self.leaves:
            val *= self._leaf_sum(leaf, form, shape, tab)
        return np.where(keep, val, 0.0)

    def _leaf_sum(self, leaf, form, shape, tab) -> np.ndarray:
        # factor c*k + r with c = +-1 equals c*(k + c*r); work with doubled shifts
        sign = 1
        shifts = []
        for d in self.leaf_den[leaf]:
            c = d.coeffs[leaf]
            sign *= c
            r2 = np.broadcast_to(form(d.coeffs, twice=True) + int(2 * d.offset), shape)
            shifts.append(c * r2)
        if len(shifts) == 1:
            return sign * _kernel_G(shifts[0], tab)
        if len(shifts) == 2:
            s1, s2 = shifts
            g1 = _kernel_G(s1, tab) - _skip_correction(s1, [s2], tab)
            g2 = _kernel_G(s2, tab) - _skip_correction(s2, [s1], tab)
            diff = s2 - s1
            same = diff == 0
            with np.errstate(divide="ignore", invalid="ignore"):
                out = (g1 - g2) / (np.where(same, 1, diff) / 2.0)
            if np.any(same):
                out = np.where(same, _kernel_D(np.where(same, s1, 1), tab), out)
            return sign * out
        # distinct shifts: sum_j A_j G(s_j) with A_j = prod_{i != j} 1/(s_i - s_j)
        out = np.zeros(shape)
        for j, sj in enumerate(shifts):
            others = [s for i, s in enumerate(shifts) if i != j]
            coef = np.ones(shape)
            for si in others:
                gap = si - sj
                if np.any(gap == 0):
                    raise DomainError("repeated roots among three or more leaf factors")
                coef /= gap / 2.0
            out += coef * (_kernel_G(sj, tab) - _skip_correction(sj, others, tab))
        return sign * out


def _skip_correction(t2: np.ndarray, others: list, tab: _Tables) -> np.ndarray:
    # terms k = m dropped because another factor vanishes there: p_m/(m + s)
    out = np.zeros(t2.shape)
    for o in others:
        hit = ((o & 1) == 0) & (o <= 0) & (o != t2)
        if np.any(hit):
            m = np.where(hit, -o // 2, 0)
            denom = np.where(hit, 2 * m + t2, 2) / 2.0
            out += np.where(hit, tab.p[m] / denom, 0.0)
    return out


def _box_sums(plan: _Plan, ladder: Sequence[int]) -> list[float]:
    """Sums over [0, K)^r for every K in the ladder."""
    kmax = max(ladder)
    r = len(plan.outer)
    tab = _TABLES
    span = max(sum(abs(c) for c in form) for form in plan.spec.poch + tuple(d.coeffs for d in plan.spec.den)) + 2
    tab.ensure(span * kmax + 16)
    sums = [0.0] * len(ladder)
    if r == 1:
        k = np.arange(kmax)
        cs = np.cumsum(plan.terms([k], tab))
        return [float(cs[K - 1]) if K > 0 else 0.0 for K in ladder]
    if r == 2:
        cols = np.arange(kmax)[None, :]
        block = max(1, (1 << 22) // max(kmax, 1))
        parts = [[] for _ in ladder]
        for start in range(0, kmax, block):
            rows = np.arange(start, min(kmax, start + block))[:, None]
            cs = np.cumsum(plan.terms([rows, cols], tab), axis=1)
            for i, K in enumerate(ladder):
                if K == 0 or start >= K:
                    continue
                parts[i].append(cs[: K - start, K - 1].sum())
        return [math.fsum(p) for p in parts]
    # three or more outer indices: loop over the first, vectorize the rest
    for i, K in enumerate(ladder):
        if K == 0:
            continue
        rest = list(np.meshgrid(*([np.arange(K)] * (r - 1)), indexing="ij"))
        acc = []
        for a in range(K):
            acc.append(plan.terms([np.full(rest[0].shape, a)] + rest, tab).sum())
        sums[i] = math.fsum(acc)
    return sums


# ---------------------------------------------------------------------------
# extrapolation


def richardson(hs: Sequence[float], values: Sequence[float]) -> tuple[float, float]:
    """Polynomial extrapolation to h = 0 (Neville) and the spread of the last two orders."""
    n = len(values)
    if n == 1:
        return values[0], math.inf
    table = list(values)
    prev_top = table[-1]
    for level in range(1, n):
        prev_top = table[n - 1]
        for i in range(n - 1, level - 1, -1):
            j = i - level
            table[i] = table[i] + (table[i] - table[i - 1]) * hs[i] / (hs[j] - hs[i])
    top = table[n - 1]
    return top, abs(top - prev_top)


def leading_order(ladder: Sequence[int], raw: Sequence[float]) -> int:
    """Estimate j0 with raw(K) - limit ~ K^(-j0/2) from the ratio of the last increments."""
    d1 = raw[-2] - raw[-3]
    d2 = raw[-1] - raw[-2]
    if d2 == 0 or d1 == 0:
        return 1
    ratio = abs(d1 / d2) ** (1.0 / math.log2(ladder[-1] / ladder[-2]))
    return max(1, int(round(2 * math.log2(ratio))))


def _basis(j0: int, size: int, with_logs: bool):
    out = []
    j = j0
    while len(out) < size:
        out.append((j, False))
        if with_logs:
            out.append((j, True))
        j += 1
    return out[:size]


def _solve_limit(ladder, raw, j0, with_logs) -> float:
    n = len(ladder)
    basis = _basis(j0, n - 1, with_logs)
    with mpmath.workdps(40):
        rows = []
        for K in ladder:
            k = mpmath.mpf(K)
            row = [mpmath.mpf(1)]
            for j, with_log in basis:
                v = k ** (-mpmath.mpf(j) / 2)
                row.append(v * mpmath.log(k) if with_log else v)
            rows.append(row)
        sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix([mpmath.mpf(x) for x in raw]))
        return float(sol[0])


def extrapolate(ladder: Sequence[int], raw: Sequence[float], with_logs: bool = True) -> tuple[float, float]:
    """Limit of the box sums as K -> oo, and an error estimate.

    The truncation error expands in powers K^(-j/2) from some leading order j0
    on.  For boxes in two or more indices the corners also produce K^(-j/2) log K
    terms, so ``with_logs`` adds those.  The limit is fitted with as many of
    these functions as the ladder allows; the error is the change when the
    coarsest cutoff (and the last basis function) is dropped.
    """
    pts = [(k, v) for k, v in zip(ladder, raw) if k > 0]
    ks = [k for k, _ in pts]
    vs = [v for _, v in pts]
    if len(pts) < 3:
        return vs[-1], math.inf
    # one order below the estimate: overshooting j0 drops a real term, undershooting only costs accuracy
    j0 = max(1, leading_order(ks, vs) - 1)
    full = _solve_limit(ks, vs, j0, with_logs)
    reduced = _solve_limit(ks[1:], vs[1:], j0, with_logs)
    return full, abs(full - reduced)


def _check_convergence(ladder, raw):
    diffs = [abs(b - a) for a, b in zip(raw[:-1], raw[1:])]
    if len(diffs) < 2 or diffs[0] == 0:
        return
    if not all(map(math.isfinite, raw)) or diffs[-1] > 0.5 * diffs[0]:
        raise DivergenceDetected(
            f"partial sums do not stabilize: increments {diffs[0]:.3e} at K={ladder[1]} "
            f"vs {diffs[-1]:.3e} at K={ladder[-1]}"
        )


def default_ladder(spec: SeriesSpec) -> tuple[int, ...]:
    r = spec.num_indices - len(choose_leaves(spec))
    return DEFAULT_LADDER if r <= 2 else DEFAULT_LADDER_3D


_LIMIT_CACHE: dict = {}


def _limit(spec: SeriesSpec) -> tuple[float, float]:
    key = spec
    if key not in _LIMIT_CACHE:
        v = eval_series(spec, cutoffs=default_ladder(spec))
        _LIMIT_CACHE[key] = (float(v.value.value), float(v.value.err))
    return _LIMIT_CACHE[key]


def partial_sum(spec: SeriesSpec, cutoff: int) -> float:
    """The outer box sum at one cutoff, leaves summed completely."""
    plan = _Plan(spec)
    return spec.scale * _box_sums(plan, [cutoff])[0]


def eval_series(spec: SeriesSpec, ctx=None, cutoffs: Sequence[int] | None = None) -> SeriesValue:
    """Evaluate a series.

    With three or more cutoffs the box sums are extrapolated and the value
    error is the extrapolation spread.  With one or two cutoffs the value is the
    plain partial sum at the largest cutoff, and the tail estimate is its
    distance to the extrapolated limit on the default ladder.  ``ctx`` is
    accepted for interface symmetry; the evaluation is float64 throughout.
    """
    ladder = tuple(int(k) for k in (cutoffs if cutoffs is not None else default_ladder(spec)))
    if not ladder or any(k < 0 for k in ladder):
        raise ValueError("cutoffs must be non-negative")
    if any(b <= a for a, b in zip(ladder[:-1], ladder[1:])):
        raise ValueError("cutoffs must be strictly increasing")
    plan = _Plan(spec)
    scale = spec.scale
    raw = [scale * s for s in _box_sums(plan, ladder)]
    per_index = tuple(None if i in plan.leaves else ladder[-1] for i in range(spec.num_indices))
    # sequential float64 sums along rows of length K; extrapolation amplifies this a few times
    rounding = 32 * 2.0**-52 * math.sqrt(max(ladder[-1], 1)) * max(1.0, max(abs(x) for x in raw))
    if len(ladder) >= 3:
        _check_convergence(ladder, raw)
        val, spread = extrapolate(ladder, raw, with_logs=len(plan.outer) >= 2)
        err = spread + rounding
        tail = abs(val - raw[-1]) + err
        return SeriesValue(BigReal(val, err), per_index, BigReal(tail), ladder, tuple(raw))
    limit, lerr = _limit(spec)
    tail = abs(limit - raw[-1]) + lerr + rounding
    return SeriesValue(BigReal(raw[-1], rounding), per_index, BigReal(tail), ladder, tuple(raw))
