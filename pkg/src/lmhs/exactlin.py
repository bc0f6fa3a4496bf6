"""Exact linear algebra over the truncated ring Q + Q*Xi_w.

Xi_w stands for the formal symbol zeta(w)/(2 pi i)^w.  Every matrix that
appears in a limiting period computation has at most one transcendental
entry type, and no formula ever multiplies two of them, so the ring is
truncated: the product Xi_w * Xi_v raises ``ZetaProductError``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotNilpotent, NotUnipotent, ZetaProductError

Rat = Fraction


def _rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@dataclass(frozen=True, repr=False)
class PeriodEntry:
    """An element ``rat + zcoef * Xi_zweight``."""

    rat: Fraction = Fraction(0)
    zcoef: Fraction = Fraction(0)
    zweight: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rat", _rat(self.rat))
        object.__setattr__(self, "zcoef", _rat(self.zcoef))
        if self.zcoef == 0:
            object.__setattr__(self, "zweight", 0)
        elif self.zweight <= 0:
            raise ValueError("a nonzero zeta coefficient needs a positive weight")

    @classmethod
    def xi(cls, q, weight: int = 3) -> "PeriodEntry":
        return cls(Fraction(0), _rat(q), weight)

    @classmethod
    def coerce(cls, x) -> "PeriodEntry":
        if isinstance(x, PeriodEntry):
            return x
        return cls(_rat(x))

    @property
    def is_rational(self) -> bool:
        return self.zcoef == 0

    def __add__(self, other):
        other = PeriodEntry.coerce(other)
        if self.zcoef and other.zcoef and self.zweight != other.zweight:
            raise ZetaProductError(
                f"cannot add Xi_{self.zweight} and Xi_{other.zweight} in a single entry"
            )
        w = self.zweight or other.zweight
        return PeriodEntry(self.rat + other.rat, self.zcoef + other.zcoef, w)

    __radd__ = __add__

    def __neg__(self):
        return PeriodEntry(-self.rat, -self.zcoef, self.zweight)

    def __sub__(self, other):
        return self + (-PeriodEntry.coerce(other))

    def __rsub__(self, other):
        return PeriodEntry.coerce(other) - self

    def __mul__(self, other):
        other = PeriodEntry.coerce(other)
        if self.zcoef and other.zcoef:
            raise ZetaProductError("product of two transcendental entries")
        return PeriodEntry(
            self.rat * other.rat,
            self.rat * other.zcoef + self.zcoef * other.rat,
            self.zweight or other.zweight,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = PeriodEntry.coerce(other)
        if not other.is_rational:
            raise ZetaProductError("division by a transcendental entry")
        return PeriodEntry(self.rat / other.rat, self.zcoef / other.rat, self.zweight)

    def __eq__(self, other):
        try:
            other = PeriodEntry.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.rat, self.zcoef, self.zweight) == (other.rat, other.zcoef, other.zweight)

    def __hash__(self):
        return hash((self.rat, self.zcoef, self.zweight))

    def __bool__(self):
        return bool(self.rat) or bool(self.zcoef)

    def __repr__(self):
        return f"PeriodEntry({self})"

    def __str__(self):
        if self.is_rational:
            return str(self.rat)
        z = f"{self.zcoef}*Xi{self.zweight}"
        return z if self.rat == 0 else f"{self.rat} + {z}"

    def to_json(self) -> dict:
        return {
            "num": str(self.rat.numerator),
            "den": str(self.rat.denominator),
            "znum": str(self.zcoef.numerator),
            "zden": str(self.zcoef.denominator),
            "zweight": self.zweight,
        }

    @classmethod
    def from_json(cls, d: dict) -> "PeriodEntry":
        return cls(
            Fraction(int(d["num"]), int(d["den"])),
            Fraction(int(d["znum"]), int(d["zden"])),
            int(d["zweight"]),
        )


ZERO = PeriodEntry()
ONE = PeriodEntry(Fraction(1))


class RatMatrix:
    """Dense immutable matrix of ``PeriodEntry`` values."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Sequence[Sequence]):
        rows = tuple(tuple(PeriodEntry.coerce(x) for x in row) for row in entries)
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and one column")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged rows")
        self._e = rows
        self.rows = len(rows)
        self.cols = len(rows[0])

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RatMatrix":
        return cls([[0] * (cols or rows) for _ in range(rows)])

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_rational(self) -> bool:
        return all(x.is_rational for row in self._e for x in row)

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def row(self, i):
        return self._e[i]

    def entries(self):
        return self._e

    def rational_rows(self) -> list[list[Fraction]]:
        if not self.is_rational:
            raise ValueError("matrix has transcendental entries")
        return [[x.rat for x in row] for row in self._e]

    def replace(self, i: int, j: int, value) -> "RatMatrix":
        rows = [list(r) for r in self._e]
        rows[i][j] = value
        return RatMatrix(rows)

    def transpose(self) -> "RatMatrix":
        return RatMatrix([[self._e[i][j] for i in range(self.rows)] for j in range(self.cols)])

    T = property(transpose)

    def _check_same(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same(other)
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same(other)
        return RatMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __neg__(self):
        return RatMatrix([[-a for a in r] for r in self._e])

    def scale(self, c) -> "RatMatrix":
        c = PeriodEntry.coerce(c)
        return RatMatrix([[c * a for a in r] for r in self._e])

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        if self.is_rational and other.is_rational:
            return RatMatrix(_qmatmul(self.rational_rows(), other.rational_rows()))
        cols = list(zip(*other._e))
        out = []
        for r in self._e:
            out_row = []
            for c in cols:
                acc = ZERO
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return RatMatrix(out)

    def __mul__(self, other):
        if isinstance(other, RatMatrix):
            return self @ other
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self._e == other._e

    def __hash__(self):
        return hash(self._e)

    def is_zero(self) -> bool:
        return not any(x for row in self._e for x in row)

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self._e)
        return f"RatMatrix([{body}])"

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [x.to_json() for row in self._e for x in row],
        }

    @classmethod
    def from_json(cls, d: dict) -> "RatMatrix":
        rows, cols = int(d["rows"]), int(d["cols"])
        flat = [PeriodEntry.from_json(e) for e in d["entries"]]
        if len(flat) != rows * cols:
            raise ValueError("entry count does not match shape")
        return cls([flat[i * cols:(i + 1) * cols] for i in range(rows)])


# ---------------------------------------------------------------------------
# unipotent log / exp


def _powers_until_zero(M: RatMatrix, err) -> list[RatMatrix]:
    """[M, M^2, ...] up to the last nonzero power; raises ``err`` if M^n != 0."""
    n = M.rows
    out = []
    P = M
    for _ in range(n):
        if P.is_zero():
            return out
        out.append(P)
        P = P @ M
    if not P.is_zero():
        raise err(f"matrix is not nilpotent (power {n} is nonzero)")
    return out


def unipotent_log(T: RatMatrix) -> RatMatrix:
    """Exact logarithm of a unipotent matrix; the series stops at the nilpotency index."""
    if not T.is_square:
        raise DimensionMismatch("logarithm needs a square matrix")
    M = T - RatMatrix.identity(T.rows)
    N = RatMatrix.zeros(T.rows)
    for k, Mk in enumerate(_powers_until_zero(M, NotUnipotent), start=1):
        N = N + Mk.scale(Fraction((-1) ** (k - 1), k))
    return N


def unipotent_exp(N: RatMatrix) -> RatMatrix:
    if not N.is_square:
        raise DimensionMismatch("exponential needs a square matrix")
    T = RatMatrix.identity(N.rows)
    fact = 1
    for k, Nk in enumerate(_powers_until_zero(N, NotNilpotent), start=1):
        fact *= k
        T = T + Nk.scale(Fraction(1, fact))
    return T


def nilpotency_index(N: RatMatrix) -> int:
    """Smallest l with N^(l+1) = 0."""
    return len(_powers_until_zero(N, NotNilpotent))


# ---------------------------------------------------------------------------
# rational subspaces (row-space representation, canonical reduced echelon form)


def _scaled_row(r) -> tuple[list[int], int]:
    """Integers m and a denominator D with r == m / D."""
    fr = [x if isinstance(x, Fraction) else Fraction(x) for x in r]
    den = math.lcm(*(x.denominator for x in fr)) if fr else 1
    return [x.numerator * (den // x.denominator) for x in fr], den


def _integer_row(r) -> list[int]:
    return _scaled_row(r)[0]


def _qmatmul(A, B) -> list[list[Fraction]]:
    """Product of two rational matrices via integer dot products."""
    rows = [_scaled_row(r) for r in A]
    cols = [_scaled_row(c) for c in zip(*B)]
    return [
        [Fraction(sum(a * b for a, b in zip(ri, cj)), da * db) for cj, db in cols]
        for ri, da in rows
    ]


def rref(rows: Iterable[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Reduced row echelon form with zero rows dropped.

    The elimination runs fraction-free on integer rows (each kept primitive by
    its gcd); only the final normalization by the pivots creates fractions.
    """
    A = [_integer_row(r) for r in rows]
    pivot_row = 0
    pivots = []
    for c in range(ncols):
        p = next((i for i in range(pivot_row, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[pivot_row], A[p] = A[p], A[pivot_row]
        prow = A[pivot_row]
        piv = prow[c]
        for i in range(len(A)):
            if i != pivot_row and A[i][c] != 0:
                f = A[i][c]
                row = [piv * x - f * y for x, y in zip(A[i], prow)]
                g = math.gcd(*row)
                A[i] = [x // g for x in row] if g > 1 else row
        pivots.append(c)
        pivot_row += 1
        if pivot_row == len(A):
            break
    return [[Fraction(x, A[i][c]) for x in A[i]] for i, c in enumerate(pivots)]


def rank(rows, ncols: int) -> int:
    return len(rref(rows, ncols))


def kernel(A: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis (as rows) of {v : A v = 0}."""
    R = rref(A, ncols)
    pivots = []
    for r in R:
        pivots.append(next(j for j, x in enumerate(r) if x != 0))
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in zip(R, pivots):
            v[p] = -r[f]
        basis.append(v)
    return rref(basis, ncols)


def _apply(A: list[list[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [row[0] for row in _qmatmul(A, [[x] for x in v])]


def _mat_powers(A: list[list[Fraction]], count: int) -> list[list[list[Fraction]]]:
    """[A^0, A^1, ..., A^(count-1)], stopping the multiplications once a power vanishes."""
    n = len(A)
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    out = [P]
    while len(out) < count:
        if not any(any(row) for row in P):
            out.append(P)
            continue
        P = _qmatmul(P, A)
        out.append(P)
    return out


def _mat_pow(A: list[list[Fraction]], k: int) -> list[list[Fraction]]:
    return _mat_powers(A, k + 1)[k]


def image(A: list[list[Fraction]], basis: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    return rref([_apply(A, v) for v in basis], ncols)


def span_sum(U, V, ncols):
    return rref(list(U) + list(V), ncols)


def intersect(U, V, ncols):
    """Intersection of two row spaces."""
    if not U or not V:
        return []
    # Solve sum a_i u_i = sum b_j v_j; kernel of the stacked transpose.
    M = [[U[i][c] for i in range(len(U))] + [-V[j][c] for j in range(len(V))] for c in range(ncols)]
    K = kernel(M, len(U) + len(V))
    if not K:
        return []
    return rref(_qmatmul([k[: len(U)] for k in K], U), ncols)


def contains(U, V, ncols) -> bool:
    """True if span(V) is contained in span(U)."""
    return rank(list(U) + list(V), ncols) == rank(U, ncols)


# ---------------------------------------------------------------------------
# weight filtration


@dataclass(frozen=True)
class WeightFiltration:
    center_weight: int
    dim: int
    # (weight, basis rows in canonical reduced echelon form), increasing weight,
    # covering every weight from the first nonzero step to the full space.
    subspaces: tuple = field(default_factory=tuple)

    def subspace(self, k: int) -> list[list[Fraction]]:
        if not self.subspaces or k < self.subspaces[0][0]:
            return []
        if k >= self.subspaces[-1][0]:
            return [list(r) for r in self.subspaces[-1][1]]
        for w, basis in self.subspaces:
            if w == k:
                return [list(r) for r in basis]
        raise AssertionError("unreachable")

    def dims(self) -> dict[int, int]:
        return {w: len(b) for w, b in self.subspaces}

    def graded_dims(self) -> dict[int, int]:
        out = {}
        prev = 0
        for w, b in self.subspaces:
            out[w] = len(b) - prev
            prev = len(b)
        return out

    def basis_matrix(self, k: int) -> RatMatrix | None:
        b = self.subspace(k)
        return RatMatrix(b) if b else None


def weight_filtration(N: RatMatrix, n: int) -> WeightFiltration:
    """Monodromy weight filtration of a nilpotent N centered at n.

    Built from W_{n+k} = sum_{j >= max(0, -k)} im N^j  cap  ker N^{k+1+j}; the two
    defining properties (N W_k in W_{k-2}, and N^l : Gr_{n+l} -> Gr_{n-l} an
    isomorphism) are checked exactly before returning.
    """
    if not N.is_square:
        raise DimensionMismatch("weight filtration needs a square matrix")
    ell = nilpotency_index(N)  # raises NotNilpotent
    A = N.rational_rows()
    d = N.rows
    full = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    powers = _mat_powers(A, 2 * ell + 2)
    images = [rref([list(col) for col in zip(*P)], d) for P in powers]  # column space
    kernels = [kernel(P, d) for P in powers]

    def W(k: int):
        acc: list = []
        for j in range(max(0, -k), ell + 1):
            if k + 1 + j < 0:
                continue
            kj = k + 1 + j
            ker = kernels[kj] if kj < len(kernels) else full
            acc = span_sum(acc, intersect(images[j], ker, d), d)
        return acc

    subspaces = []
    for k in range(-ell - 1, ell + 1):
        subspaces.append((n + k, tuple(tuple(r) for r in W(k))))
    # trim the leading zero step, keep everything from the lowest nonzero weight
    while len(subspaces) > 1 and not subspaces[0][1]:
        subspaces.pop(0)
    wf = WeightFiltration(n, d, tuple(subspaces))
    _verify_weight_filtration(wf, A, n, ell)
    return wf


def _verify_weight_filtration(wf: WeightFiltration, A, n: int, ell: int) -> None:
    d = wf.dim
    if len(wf.subspace(n + ell)) != d:
        raise AssertionError("top step of the weight filtration is not the full space")
    for k in range(n - ell - 1, n + ell + 2):
        Wk = wf.subspace(k)
        if not contains(wf.subspace(k), wf.subspace(k - 1), d):
            raise AssertionError(f"W_{k - 1} not contained in W_{k}")
        if Wk and not contains(wf.subspace(k - 2), image(A, Wk, d), d):
            raise AssertionError(f"N W_{k} is not inside W_{k - 2}")
    gd = wf.graded_dims()
    powers = _mat_powers(A, ell + 1)
    for l in range(1, ell + 1):
        top, bottom = gd.get(n + l, 0), gd.get(n - l, 0)
        if top != bottom:
            raise AssertionError(f"Gr_{n + l} and Gr_{n - l} differ in dimension")
        lower = wf.subspace(n - l - 1)
        Nl = powers[l]
        mapped = span_sum(lower, image(Nl, wf.subspace(n + l), d), d)
        if len(mapped) - len(lower) != top:
            raise AssertionError(f"N^{l} is not injective on Gr_{n + l}")


# ---------------------------------------------------------------------------
# polarization and shapes


def symplectic_check(M: RatMatrix, Q: RatMatrix) -> bool:
    """True iff transpose(M) Q M == Q exactly."""
    if not (M.is_square and Q.is_square) or M.rows != Q.rows:
        raise DimensionMismatch(f"incompatible shapes {M.shape} and {Q.shape}")
    if not (M.is_rational and Q.is_rational):
        raise ValueError("symplectic check needs purely rational matrices")
    return M.T @ Q @ M == Q


def standard_polarization() -> RatMatrix:
    """The 4x4 antidiagonal polarization with signs (+, +, -, -) by row."""
    return RatMatrix([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]])


@dataclass
class ValidationReport:
    group: str
    valid: bool
    failures: list[str]
    xi: PeriodEntry

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "valid": self.valid,
            "failures": list(self.failures),
            "xi": self.xi.to_json(),
        }


# 1-indexed positions, as they appear in the displayed templates
_SHAPES = {
    "Sp4": {
        "size": 4,
        "xi": [(4, 1)],
        "xi_weight": 3,
        "zero": [(2, 1), (4, 3)],
        "equal": [((3, 1), (4, 2))],
        "circled": [],
    },
    "G2": {
        "size": 7,
        "xi": [(6, 1), (7, 2)],
        "xi_weight": 5,
        "zero": [(2, 1), (7, 6)],
        "equal": [],
        "circled": [(4, 1), (5, 2), (6, 3), (7, 4)],
    },
}


def validate_omega_shape(Omega: RatMatrix, group: str) -> ValidationReport:
    try:
        shape = _SHAPES[group]
    except KeyError:
        raise ValueError(f"unknown group {group!r}; expected one of {sorted(_SHAPES)}") from None
    n = shape["size"]
    failures: list[str] = []
    if Omega.shape != (n, n):
        return ValidationReport(group, False, [f"expected {n}x{n}, got {Omega.rows}x{Omega.cols}"], ZERO)

    def at(i, j):
        return Omega[i - 1, j - 1]

    for i in range(1, n + 1):
        if at(i, i) != ONE:
            failures.append(f"diagonal entry ({i},{i}) is not 1")
        for j in range(i + 1, n + 1):
            if at(i, j):
                failures.append(f"entry ({i},{j}) above the diagonal is nonzero")
    for pos in shape["zero"]:
        if at(*pos):
            failures.append(f"entry {pos} must vanish")
    xi_positions = shape["xi"]
    for i in range(1, n + 1):
        for j in range(1, i):
            if (i, j) not in xi_positions and not at(i, j).is_rational:
                failures.append(f"entry ({i},{j}) must be rational")
    for pos in shape["circled"]:
        if not at(*pos).is_rational:
            failures.append(f"circled entry {pos} must be rational")
    for p, q in shape["equal"]:
        if at(*p) != at(*q):
            failures.append(f"entries {p} and {q} must agree")
    xi = at(*xi_positions[0])
    if any(at(*pos) != xi for pos in xi_positions[1:]):
        failures.append(f"{group} equality violated: xi positions {xi_positions} differ")
    for pos in xi_positions:
        e = at(*pos)
        if not e.is_rational and e.zweight != shape["xi_weight"]:
            failures.append(f"entry {pos} carries Xi_{e.zweight}, expected Xi_{shape['xi_weight']}")
    return ValidationReport(group, not failures, failures, xi)
