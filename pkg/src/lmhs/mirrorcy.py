"""Limiting period data of one-parameter complete-intersection Calabi-Yau threefolds.

Cohomology of X is spanned by 1, H, L, p with H.H = m L, H.L = p and
everything above degree 6 truncated.  From the weights and degrees of the
ambient weighted projective space we get the Chern class, Todd class and
Gamma-hat class, then the Mukai pairing on the K-theory basis xi_1..xi_4,
the monodromy T = [O(-H) (x) -] and N = log T in that basis, and the limiting
period matrix Omega_lim.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Sequence

from .errors import ConstraintViolated, NotCalabiYau, UnknownGeometry
from .exactlin import PeriodEntry, RatMatrix, unipotent_log, validate_omega_shape

F = Fraction


@dataclass(frozen=True)
class CicyData:
    weights: tuple[int, ...]
    degrees: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if not self.degrees:
            raise NotCalabiYau("need at least one defining equation")
        if any(w <= 0 for w in self.weights) or any(d <= 0 for d in self.degrees):
            raise NotCalabiYau("weights and degrees must be positive")
        if sum(self.weights) != sum(self.degrees):
            raise NotCalabiYau(
                f"sum of degrees {sum(self.degrees)} != sum of weights {sum(self.weights)}"
            )
        if len(self.weights) - 1 - len(self.degrees) != 3:
            raise NotCalabiYau(
                f"{len(self.weights)} weights and {len(self.degrees)} equations do not cut out a threefold"
            )

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        w = ",".join(map(str, self.weights))
        d = ",".join(map(str, self.degrees))
        return f"WP({w})[{d}]"


@dataclass(frozen=True)
class CicyInvariants:
    m: Fraction
    a: Fraction
    b: Fraction

    def __post_init__(self):
        for f in ("m", "a", "b"):
            object.__setattr__(self, f, Fraction(getattr(self, f)))


@dataclass(frozen=True)
class CohClass:
    """c0 + c1 H + c2 L + c3 p.  Coefficients are PeriodEntry so Xi_3 can appear."""

    c0: PeriodEntry = PeriodEntry()
    c1: PeriodEntry = PeriodEntry()
    c2: PeriodEntry = PeriodEntry()
    c3: PeriodEntry = PeriodEntry()

    def __post_init__(self):
        for f in ("c0", "c1", "c2", "c3"):
            object.__setattr__(self, f, PeriodEntry.coerce(getattr(self, f)))

    @classmethod
    def of(cls, *coeffs) -> "CohClass":
        return cls(*coeffs)

    def coeffs(self) -> tuple[PeriodEntry, ...]:
        return (self.c0, self.c1, self.c2, self.c3)

    def __add__(self, other: "CohClass") -> "CohClass":
        return CohClass(*(x + y for x, y in zip(self.coeffs(), other.coeffs())))

    def __sub__(self, other: "CohClass") -> "CohClass":
        return CohClass(*(x - y for x, y in zip(self.coeffs(), other.coeffs())))

    def __neg__(self):
        return CohClass(*(-x for x in self.coeffs()))

    def scale(self, c) -> "CohClass":
        return CohClass(*(x * c for x in self.coeffs()))

    def dual(self) -> "CohClass":
        return CohClass(self.c0, -self.c1, self.c2, -self.c3)

    def integral(self) -> PeriodEntry:
        return self.c3


ONE = CohClass(1)
H = CohClass(0, 1)
L = CohClass(0, 0, 1)
P = CohClass(0, 0, 0, 1)


def coh_mul(x: CohClass, y: CohClass, m) -> CohClass:
    """Graded product with H.H = m L, H.L = p, L.L = 0, truncated above p."""
    m = Fraction(m)
    x0, x1, x2, x3 = x.coeffs()
    y0, y1, y2, y3 = y.coeffs()
    return CohClass(
        x0 * y0,
        x0 * y1 + x1 * y0,
        x0 * y2 + x2 * y0 + x1 * y1 * m,
        x0 * y3 + x3 * y0 + x1 * y2 + x2 * y1,
    )


def _power_series_in_H(coeffs: Sequence[Fraction], m) -> CohClass:
    """c0 + c1 H + c2 H^2 + c3 H^3 with H^2 = m L and H^3 = m p."""
    m = Fraction(m)
    c = list(coeffs) + [Fraction(0)] * 4
    return CohClass(c[0], c[1], c[2] * m, c[3] * m)


def _poly_mul(a, b, deg=3):
    out = [Fraction(0)] * (deg + 1)
    for i, x in enumerate(a[: deg + 1]):
        for j, y in enumerate(b[: deg + 1 - i]):
            out[i + j] += x * y
    return out


def _inverse_linear(d: int, deg=3):
    # 1/(1 + dH) = sum (-d H)^k
    return [Fraction((-d) ** k) for k in range(deg + 1)]


def total_chern_series(g: CicyData) -> list[Fraction]:
    """Coefficients of H^0..H^3 in prod(1 + w H) / prod(1 + d H), by successive division."""
    c = [Fraction(1)]
    for w in g.weights:
        c = _poly_mul(c, [Fraction(1), Fraction(w)])
    for d in g.degrees:
        c = _poly_mul(c, _inverse_linear(d))
    return (c + [Fraction(0)] * 4)[:4]


def total_chern_series_expanded(g: CicyData) -> list[Fraction]:
    """Same series via power sums: log c = sum_k (-1)^{k+1} s_k H^k / k."""
    s = {k: sum(w**k for w in g.weights) - sum(d**k for d in g.degrees) for k in (1, 2, 3)}
    e1 = Fraction(s[1])
    e2 = (e1 * s[1] - s[2]) / 2
    e3 = (e2 * s[1] - e1 * s[2] + s[3]) / 3
    return [Fraction(1), e1, e2, e3]


def degree(g: CicyData) -> Fraction:
    """The integer m with [H]^3 = m [p]: the product of the defining degrees."""
    return Fraction(prod(g.degrees))


def chern_invariants(g: CicyData) -> CicyInvariants:
    c = total_chern_series(g)
    if c[1] != 0:
        raise NotCalabiYau(f"first Chern class is {c[1]} H, not zero")
    m = degree(g)
    return CicyInvariants(m, m * c[2], m * c[3])


def todd_class(inv: CicyInvariants) -> CohClass:
    return CohClass(1, 0, inv.a / 12, 0)


def chern_character(inv: CicyInvariants) -> CohClass:
    return CohClass(3, 0, -inv.a, inv.b / 2)


def gamma_hat(inv: CicyInvariants) -> CohClass:
    return CohClass(1, 0, inv.a / 24, PeriodEntry.xi(-inv.b, 3))


# p-coefficient of ch(O_L).  See structure_sheaf_ch.
O_L_POINT_COEFF = Fraction(-1)


def structure_sheaf_ch(kind: str, m) -> CohClass:
    """Chern characters of O, O_H, O_L, O_p.

    ch(O_H) = 1 - exp(-H).  For O_L we use L - p: it is the normalization under
    which the Gamma-hat images of the basis give the stated limiting vectors
    and the Mukai Gram matrix of the normalized basis is the standard
    antidiagonal form (the alternative L + p puts -2 in the (1,3) slot).
    """
    m = Fraction(m)
    if kind == "O":
        return ONE
    if kind == "O_H":
        return CohClass(0, 1, -m / 2, m / 6)
    if kind == "O_L":
        return CohClass(0, 0, 1, O_L_POINT_COEFF)
    if kind == "O_p":
        return P
    raise ValueError(f"unknown sheaf {kind!r}")


def mukai_pairing(x: CohClass, y: CohClass, inv: CicyInvariants) -> PeriodEntry:
    """<x, y> = integral of ch(x)^dual . ch(y) . Td."""
    return coh_mul(coh_mul(x.dual(), y, inv.m), todd_class(inv), inv.m).integral()


def xi_basis(inv: CicyInvariants, A=0, B=0, C=0, D=0, E=None, F_=None) -> list[CohClass]:
    """Chern characters of xi_1..xi_4; E and F default to their normalized values."""
    if F_ is None:
        F_ = -1 - Fraction(A)
    if E is None:
        E = -(inv.a + 2 * inv.m) / 12
    O, OH, OL, Op = (structure_sheaf_ch(k, inv.m) for k in ("O", "O_H", "O_L", "O_p"))
    return [
        O + OH.scale(A) + OL.scale(B) + Op.scale(C),
        OH + OL.scale(D) + Op.scale(E),
        -OL + Op.scale(F_),
        Op,
    ]


def gram_matrix(inv: CicyInvariants, basis: list[CohClass] | None = None) -> RatMatrix:
    basis = basis if basis is not None else xi_basis(inv)
    return RatMatrix([[mukai_pairing(x, y, inv) for y in basis] for x in basis])


def _e_coordinates(c: CohClass) -> list[PeriodEntry]:
    # e3 = 1, e2 = H, e1 = -L, e0 = p
    return [c.c0, c.c1, -c.c2, c.c3]


def gamma_lim_basis(inv: CicyInvariants, A=0, B=0, C=0, D=0, E=None, F_=None,
                    enforce: bool = True) -> list[list[PeriodEntry]]:
    """e-coordinates (e3, e2, e1, e0) of gamma_3^lim .. gamma_0^lim.

    gamma^lim(xi) = Gamma-hat . ch(xi).  With ``enforce`` the two symplectic
    constraints on (A, ..., F) are checked and ConstraintViolated is raised.
    """
    A, B, C, D = map(Fraction, (A, B, C, D))
    E = -(inv.a + 2 * inv.m) / 12 if E is None else Fraction(E)
    F_ = -1 - A if F_ is None else Fraction(F_)
    if enforce:
        failures = []
        if 1 + F_ + A != 0:
            failures.append(f"1 + F + A = {1 + F_ + A}, expected 0")
        r = (inv.a + 2 * inv.m) / 12 - D + E - A * D + B
        if r != 0:
            failures.append(f"(a+2m)/12 - D + E - AD + B = {r}, expected 0")
        if failures:
            raise ConstraintViolated(failures)
    G = gamma_hat(inv)
    xs = xi_basis(inv, A, B, C, D, E, F_)
    return [_e_coordinates(coh_mul(G, x, inv.m)) for x in xs]


def _lower_unitriangular_inverse(M: RatMatrix) -> RatMatrix:
    n = M.rows
    Nil = M - RatMatrix.identity(n)
    out = RatMatrix.identity(n)
    term = RatMatrix.identity(n)
    for _ in range(n):
        term = -(term @ Nil)
        out = out + term
    return out


def omega_lim(inv: CicyInvariants) -> RatMatrix:
    """Columns are the coordinates of e3, e2, e1, e0 in the normalized gamma^lim basis."""
    cols = gamma_lim_basis(inv)
    G = RatMatrix([[cols[j][i] for j in range(4)] for i in range(4)])
    return _lower_unitriangular_inverse(G)


def omega_lim_display(inv: CicyInvariants) -> RatMatrix:
    """The closed-form matrix, for cross-checking ``omega_lim``."""
    return RatMatrix(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [inv.a / 24, -inv.m / 2, 1, 0],
            [PeriodEntry.xi(inv.b, 3), inv.a / 24, 0, 1],
        ]
    )


def _express_in_basis(c: CohClass, basis: list[CohClass]) -> list[Fraction]:
    """Coordinates of c in a basis whose Chern characters are triangular (1, H, L, p leading terms)."""
    coords = []
    rest = c
    for i, b in enumerate(basis):
        lead = b.coeffs()[i]
        coef = rest.coeffs()[i] / lead
        coords.append(coef.rat if coef.is_rational else coef)
        rest = rest - b.scale(coef)
    if any(rest.coeffs()):
        raise AssertionError("class is not in the span of the basis")
    return coords


def monodromy_T(inv: CicyInvariants) -> RatMatrix:
    """[O(-H) (x) -] in the normalized xi basis; column j is the image of xi_j."""
    basis = xi_basis(inv)
    twist = CohClass(1, -1, inv.m / 2, -inv.m / 6)  # exp(-H)
    cols = [_express_in_basis(coh_mul(twist, x, inv.m), basis) for x in basis]
    return RatMatrix([[cols[j][i] for j in range(4)] for i in range(4)])


def monodromy_T_display(inv: CicyInvariants) -> RatMatrix:
    return RatMatrix(
        [
            [1, 0, 0, 0],
            [-1, 1, 0, 0],
            [0, inv.m, 1, 0],
            [-(inv.a + 2 * inv.m) / 12, inv.m, 1, 1],
        ]
    )


def nilpotent_N(inv: CicyInvariants) -> RatMatrix:
    return unipotent_log(monodromy_T(inv))


def nilpotent_N_display(inv: CicyInvariants) -> RatMatrix:
    """Closed form of log T; the (4,3) entry is 1."""
    return RatMatrix(
        [
            [0, 0, 0, 0],
            [-1, 0, 0, 0],
            [inv.m / 2, inv.m, 0, 0],
            [-inv.a / 12, inv.m / 2, 1, 0],
        ]
    )


# ---------------------------------------------------------------------------
# the thirteen hypergeometric examples


@dataclass(frozen=True)
class TableRow:
    name: str
    weights: tuple[int, ...]
    degrees: tuple[int, ...]
    m: int
    a: int
    b: int

    @property
    def data(self) -> CicyData:
        return CicyData(self.weights, self.degrees, self.name)


TABLE: tuple[TableRow, ...] = (
    TableRow("P4[5]", (1, 1, 1, 1, 1), (5,), 5, 50, -200),
    TableRow("P5[2,4]", (1, 1, 1, 1, 1, 1), (2, 4), 8, 56, -176),
    TableRow("P5[3,3]", (1, 1, 1, 1, 1, 1), (3, 3), 9, 54, -144),
    TableRow("P6[2,2,3]", (1,) * 7, (2, 2, 3), 12, 60, -144),
    TableRow("P7[2,2,2,2]", (1,) * 8, (2, 2, 2, 2), 8, 64, -128),
    TableRow("WP(1,1,1,2,5)[10]", (1, 1, 1, 2, 5), (10,), 10, 340, -2880),
    TableRow("WP(1,1,1,1,4)[8]", (1, 1, 1, 1, 4), (8,), 8, 176, -1184),
    TableRow("WP(1,1,2,2,3,3)[6,6]", (1, 1, 2, 2, 3, 3), (6, 6), 36, 792, -4320),
    TableRow("WP(1,1,1,2,2,3)[4,6]", (1, 1, 1, 2, 2, 3), (4, 6), 24, 384, -1872),
    TableRow("WP(1,1,1,1,2)[6]", (1, 1, 1, 1, 2), (6,), 6, 84, -408),
    TableRow("WP(1,1,1,1,1,3)[2,6]", (1, 1, 1, 1, 1, 3), (2, 6), 12, 156, -768),
    TableRow("WP(1,1,1,1,2,2)[4,4]", (1, 1, 1, 1, 2, 2), (4, 4), 16, 160, -576),
    TableRow("WP(1,1,1,1,1,2)[3,4]", (1, 1, 1, 1, 1, 2), (3, 4), 12, 96, -312),
)

_BY_NAME = {row.name.lower().replace(" ", ""): row for row in TABLE}


def lookup(name: str) -> TableRow:
    try:
        return _BY_NAME[name.lower().replace(" ", "")]
    except KeyError:
        raise UnknownGeometry(
            f"unknown geometry {name!r}; known: {', '.join(r.name for r in TABLE)}"
        ) from None


@dataclass
class GeometryReport:
    name: str
    weights: tuple[int, ...]
    degrees: tuple[int, ...]
    inv: CicyInvariants
    omega_lim: RatMatrix
    T: RatMatrix
    N: RatMatrix
    gram: RatMatrix
    shape_valid: bool
    shape_failures: list[str]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "weights": list(self.weights),
            "degrees": list(self.degrees),
            "m": str(self.inv.m),
            "a": str(self.inv.a),
            "b": str(self.inv.b),
            "omega_lim": self.omega_lim.to_json(),
            "T": self.T.to_json(),
            "N": self.N.to_json(),
            "gram": self.gram.to_json(),
            "shape_valid": self.shape_valid,
            "shape_failures": list(self.shape_failures),
        }


def analyze(g: CicyData) -> GeometryReport:
    inv = chern_invariants(g)
    omega = omega_lim(inv)
    shape = validate_omega_shape(omega, "Sp4")
    return GeometryReport(
        g.label, g.weights, g.degrees, inv, omega, monodromy_T(inv), nilpotent_N(inv),
        gram_matrix(inv), shape.valid, shape.failures,
    )
