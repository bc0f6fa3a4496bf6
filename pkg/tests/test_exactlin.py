import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lmhs.errors import DimensionMismatch, NotNilpotent, NotUnipotent, ZetaProductError
from lmhs.exactlin import (
    PeriodEntry,
    RatMatrix,
    contains,
    intersect,
    kernel,
    nilpotency_index,
    rref,
    standard_polarization,
    symplectic_check,
    unipotent_exp,
    unipotent_log,
    validate_omega_shape,
    weight_filtration,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
rationals = fractions.map(PeriodEntry.coerce)
entries = st.one_of(rationals, st.builds(lambda r, q: PeriodEntry(r, q, 3), fractions, fractions))


def strictly_lower(n):
    return st.lists(fractions, min_size=n * n, max_size=n * n).map(
        lambda xs: RatMatrix([[xs[i * n + j] if j < i else 0 for j in range(n)] for i in range(n)])
    )


nilpotents = st.integers(1, 5).flatmap(strictly_lower)


def jordan(n):
    return RatMatrix([[1 if i == j + 1 else 0 for j in range(n)] for i in range(n)])


def block_diag(*blocks):
    n = sum(b.rows for b in blocks)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                rows[off + i][off + j] = b[i, j]
        off += b.rows
    return RatMatrix(rows)


def taylor_exp(N):
    # plain Fraction arithmetic, independent of the RatMatrix product
    n = N.rows
    A = N.rational_rows()
    out = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    term = [row[:] for row in out]
    for k in range(1, n + 1):
        term = [[sum(term[i][m] * A[m][j] for m in range(n)) / k for j in range(n)] for i in range(n)]
        out = [[out[i][j] + term[i][j] for j in range(n)] for i in range(n)]
    return RatMatrix(out)


# --- PeriodEntry -----------------------------------------------------------


@given(rationals, rationals, rationals)
def test_rational_entries_form_a_field(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == PeriodEntry()
    if b:
        assert (a / b) * b == a


@given(entries, entries)
def test_addition_commutes_for_same_weight(a, b):
    assert a + b == b + a


@given(entries)
def test_json_round_trip_entry(x):
    assert PeriodEntry.from_json(json.loads(json.dumps(x.to_json()))) == x


def test_xi_products_are_rejected():
    x = PeriodEntry.xi(2)
    with pytest.raises(ZetaProductError):
        x * x
    with pytest.raises(ZetaProductError):
        PeriodEntry(1) / x
    with pytest.raises(ZetaProductError):
        x + PeriodEntry.xi(1, 5)


def test_xi_times_rational_scales_coefficient():
    assert PeriodEntry.xi(3) * Fraction(1, 2) == PeriodEntry(0, Fraction(3, 2), 3)
    assert str(PeriodEntry(1, 2, 3)) == "1 + 2*Xi3"
    assert not PeriodEntry.xi(1).is_rational


def test_zero_xi_coefficient_drops_weight():
    assert PeriodEntry(1, 0, 5) == PeriodEntry(1)
    with pytest.raises(ValueError):
        PeriodEntry(0, 1, 0)


# --- RatMatrix ---------------------------------------------------------------


@given(st.integers(1, 4).flatmap(lambda n: st.lists(entries, min_size=n * n, max_size=n * n).map(
    lambda xs: RatMatrix([xs[i * n:(i + 1) * n] for i in range(n)]))))
def test_matrix_json_round_trip(M):
    assert RatMatrix.from_json(json.loads(json.dumps(M.to_json()))) == M
    assert M.T.T == M


def test_shape_errors():
    with pytest.raises(DimensionMismatch):
        RatMatrix.identity(2) @ RatMatrix.identity(3)
    with pytest.raises(DimensionMismatch):
        RatMatrix.identity(2) + RatMatrix.identity(3)
    with pytest.raises(ValueError):
        RatMatrix([[1, 2], [3]])


# --- log / exp ---------------------------------------------------------------


@given(nilpotents)
def test_exp_matches_plain_taylor_series(N):
    assert unipotent_exp(N) == taylor_exp(N)


@given(nilpotents)
def test_log_inverts_exp(N):
    assert unipotent_log(unipotent_exp(N)) == N


@given(nilpotents)
def test_exp_inverts_log(N):
    T = taylor_exp(N)
    assert unipotent_exp(unipotent_log(T)) == T


def test_non_unipotent_and_non_nilpotent_raise():
    with pytest.raises(NotUnipotent):
        unipotent_log(RatMatrix([[2, 0], [0, 1]]))
    with pytest.raises(NotNilpotent):
        unipotent_exp(RatMatrix([[0, 1], [1, 0]]))


def test_log_of_jordan_unipotent():
    T = RatMatrix([[1, 0, 0], [1, 1, 0], [0, 1, 1]])
    assert unipotent_log(T) == RatMatrix([[0, 0, 0], [1, 0, 0], [Fraction(-1, 2), 1, 0]])


@pytest.mark.parametrize("n", range(1, 8))
def test_nilpotency_index_of_jordan_block(n):
    assert nilpotency_index(jordan(n)) == n - 1


# --- subspaces -----------------------------------------------------------------


def test_rref_kernel_intersection():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    R = rref(rows, 3)
    assert R == [[1, 0, 1], [0, 1, 1]]
    K = kernel([[Fraction(x) for x in r] for r in rows], 3)
    assert len(K) == 1 and rref(K, 3) == [[1, 1, -1]]
    U = [[1, 0, 0], [0, 1, 0]]
    V = [[0, 1, 0], [0, 0, 1]]
    assert intersect(U, V, 3) == [[0, 1, 0]]
    assert contains(U, [[1, 1, 0]], 3) and not contains(U, [[0, 0, 1]], 3)


# --- weight filtration -------------------------------------------------------


@pytest.mark.parametrize("d", range(0, 7))
def test_single_jordan_block_grades(d):
    wf = weight_filtration(jordan(d + 1), d)
    got = {w: c for w, c in wf.graded_dims().items() if c}
    assert got == {w: 1 for w in range(0, 2 * d + 1, 2)}


def test_two_blocks_have_symmetric_grading():
    N = block_diag(jordan(3), jordan(2))
    wf = weight_filtration(N, 3)
    gd = {w: c for w, c in wf.graded_dims().items() if c}
    assert gd == {1: 1, 2: 1, 3: 1, 4: 1, 5: 1}
    assert sum(gd.values()) == 5


@given(st.lists(st.integers(1, 3), min_size=1, max_size=3), st.integers(0, 4))
def test_grading_is_symmetric_about_center(sizes, n):
    wf = weight_filtration(block_diag(*(jordan(s) for s in sizes)), n)
    gd = wf.graded_dims()
    assert sum(gd.values()) == sum(sizes)
    for w, c in gd.items():
        assert gd.get(2 * n - w, 0) == c


def test_weight_filtration_needs_nilpotent():
    with pytest.raises(NotNilpotent):
        weight_filtration(RatMatrix([[1, 0], [0, 0]]), 0)


# --- polarization and shapes -------------------------------------------------


def test_symplectic_check():
    Q = standard_polarization()
    N = RatMatrix([[0, 0, 0, 0], [-1, 0, 0, 0], [Fraction(5, 2), 5, 0, 0], [Fraction(-25, 6), Fraction(5, 2), 1, 0]])
    T = unipotent_exp(N)
    assert symplectic_check(T, Q) or symplectic_check(T, Q.scale(-1))
    assert not symplectic_check(RatMatrix.identity(4).scale(2), Q)
    with pytest.raises(DimensionMismatch):
        symplectic_check(RatMatrix.identity(3), Q)


def test_omega_shape_sp4():
    Om = RatMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [3, 2, 1, 0], [PeriodEntry.xi(-200), 3, 0, 1]])
    rep = validate_omega_shape(Om, "Sp4")
    assert rep.valid and rep.xi == PeriodEntry.xi(-200)
    bad = Om.replace(3, 2, 1)
    assert not validate_omega_shape(bad, "Sp4").valid


def test_omega_shape_g2():
    rows = [[int(i == j) for j in range(7)] for i in range(7)]
    rows[5][0] = PeriodEntry.xi(4, 5)
    rows[6][1] = PeriodEntry.xi(4, 5)
    rep = validate_omega_shape(RatMatrix(rows), "G2")
    assert rep.valid, rep.failures
    rows[6][1] = PeriodEntry.xi(3, 5)
    assert not validate_omega_shape(RatMatrix(rows), "G2").valid
    with pytest.raises(ValueError):
        validate_omega_shape(RatMatrix(rows), "E8")
