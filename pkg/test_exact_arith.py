"""
Tests for exact rational arithmetic, LDL^T, rank/kernel and lattice helpers.
"""

from fractions import Fraction

import numpy as np
import pytest

from errors import InputFormatError, NotPositiveDefiniteError
from exact_arith import (
    determinant, evaluate_form, exact_matrix, format_rational, hermite_normal_form, identity,
    integer_determinant, integer_rank, inverse, is_positive_definite, ldlt_decompose,
    matrix_to_sym, parse_rational, primitive_vector, quotient_lattice, random_unimodular,
    rank_and_kernel, require_positive_definite, sign_normalized, sym_pairs, sym_to_matrix,
    form_functional, transform_form,
)


def test_parse_and_format_rational():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(" -7 ") == -7
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-3, 9)) == "-1/3"
    for bad in ("1.5", "1/0", "a/b", ""):
        with pytest.raises(InputFormatError):
            parse_rational(bad)


def test_exact_matrix_is_read_only():
    A = exact_matrix([[1, "1/2"], ["1/2", 1]])
    assert A[0, 1] == Fraction(1, 2)
    with pytest.raises(ValueError):
        A[0, 0] = 5


def test_ldlt_identity():
    result = ldlt_decompose(identity(3))
    assert result.ok
    assert result.D == (1, 1, 1)
    assert all(result.L[i, j] == int(i == j) for i in range(3) for j in range(3))


def test_ldlt_hexagonal(hexagonal):
    result = ldlt_decompose(hexagonal)
    assert result.D == (2, Fraction(3, 2))
    assert result.L[1, 0] == Fraction(-1, 2)
    L = np.array(result.L)
    D = np.diag(np.array(result.D, dtype=object))
    assert (L.dot(D).dot(L.T) == np.array(hexagonal)).all()


def test_ldlt_reports_zero_pivot():
    result = ldlt_decompose(exact_matrix([[1, 1], [1, 1]]))
    assert not result.ok
    assert result.failed_index == 1
    assert result.L is None


def test_ldlt_rejects_non_symmetric():
    with pytest.raises(InputFormatError):
        ldlt_decompose(exact_matrix([[1, 2], [0, 1]]))


def test_is_positive_definite():
    assert is_positive_definite(identity(5))
    assert not is_positive_definite(exact_matrix([[1, 2], [2, 1]]))
    assert not is_positive_definite(exact_matrix([[1, 0], [0, 0]]))


def test_require_positive_definite_names_pivot():
    with pytest.raises(NotPositiveDefiniteError) as info:
        require_positive_definite(exact_matrix([[1, 2], [2, 1]]))
    assert info.value.pivot == 1
    assert "pivot 2" in str(info.value)


def test_evaluate_form(hexagonal):
    assert evaluate_form(identity(2), (1, 1)) == 2
    assert evaluate_form(hexagonal, (1, 1)) == 2
    assert evaluate_form(hexagonal, (0, 0)) == 0
    assert evaluate_form(hexagonal, (Fraction(1, 2), 0)) == Fraction(1, 2)


def test_rank_and_kernel():
    assert rank_and_kernel([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == (3, [])
    rank, kernel = rank_and_kernel([[1, 1, 1]] * 3)
    assert rank == 1
    assert kernel == [(1, -1, 0), (1, 0, -1)]
    rank, kernel = rank_and_kernel([[0, 0], [0, 0]])
    assert rank == 0
    assert kernel == [(1, 0), (0, 1)]


def test_primitive_and_sign():
    assert primitive_vector([Fraction(1, 2), Fraction(-3, 4)]) == (2, -3)
    assert primitive_vector([0, 0]) == (0, 0)
    assert sign_normalized((0, -1, 2)) == (0, 1, -2)


def test_determinants_agree(rng):
    for _ in range(30):
        n = rng.randint(1, 5)
        M = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)]
        assert integer_determinant(M) == determinant(M)


def test_random_unimodular(rng):
    for _ in range(20):
        U = random_unimodular(4, rng)
        assert abs(integer_determinant(U)) == 1
        assert all(x.denominator == 1 for x in inverse(U).flat)


def test_hermite_normal_form():
    assert hermite_normal_form([[2, 0], [0, 2], [1, 1]]) == ((1, 1), (0, 2))
    assert hermite_normal_form([[0, 0]]) == ()


def test_integer_rank():
    assert integer_rank([(1, 2), (2, 4)]) == 1
    assert integer_rank([], 3) == 0


def test_sym_coordinates_round_trip(rng):
    assert sym_pairs(3) == ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
    coords = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(10))
    assert matrix_to_sym(sym_to_matrix(coords)) == coords


def test_form_functional_evaluates_form(pd_forms, rng):
    for A in pd_forms[:20]:
        n = A.shape[0]
        v = [rng.randint(-3, 3) for _ in range(n)]
        coeffs = form_functional(v)
        assert sum(c * q for c, q in zip(coeffs, matrix_to_sym(A))) == evaluate_form(A, v)


def test_transform_form(hexagonal):
    U = [[1, 1], [0, 1]]
    B = transform_form(hexagonal, U)
    assert B.tolist() == [[2, 1], [1, 2]]


def test_quotient_lattice_of_semidefinite_forms(rng):
    A = exact_matrix([[1, 1], [1, 1]])
    P, reduced = quotient_lattice(A)
    assert len(P) == 1
    assert reduced.shape == (1, 1) and reduced[0, 0] > 0
    # A = P^T A' P
    Pm = np.array(P, dtype=object)
    assert (Pm.T.dot(np.array(reduced)).dot(Pm) == np.array(A)).all()

    for _ in range(10):
        U = random_unimodular(3, rng)
        base = exact_matrix([[2, 1, 0], [1, 3, 0], [0, 0, 0]])
        B = transform_form(base, U)
        P, reduced = quotient_lattice(B)
        Pm = np.array(P, dtype=object)
        assert len(P) == 2
        assert is_positive_definite(reduced)
        assert (Pm.T.dot(np.array(reduced)).dot(Pm) == np.array(B)).all()


def test_ldlt_reconstructs_random_forms(rng):
    for _ in range(100):
        n = rng.randint(1, 5)
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = rows[j][i] = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        A = exact_matrix(rows)
        result = ldlt_decompose(A)
        if not result.ok:
            continue
        L = np.array(result.L)
        D = np.diag(np.array(result.D, dtype=object))
        assert (L.dot(D).dot(L.T) == np.array(A)).all()


def test_positive_definiteness_is_unimodular_invariant(pd_forms, rng):
    indefinite = [exact_matrix([[1, 2], [2, 1]]), exact_matrix([[1, 0, 0], [0, 0, 0], [0, 0, 2]]),
                  exact_matrix([[2, 1, 0], [1, -1, 0], [0, 0, 3]])]
    for A in list(pd_forms) + indefinite:
        U = random_unimodular(A.shape[0], rng)
        assert is_positive_definite(transform_form(A, U)) == is_positive_definite(A)


def test_parallelogram_law(pd_forms, rng):
    for A in pd_forms:
        n = A.shape[0]
        x = [rng.randint(-4, 4) for _ in range(n)]
        y = [Fraction(rng.randint(-4, 4), 2) for _ in range(n)]
        plus = [a + b for a, b in zip(x, y)]
        minus = [a - b for a, b in zip(x, y)]
        assert evaluate_form(A, plus) + evaluate_form(A, minus) == 2 * evaluate_form(A, x) + 2 * evaluate_form(A, y)


def test_inverse_and_singular_input(rng):
    for _ in range(20):
        U = random_unimodular(3, rng)
        inv = inverse(U)
        product = np.array(U, dtype=object).dot(inv)
        assert (product == np.array(identity(3))).all()
    with pytest.raises(ValueError):
        inverse([[1, 2], [2, 4]])


def test_hermite_normal_form_is_a_lattice_invariant(rng):
    rows = [(2, 0, 1), (0, 3, 1), (4, 3, 3)]
    expected = hermite_normal_form(rows)
    for _ in range(20):
        U = random_unimodular(3, rng)
        mixed = [tuple(sum(U[i][k] * rows[k][j] for k in range(3)) for j in range(3)) for i in range(3)]
        assert hermite_normal_form(mixed) == expected
    for t, row in enumerate(expected):
        pivot = next(c for c, x in enumerate(row) if x)
        assert row[pivot] > 0
        assert all(0 <= expected[s][pivot] < row[pivot] for s in range(t))
