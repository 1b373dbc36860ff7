"""
Exact Arithmetic
Rational scalars, numpy object matrices of Fractions, LDL^T, rank/kernel,
lattice normal forms and the flat coordinates of symmetric matrices.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError, DMNonSquareMatrixError
from sympy.polys.matrices.normalforms import hermite_normal_form as column_hermite_form

from errors import InputFormatError, NotPositiveDefiniteError

logger = logging.getLogger(__name__)

IntVector = Tuple[int, ...]

HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------

def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return parse_rational(value)
    raise InputFormatError(f"not an exact scalar: {value!r}")


def parse_rational(text: str) -> Fraction:
    """
    Parse "p/q" or "p" into a Fraction.

    Args:
        text (str): Rational literal, optional sign, no floats

    Returns:
        Fraction: The parsed value in lowest terms
    """
    token = text.strip()
    parts = token.split("/")
    try:
        if len(parts) == 1:
            return Fraction(int(parts[0]))
        if len(parts) == 2:
            num, den = int(parts[0]), int(parts[1])
            if den == 0:
                raise InputFormatError(f"zero denominator in {text!r}")
            return Fraction(num, den)
    except ValueError:
        pass
    raise InputFormatError(f"malformed rational {text!r}")


def format_rational(value) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    q = to_fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# Vectors and matrices
# ---------------------------------------------------------------------------

def exact_vector(values) -> np.ndarray:
    """1-D object array of Fractions."""
    return np.array([to_fraction(x) for x in values], dtype=object)


def exact_matrix(rows) -> np.ndarray:
    """
    Build a read-only 2-D object array of Fractions.

    Args:
        rows: Nested sequence (or array) of exact scalars

    Returns:
        np.ndarray: ExactMatrix
    """
    data = [[to_fraction(x) for x in row] for row in rows]
    width = len(data[0]) if data else 0
    if any(len(row) != width for row in data):
        raise InputFormatError("ragged matrix rows")
    matrix = np.empty((len(data), width), dtype=object)
    for i, row in enumerate(data):
        for j, x in enumerate(row):
            matrix[i, j] = x
    matrix.flags.writeable = False
    return matrix


def identity(n: int) -> np.ndarray:
    return exact_matrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])


def integer_identity(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def is_symmetric(A: np.ndarray) -> bool:
    rows, cols = A.shape
    if rows != cols:
        return False
    return all(A[i, j] == A[j, i] for i in range(rows) for j in range(i + 1, rows))


def transform_form(A: np.ndarray, U) -> np.ndarray:
    """Return U^T A U for an integer (or rational) matrix U."""
    Um = np.array([[to_fraction(x) for x in row] for row in U], dtype=object)
    return exact_matrix(Um.T.dot(A).dot(Um))


def mat_vec(M, v) -> tuple:
    """Matrix times vector on plain nested sequences."""
    return tuple(sum(a * b for a, b in zip(row, v)) for row in M)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def evaluate_form(A: np.ndarray, x) -> Fraction:
    """
    Evaluate A[x] = x^T A x exactly.

    Args:
        A (np.ndarray): Symmetric ExactMatrix
        x: Rational vector of matching length

    Returns:
        Fraction: The form value
    """
    vec = exact_vector(x)
    if vec.shape[0] != A.shape[0]:
        raise ValueError(f"dimension mismatch: form {A.shape[0]}, vector {vec.shape[0]}")
    return to_fraction(vec.dot(A.dot(vec))) if vec.shape[0] else Fraction(0)


# ---------------------------------------------------------------------------
# LDL^T
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LdlResult:
    """Outcome of an LDL^T attempt; ``failed_index`` is set iff ``ok`` is False."""
    L: Optional[np.ndarray]
    D: Tuple[Fraction, ...]
    ok: bool
    failed_index: Optional[int] = None


def ldlt_decompose(A: np.ndarray) -> LdlResult:
    """
    Exact LDL^T with L unit lower triangular.

    A zero pivot is reported through ``failed_index`` rather than raised:
    semidefinite forms are legitimate inputs for the callers.

    Args:
        A (np.ndarray): Symmetric ExactMatrix

    Returns:
        LdlResult: L and the diagonal of D, or the first zero pivot
    """
    if not is_symmetric(A):
        raise InputFormatError("LDL^T needs a symmetric matrix")
    n = A.shape[0]
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D: List[Fraction] = []
    for j in range(n):
        d = A[j, j] - sum(L[j][k] * L[j][k] * D[k] for k in range(j))
        if d == 0:
            return LdlResult(L=None, D=tuple(D), ok=False, failed_index=j)
        D.append(d)
        for i in range(j + 1, n):
            L[i][j] = (A[i, j] - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / d
    return LdlResult(L=exact_matrix(L), D=tuple(D), ok=True)


def first_nonpositive_pivot(A: np.ndarray) -> Optional[int]:
    """Index of the first pivot that is <= 0, or None if A is positive definite."""
    result = ldlt_decompose(A)
    for i, d in enumerate(result.D):
        if d <= 0:
            return i
    if not result.ok:
        return result.failed_index
    return None


def is_positive_definite(A: np.ndarray) -> bool:
    return first_nonpositive_pivot(A) is None


def require_positive_definite(A: np.ndarray) -> None:
    """Raise NotPositiveDefiniteError naming the failing pivot (1-based in the message)."""
    pivot = first_nonpositive_pivot(A)
    if pivot is not None:
        raise NotPositiveDefiniteError(
            f"form is not positive definite (pivot {pivot + 1} is not positive)", pivot=pivot)


# ---------------------------------------------------------------------------
# Elimination
# ---------------------------------------------------------------------------

def _width(rows, ncols: Optional[int]) -> int:
    if ncols is not None:
        return ncols
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        return rows.shape[1]
    return len(rows[0]) if len(rows) else 0


def _qq_matrix(rows, ncols: Optional[int] = None) -> DomainMatrix:
    """Rational rows as a dense DomainMatrix over QQ."""
    width = _width(rows, ncols)
    data = []
    for row in rows:
        data.append([QQ(q.numerator, q.denominator) for q in (to_fraction(x) for x in row)])
    return DomainMatrix(data, (len(data), width), QQ)


def _zz_matrix(rows, ncols: Optional[int] = None) -> DomainMatrix:
    width = _width(rows, ncols)
    data = [[ZZ(int(x)) for x in row] for row in rows]
    return DomainMatrix(data, (len(data), width), ZZ)


def _as_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _fraction_rows(M: DomainMatrix) -> List[List[Fraction]]:
    return [[_as_fraction(x) for x in row] for row in M.to_list()]


def rref(rows, ncols: Optional[int] = None) -> Tuple[List[List[Fraction]], List[int]]:
    """
    Reduced row echelon form over Q.

    Returns:
        tuple: (nonzero rows of the RREF, pivot columns)
    """
    width = _width(rows, ncols)
    if len(rows) == 0 or width == 0:
        return [], []
    R, pivots = _qq_matrix(rows, width).rref()
    return _fraction_rows(R)[:len(pivots)], list(pivots)


def primitive_vector(v) -> IntVector:
    """Scale a rational vector by a positive factor to integers with gcd 1."""
    q = [to_fraction(x) for x in v]
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in q), 1)
    ints = [int(x * den) for x in q]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def sign_normalized(v) -> tuple:
    """Flip the sign so that the first nonzero coordinate is positive."""
    for x in v:
        if x != 0:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def rank_and_kernel(M) -> Tuple[int, List[IntVector]]:
    """
    Exact rank and an integer kernel basis (gcd 1, first nonzero entry positive).

    Args:
        M: Rational matrix (rows x cols)

    Returns:
        tuple: (rank, kernel vectors), one kernel vector per free column
    """
    ncols = _width(M, None)
    if len(M) == 0:
        return 0, []
    A = _qq_matrix(M, ncols)
    rank = A.rank()
    if rank == ncols:
        return rank, []
    kernel = [sign_normalized(primitive_vector(v)) for v in _fraction_rows(A.nullspace())]
    return rank, kernel


def integer_rank(vectors, ncols: Optional[int] = None) -> int:
    rows = [list(v) for v in vectors]
    if not rows:
        return 0
    return _qq_matrix(rows, ncols).rank()


def row_space_basis(vectors, ncols: int) -> List[IntVector]:
    """Canonical integer basis of a span: RREF rows scaled to integers, pivots positive."""
    R, _ = rref([list(v) for v in vectors], ncols)
    return [primitive_vector(row) for row in R]


def determinant(M) -> Fraction:
    rows = [list(row) for row in M]
    if not rows:
        return Fraction(1)
    return _as_fraction(_qq_matrix(rows).det())


def integer_determinant(M) -> int:
    """Determinant of an integer matrix, computed over ZZ."""
    rows = [list(row) for row in M]
    if not rows:
        return 1
    return int(_zz_matrix(rows).det())


def inverse(M) -> np.ndarray:
    """Exact inverse; raises ValueError on a singular matrix."""
    try:
        inv = _qq_matrix([list(row) for row in M]).inv()
    except (DMNonInvertibleMatrixError, DMNonSquareMatrixError) as exc:
        raise ValueError("matrix is singular") from exc
    return exact_matrix(_fraction_rows(inv))


def integer_inverse(M) -> Tuple[IntVector, ...]:
    """Inverse of a unimodular integer matrix as integer rows."""
    inv = inverse(M)
    if any(x.denominator != 1 for x in inv.flat):
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------

def hermite_normal_form(rows) -> Tuple[IntVector, ...]:
    """
    Row-style Hermite normal form of the lattice spanned by integer rows.

    Pivots are positive; entries above a pivot are reduced into [0, pivot).
    sympy returns the column form with pivots towards the bottom right, so
    the input is transposed with its coordinates reversed and the result is
    read back flipped.
    """
    R = [[int(x) for x in row] for row in rows]
    if not R or not R[0]:
        return ()
    n, m = len(R[0]), len(R)
    W = column_hermite_form(_zz_matrix([[R[j][n - 1 - i] for j in range(m)] for i in range(n)], m)).to_list()
    r = len(W[0])
    return tuple(tuple(int(W[n - 1 - col][r - 1 - t]) for col in range(n)) for t in range(r))


def quotient_lattice(A: np.ndarray) -> Tuple[Tuple[IntVector, ...], np.ndarray]:
    """
    Project a semidefinite form onto Z^n / (ker A ∩ Z^n).

    Args:
        A (np.ndarray): Symmetric ExactMatrix of rank r

    Returns:
        tuple: (P, A') with P an integer r x n surjection Z^n -> Z^r whose
        kernel is ker A ∩ Z^n, and A' the r x r form with A = P^T A' P
    """
    n = A.shape[0]
    R, _ = rref([list(row) for row in A], n)
    r = len(R)
    if r == n:
        return tuple(tuple(row) for row in integer_identity(n)), A
    # column HNF of [I; M] is [C; M C] with C unimodular and the first n - r columns of M C zero
    stacked = integer_identity(n) + [list(primitive_vector(row)) for row in R]
    W = column_hermite_form(_zz_matrix(stacked, n)).to_list()
    C = [[int(x) for x in row] for row in W[:n]]
    P = tuple(integer_inverse(C)[n - r:])
    Cm = np.array([[Fraction(x) for x in row] for row in C], dtype=object)
    reduced = Cm.T.dot(A).dot(Cm)
    return P, exact_matrix([[reduced[i, j] for j in range(n - r, n)] for i in range(n - r, n)])


def random_unimodular(n: int, rng: random.Random, steps: Optional[int] = None) -> Tuple[IntVector, ...]:
    """Random GL_n(Z) element from elementary row operations and a signed permutation."""
    U = integer_identity(n)
    for _ in range(steps if steps is not None else 3 * n):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-2, -1, 1, 2))
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]
    rng.shuffle(U)
    for row in U:
        if rng.random() < 0.5:
            row[:] = [-a for a in row]
    return tuple(tuple(row) for row in U)


# ---------------------------------------------------------------------------
# Flat coordinates of symmetric matrices
# ---------------------------------------------------------------------------

def sym_dim(n: int) -> int:
    return n * (n + 1) // 2


@lru_cache(maxsize=None)
def sym_pairs(n: int) -> Tuple[Tuple[int, int], ...]:
    """Coordinate order: q_11..q_nn, then q_ij for i < j row by row."""
    diagonal = [(i, i) for i in range(n)]
    upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return tuple(diagonal + upper)


def sym_n(length: int) -> int:
    """Recover n from a flat vector length n(n+1)/2."""
    n = 0
    while sym_dim(n) < length:
        n += 1
    if sym_dim(n) != length:
        raise InputFormatError(f"{length} is not a triangular number")
    return n


def sym_to_matrix(coords) -> np.ndarray:
    values = [to_fraction(x) for x in coords]
    n = sym_n(len(values))
    rows = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), q in zip(sym_pairs(n), values):
        rows[i][j] = q
        rows[j][i] = q
    return exact_matrix(rows)


def matrix_to_sym(A: np.ndarray) -> Tuple[Fraction, ...]:
    if not is_symmetric(A):
        raise InputFormatError("matrix is not symmetric")
    return tuple(to_fraction(A[i, j]) for i, j in sym_pairs(A.shape[0]))


def form_functional(v) -> tuple:
    """Coefficients c with c . matrix_to_sym(Q) == Q[v]."""
    n = len(v)
    return tuple(v[i] * v[i] if i == j else 2 * v[i] * v[j] for i, j in sym_pairs(n))


def require_symmetric_input(A: np.ndarray) -> None:
    if not is_symmetric(A):
        raise InputFormatError("matrix is not symmetric")


def as_int_vector(v: Sequence) -> IntVector:
    out = []
    for x in v:
        q = to_fraction(x)
        if q.denominator != 1:
            raise ValueError(f"vector {tuple(v)} is not integral")
        out.append(int(q))
    return tuple(out)
