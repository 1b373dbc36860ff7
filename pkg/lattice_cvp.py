"""
Closest Vectors at Parity Targets
Exact Fincke-Pohst enumeration over LDL^T, vonorms, tropical theta
constants, the characteristic function phi and generalized configurations.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from errors import NotPositiveDefiniteError
from exact_arith import (
    HALF, IntVector, evaluate_form, ldlt_decompose, mat_vec, quotient_lattice,
    require_symmetric_input, to_fraction,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class ParityVector:
    """
    Nonzero element of {0, 1/2}^n.

    Bit i of ``mask`` set means coordinate i equals 1/2; the global class
    order is the integer order of masks.
    """
    mask: int
    n: int

    def __post_init__(self):
        if not 0 < self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask} is not a parity vector for n={self.n}")

    @property
    def point(self) -> Tuple[Fraction, ...]:
        return mask_point(self.mask, self.n)

    @property
    def bits(self) -> str:
        return "".join("1" if self.mask >> i & 1 else "0" for i in range(self.n))

    def __str__(self) -> str:
        return self.bits


def parity_vectors(n: int) -> List[ParityVector]:
    """The 2^n - 1 parity vectors in global order."""
    return [ParityVector(mask, n) for mask in range(1, 1 << n)]


def mask_point(mask: int, n: int) -> Tuple[Fraction, ...]:
    return tuple(HALF if mask >> i & 1 else Fraction(0) for i in range(n))


def parity_mask(vector: Sequence[int]) -> int:
    """Parity class of an integer vector v, i.e. of v/2 mod Z^n."""
    return sum(1 << i for i, x in enumerate(vector) if x % 2)


def _target_point(v, n: int) -> Tuple[Fraction, ...]:
    if isinstance(v, ParityVector):
        return v.point
    if isinstance(v, int):
        return mask_point(v, n)
    return tuple(to_fraction(x) for x in v)


@dataclass(frozen=True)
class CvpResult:
    """Squared A-distance to the target and every lattice point attaining it."""
    min_value: Fraction
    minimizers: Tuple[IntVector, ...]


class FormLattice:
    """
    Z^n equipped with a positive definite form, ready for enumeration.

    The LDL^T factors are computed once; ``closest`` and ``ball`` share the
    same depth-first search.
    """

    def __init__(self, A: np.ndarray):
        require_symmetric_input(A)
        result = ldlt_decompose(A)
        bad = next((i for i, d in enumerate(result.D) if d <= 0), None)
        if bad is None and not result.ok:
            bad = result.failed_index
        if bad is not None:
            raise NotPositiveDefiniteError(
                f"form is not positive definite (pivot {bad + 1} is not positive)", pivot=bad)
        self.A = A
        self.n = A.shape[0]
        self.L = result.L
        self.D = result.D

    def _search(self, target: Sequence[Fraction], bound: Fraction, shrink: bool):
        """
        Enumerate x with A[x - target] <= bound.

        With ``shrink`` the bound follows the best value found so far and only
        points at the final minimum are returned.
        """
        n, L, D = self.n, self.L, self.D
        best = [bound]
        found: List[Tuple[Fraction, IntVector]] = []
        x = [0] * n

        def visit(i: int, partial: Fraction) -> None:
            c = target[i] - sum(L[j, i] * (x[j] - target[j]) for j in range(i + 1, n))
            down = math.floor(c)
            up = down + 1
            down_open = up_open = True
            while down_open or up_open:
                if down_open and (not up_open or c - down <= up - c):
                    xi = down
                    gap = c - down
                    is_down = True
                else:
                    xi = up
                    gap = up - c
                    is_down = False
                value = partial + D[i] * gap * gap
                if value > best[0]:
                    if is_down:
                        down_open = False
                    else:
                        up_open = False
                    continue
                if is_down:
                    down -= 1
                else:
                    up += 1
                x[i] = xi
                if i > 0:
                    visit(i - 1, value)
                    continue
                if shrink and value < best[0]:
                    best[0] = value
                    found.clear()
                found.append((value, tuple(x)))

        visit(n - 1, Fraction(0))
        return best[0], found

    def closest(self, v) -> CvpResult:
        target = _target_point(v, self.n)
        start = tuple(math.ceil(t - HALF) for t in target)
        bound = evaluate_form(self.A, [s - t for s, t in zip(start, target)])
        value, found = self._search(target, bound, shrink=True)
        minimizers = tuple(sorted(p for val, p in found if val == value))
        return CvpResult(min_value=value, minimizers=minimizers)

    def ball(self, center, radius2) -> List[IntVector]:
        target = tuple(to_fraction(x) for x in center)
        _, found = self._search(target, to_fraction(radius2), shrink=False)
        return sorted(p for _, p in found)


def closest_points(A: np.ndarray, v) -> CvpResult:
    """
    tcvp(A, v) and the complete set tCVP(A, v).

    Args:
        A (np.ndarray): Positive definite form
        v: ParityVector, parity mask, or rational target

    Returns:
        CvpResult: Minimum value and sorted minimizers
    """
    return FormLattice(A).closest(v)


def lattice_points_in_ball(A: np.ndarray, center, radius2) -> List[IntVector]:
    """All integer x with A[x - center] <= radius2, sorted."""
    return FormLattice(A).ball(center, radius2)


def vonorm(A: np.ndarray, v) -> Fraction:
    return 4 * closest_points(A, v).min_value


def theta_values(A: np.ndarray) -> Tuple[Fraction, ...]:
    """Theta_v(A) = -tcvp(A, v) for every mask 1 .. 2^n - 1."""
    lattice = FormLattice(A)
    return tuple(-lattice.closest(mask).min_value for mask in range(1, 1 << lattice.n))


def theta_vector(A: np.ndarray) -> Dict[ParityVector, Fraction]:
    n = A.shape[0]
    return dict(zip(parity_vectors(n), theta_values(A)))


def compute_phi(A: np.ndarray) -> Fraction:
    """
    Sum of all vonorms, extended to semidefinite forms through the quotient lattice.

    Raises:
        NotPositiveDefiniteError: A is not positive semidefinite
    """
    require_symmetric_input(A)
    n = A.shape[0]
    P, reduced = quotient_lattice(A)
    r = len(P)
    if r == 0:
        return Fraction(0)
    lattice = _quotient_form_lattice(reduced)
    total = Fraction(0)
    for mask in range(1, 1 << n):
        projected = mat_vec(P, mask_point(mask, n))
        reduced_mask = sum(1 << i for i, t in enumerate(projected) if to_fraction(t).denominator != 1)
        if reduced_mask:
            total += 4 * lattice.closest(reduced_mask).min_value
    return total


def _quotient_form_lattice(reduced: np.ndarray) -> FormLattice:
    try:
        return FormLattice(reduced)
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError("form is not positive semidefinite", pivot=None) from exc


def voronoi_relevant_vectors(A: np.ndarray) -> Tuple[IntVector, ...]:
    """
    The vectors +-(x1 - x2) for every class with exactly two closest points.

    Classes with more closest points contribute nothing.
    """
    lattice = FormLattice(A)
    vectors = []
    for mask in range(1, 1 << lattice.n):
        points = lattice.closest(mask).minimizers
        if len(points) == 2:
            diff = tuple(a - b for a, b in zip(points[0], points[1]))
            vectors.extend([diff, tuple(-x for x in diff)])
    return tuple(sorted(vectors))


@dataclass(frozen=True)
class GeneralizedConfiguration:
    """
    Centred closest-point sets of a semidefinite form.

    For each parity class of the quotient lattice (rank ``rank``) the vectors
    2(x - v), x in tCVP, are recorded. A primitive positive definite form
    yields exactly one +- pair per class.
    """
    n: int
    rank: int
    classes: Tuple[Tuple[int, Tuple[IntVector, ...]], ...]

    @property
    def vectors(self) -> Tuple[IntVector, ...]:
        return tuple(sorted(v for _, vecs in self.classes for v in vecs))

    @property
    def is_primitive(self) -> bool:
        return self.rank == self.n and all(len(vecs) == 2 for _, vecs in self.classes)

    def degenerate_classes(self) -> Dict[int, int]:
        return {mask: len(vecs) for mask, vecs in self.classes if len(vecs) > 2}


def form_vector_system(A: np.ndarray) -> GeneralizedConfiguration:
    """
    Generalized configuration of a positive semidefinite form.

    Args:
        A (np.ndarray): Semidefinite form with rational kernel

    Returns:
        GeneralizedConfiguration: Rank and per-class centred vectors
    """
    require_symmetric_input(A)
    n = A.shape[0]
    P, reduced = quotient_lattice(A)
    r = len(P)
    if r == 0:
        return GeneralizedConfiguration(n=n, rank=0, classes=())
    lattice = _quotient_form_lattice(reduced)
    classes = []
    for mask in range(1, 1 << r):
        centre = mask_point(mask, r)
        points = lattice.closest(mask).minimizers
        vecs = tuple(sorted(tuple(int(2 * (x - c)) for x, c in zip(p, centre)) for p in points))
        classes.append((mask, vecs))
    return GeneralizedConfiguration(n=n, rank=r, classes=tuple(classes))
