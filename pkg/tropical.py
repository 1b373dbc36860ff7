"""
Tropical Theta Constants
Linear theta maps on iso-edge cells, conorms, the matroidal-locus check and
the pairwise verification that theta images of distinct domains meet only
in common, arithmetically equivalent faces.
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from equivalence import are_equivalent, canonical_key, embeds_into
from errors import EmptyInteriorError, IsoEdgeError, NotPositiveDefiniteError
from exact_arith import (
    IntVector, dot, evaluate_form, form_functional, integer_determinant,
    integer_rank, inverse, is_positive_definite, matrix_to_sym, primitive_vector, rref,
    sign_normalized, sym_dim, sym_n, sym_to_matrix, to_fraction,
)
from lattice_cvp import (
    FormLattice, ParityVector, form_vector_system, lattice_points_in_ball, mask_point,
    parity_mask, parity_vectors, theta_values,
)
from polyhedra import (
    Cone, dd_inequalities_from_rays, intersect, interior_point, linear_image,
)

logger = logging.getLogger(__name__)

PERMUTATION_AWARE_MAX_N = 4


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _as_sym(form) -> Tuple[Fraction, ...]:
    if isinstance(form, np.ndarray):
        return matrix_to_sym(form)
    return tuple(to_fraction(x) for x in form)


# ---------------------------------------------------------------------------
# Theta maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaLinearMap:
    """
    Theta restricted to one cell, as a (2^n - 1) x n(n+1)/2 matrix.

    Row ``mask - 1`` is the functional Q -> -Q[x_v - v] for the closest
    point x_v recorded at the cell's interior form.
    """
    key: str
    n: int
    rows: Tuple[Tuple[Fraction, ...], ...]
    closest: Tuple[IntVector, ...] = ()

    def apply(self, form) -> Tuple[Fraction, ...]:
        coords = _as_sym(form)
        return tuple(dot(row, coords) for row in self.rows)

    @property
    def rank(self) -> int:
        return integer_rank(self.rows, sym_dim(self.n))

    @property
    def injective(self) -> bool:
        return self.rank == sym_dim(self.n)


def theta_linear_map(cell) -> ThetaLinearMap:
    """
    Linear theta map of a cell whose interior form is positive definite.

    The map is checked against direct theta computation at the interior form
    and at every positive definite extreme ray.

    Args:
        cell: CellRecord (anything with ``key`` and ``cone``)

    Raises:
        NotPositiveDefiniteError: the interior form is not positive definite
        IsoEdgeError: the map disagrees with direct computation
    """
    cone = cell.cone
    n = sym_n(cone.ambient_dim)
    A = sym_to_matrix(interior_point(cone))
    if not is_positive_definite(A):
        raise NotPositiveDefiniteError(f"cell {cell.key[:12]} has no positive definite interior form")
    lattice = FormLattice(A)
    rows = []
    closest = []
    for mask in range(1, 1 << n):
        x = lattice.closest(mask).minimizers[0]
        offset = tuple(a - c for a, c in zip(x, mask_point(mask, n)))
        rows.append(tuple(-c for c in form_functional(offset)))
        closest.append(x)
    theta_map = ThetaLinearMap(key=cell.key, n=n, rows=tuple(rows), closest=tuple(closest))
    checkpoints = [A] + [sym_to_matrix(r) for r in cone.rays]
    for B in checkpoints:
        if is_positive_definite(B) and theta_map.apply(B) != theta_values(B):
            raise IsoEdgeError(f"theta map of cell {cell.key[:12]} disagrees with direct "
                               f"computation at {matrix_to_sym(B)}")
    return theta_map


# ---------------------------------------------------------------------------
# Conorms
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def conorm_matrix(n: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """
    2^{3-n} (-1)^{<v, w>} over nonzero v (rows) and nonzero w (columns).

    The w = 0 column is dropped since Theta_0 = 0.
    """
    scale = Fraction(8, 1 << n)
    size = 1 << n
    return tuple(tuple(scale * (-1) ** _popcount(v & w) for w in range(1, size))
                 for v in range(1, size))


def full_sign_transform(values: Sequence) -> Tuple[Fraction, ...]:
    """2^{3-n} H x on all 2^n coordinates, w = 0 included."""
    size = len(values)
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError(f"{size} is not a power of two")
    scale = Fraction(8, size)
    return tuple(scale * sum((-1) ** _popcount(v & w) * to_fraction(x) for w, x in enumerate(values))
                 for v in range(size))


def conorm_transform(theta: Sequence) -> Tuple[Fraction, ...]:
    """Conorms from theta values in mask order 1 .. 2^n - 1."""
    n = (len(theta) + 1).bit_length() - 1
    matrix = conorm_matrix(n)
    return tuple(dot(row, [to_fraction(t) for t in theta]) for row in matrix)


def conorm_values(A: np.ndarray) -> Tuple[Fraction, ...]:
    return conorm_transform(theta_values(A))


def conorm_vector(A: np.ndarray) -> Dict[ParityVector, Fraction]:
    """
    Conorm of a positive definite form, keyed by parity vector.

    Raises:
        NotPositiveDefiniteError: A is not positive definite
    """
    n = A.shape[0]
    return dict(zip(parity_vectors(n), conorm_values(A)))


def theta_from_conorm(conorms: Sequence) -> Tuple[Fraction, ...]:
    """
    Inverse of the conorm transform.

    The zero conorm is fixed by Theta_0 = 0, then Theta = H c / 8.
    """
    values = [to_fraction(c) for c in conorms]
    full = [-sum(values, Fraction(0))] + values
    size = len(full)
    return tuple(Fraction(1, 8) * sum((-1) ** _popcount(v & w) * c for v, c in enumerate(full))
                 for w in range(1, size))


# ---------------------------------------------------------------------------
# Matroidal locus
# ---------------------------------------------------------------------------

def matroidal_cone(cell, theta_map: Optional[ThetaLinearMap] = None) -> Cone:
    """The part of the cell's cone where every conorm is nonnegative."""
    theta_map = theta_map or theta_linear_map(cell)
    matrix = conorm_matrix(theta_map.n)
    width = sym_dim(theta_map.n)
    rows = []
    for signs in matrix:
        functional = tuple(sum(s * r[k] for s, r in zip(signs, theta_map.rows)) for k in range(width))
        if any(functional):
            rows.append(primitive_vector(functional))
    halfspaces = Cone(ambient_dim=width, inequalities=tuple(sorted(set(rows))))
    return intersect(cell.cone, halfspaces)


def rank_one_decomposition(ray) -> Optional[Tuple[Fraction, IntVector]]:
    """(c, v) with ray = c v v^T, v primitive and sign-normalized, c > 0; None otherwise."""
    A = sym_to_matrix(ray) if not isinstance(ray, np.ndarray) else ray
    n = A.shape[0]
    R, _ = rref([list(row) for row in A], n)
    if len(R) != 1:
        return None
    i = next((k for k in range(n) if A[k, k] != 0), None)
    if i is None:
        return None
    v = sign_normalized(primitive_vector([A[i, j] for j in range(n)]))
    c = A[i, i] / (v[i] * v[i])
    if c <= 0:
        return None
    if any(A[a, b] != c * v[a] * v[b] for a in range(n) for b in range(n)):
        return None
    return c, v


def is_unimodular_system(vectors: Sequence[Sequence[int]]) -> bool:
    """
    Every maximal minor of the assembled matrix lies in {-1, 0, 1}.

    Raises:
        IsoEdgeError: the vectors do not span
    """
    vecs = sorted({sign_normalized(tuple(int(x) for x in v)) for v in vectors if any(v)})
    if not vecs:
        raise IsoEdgeError("empty vector system")
    n = len(vecs[0])
    if integer_rank(vecs, n) < n:
        raise IsoEdgeError("vector system does not span")
    for subset in itertools.combinations(vecs, n):
        if abs(integer_determinant(subset)) > 1:
            return False
    return True


def _signed_system(vectors: Sequence[IntVector]) -> List[IntVector]:
    return sorted({w for v in vectors for w in (v, tuple(-x for x in v))})


def maximal_unimodular_systems(systems: Sequence[Sequence[IntVector]]) -> List[Tuple[IntVector, ...]]:
    """
    Pairwise inequivalent systems not embeddable in a strictly larger one.

    Args:
        systems: Spanning vector systems, one sign per vector

    Returns:
        list: Representatives, largest first
    """
    distinct: Dict[str, List[IntVector]] = {}
    for system in systems:
        signed = _signed_system(system)
        distinct.setdefault(canonical_key(signed), signed)
    ordered = sorted(distinct.values(), key=lambda s: (-len(s), s))
    maximal = []
    for k, small in enumerate(ordered):
        bigger = [big for big in ordered[:k] if len(big) > len(small)]
        if not any(embeds_into(small, big) is not None for big in bigger):
            maximal.append(tuple(v for v in small if sign_normalized(v) == v))
    return maximal


def check_matroidal_theorem(n: int, records) -> dict:
    """
    Per top cell: the matroidal cone is spanned by rank-one forms v v^T
    whose vectors form a unimodular system.

    Args:
        n (int): Dimension
        records: Cell records; only top-dimensional ones are checked

    Returns:
        dict: Report with per-cell verdicts and the maximal unimodular systems
    """
    top = [r for r in records if r.dimension == sym_dim(n)]
    cells = []
    systems = []
    for record in top:
        entry = {"key": record.key, "violations": []}
        cone = matroidal_cone(record)
        vectors = []
        for ray in cone.rays:
            decomposition = rank_one_decomposition(ray)
            if decomposition is None:
                entry["violations"].append(f"ray {list(ray)} is not rank one")
                continue
            vectors.append(decomposition[1])
        entry["rays"] = [list(r) for r in cone.rays]
        entry["vectors"] = [list(v) for v in sorted(set(vectors))]
        if vectors:
            try:
                if not is_unimodular_system(vectors):
                    entry["violations"].append("vectors are not unimodular")
                else:
                    systems.append(sorted(set(vectors)))
            except IsoEdgeError as exc:
                entry["violations"].append(str(exc))
        else:
            entry["violations"].append("matroidal cone has no rays")
        entry["passed"] = not entry["violations"]
        logger.info("matroidal check n=%d cell %s: %s", n, record.key[:12],
                    "pass" if entry["passed"] else "; ".join(entry["violations"]))
        cells.append(entry)
    maximal = maximal_unimodular_systems(systems) if systems else []
    return {
        "n": n,
        "total": len(cells),
        "passed": sum(1 for c in cells if c["passed"]),
        "cells": cells,
        "maximal_systems": [[list(v) for v in system] for system in maximal],
    }


def matroidal_decomposition(A: np.ndarray) -> Optional[List[Tuple[Fraction, IntVector]]]:
    """
    Write A as sum c_i v_i v_i^T over a unimodular system, read off the conorms.

    The support of the conorm gives the parity classes of the v_i and their
    coefficients. Since A >= c v v^T forces c A^{-1}[v] <= 1, each v_i is
    searched in that ball of the dual form. Returns None when a conorm is
    negative or no choice of vectors reproduces A.
    """
    n = A.shape[0]
    conorms = conorm_values(A)
    if any(c < 0 for c in conorms):
        return None
    dual = inverse(A)
    origin = (0,) * n
    support = []
    for mask, c in enumerate(conorms, start=1):
        if c == 0:
            continue
        candidates = sorted({sign_normalized(v) for v in lattice_points_in_ball(dual, origin, 1 / c)
                             if parity_mask(v) == mask})
        if not candidates:
            return None
        support.append((c, candidates))
    for choice in itertools.product(*(candidates for _, candidates in support)):
        total = [[Fraction(0)] * n for _ in range(n)]
        for (c, _), v in zip(support, choice):
            for a in range(n):
                for b in range(n):
                    total[a][b] += c * v[a] * v[b]
        if all(total[a][b] == A[a, b] for a in range(n) for b in range(n)):
            if choice and not is_unimodular_system(choice):
                continue
            return [(c, v) for (c, _), v in zip(support, choice)]
    return None


# ---------------------------------------------------------------------------
# Conway-Sloane verification
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def gl2_group(n: int) -> Tuple[Tuple[int, ...], ...]:
    """
    GL_n(F_2) as column bitmasks: element g sends mask w to xor of g[i] over bits i of w.
    """
    size = 1 << n
    group = []
    for columns in itertools.product(range(1, size), repeat=n):
        span = {0}
        for col in columns:
            span |= {s ^ col for s in span}
        if len(span) == size:
            group.append(tuple(columns))
    return tuple(group)


def apply_gl2(g: Sequence[int], mask: int) -> int:
    out = 0
    for i, col in enumerate(g):
        if mask >> i & 1:
            out ^= col
    return out


def _permutation_matrix(g: Sequence[int], n: int) -> List[List[int]]:
    """Coordinates y'_w = y_{g w} on theta space."""
    size = 1 << n
    return [[int(apply_gl2(g, w) == u) for u in range(1, size)] for w in range(1, size)]


def _relint_contains(cone: Cone, p: Sequence) -> bool:
    return (all(dot(e, p) == 0 for e in cone.equalities)
            and all(dot(a, p) > 0 for a in cone.inequalities))


def _minimal_face(cone: Cone, p: Sequence) -> Tuple[IntVector, Tuple[IntVector, ...]]:
    """Supporting functional tight exactly on the smallest face through p, and that face's rays."""
    tight = [a for a in cone.inequalities if dot(a, p) == 0]
    functional = tuple(sum(a[k] for a in tight) for k in range(cone.ambient_dim))
    rays = tuple(r for r in cone.rays if dot(functional, r) == 0)
    return functional, rays


def _preimage_system(record, theta_map: ThetaLinearMap, functional: Sequence[int]):
    """Generalized configuration of the cell face mapped onto the functional's face."""
    rays = tuple(r for r in record.cone.rays if dot(functional, theta_map.apply(r)) == 0)
    face = dd_inequalities_from_rays(Cone(ambient_dim=record.cone.ambient_dim, rays=rays,
                                          lineality=record.cone.lineality))
    return form_vector_system(sym_to_matrix(interior_point(face)))


@dataclass(frozen=True)
class _PairTask:
    first: object
    second: object
    map_first: ThetaLinearMap
    map_second: ThetaLinearMap
    image_first: Cone
    image_second: Cone
    transform: Optional[Tuple[int, ...]] = None


def _check_pair(task: _PairTask) -> dict:
    """The three certified conditions for one pair of theta images; worker entry point."""
    report = {
        "pair": [task.first.key, task.second.key],
        "transform": list(task.transform) if task.transform is not None else None,
        "relint_disjoint": True,
        "face_of_both": True,
        "equivalent_faces": True,
        "functionals": [],
        "witness": None,
        "intersection_dim": 0,
    }
    meet = intersect(task.image_first, task.image_second)
    try:
        p = interior_point(meet)
    except EmptyInteriorError:
        report["passed"] = True
        return report
    report["intersection_dim"] = meet.dimension
    report["relint_disjoint"] = not (_relint_contains(task.image_first, p)
                                     and _relint_contains(task.image_second, p))
    functionals = []
    for image in (task.image_first, task.image_second):
        functional, face_rays = _minimal_face(image, p)
        functionals.append(functional)
        if not all(meet.contains(r) for r in face_rays):
            report["face_of_both"] = False
    report["functionals"] = [list(f) for f in functionals]
    if report["face_of_both"]:
        second_functional = functionals[1]
        if task.transform is not None:
            # the second image was permuted; pull its functional back
            size = len(second_functional) + 1
            original = [0] * (size - 1)
            for w in range(1, size):
                original[apply_gl2(task.transform, w) - 1] = second_functional[w - 1]
            second_functional = tuple(original)
        first = _preimage_system(task.first, task.map_first, functionals[0])
        second = _preimage_system(task.second, task.map_second, second_functional)
        witness = None
        if first.rank == second.rank:
            witness = are_equivalent(first, second) if first.rank else ()
        report["equivalent_faces"] = witness is not None
        report["witness"] = [list(row) for row in witness] if witness else None
    report["passed"] = report["relint_disjoint"] and report["face_of_both"] and report["equivalent_faces"]
    return report


def theta_images(records) -> List[Tuple[object, ThetaLinearMap, Cone]]:
    """(record, theta map, theta image cone) for each record."""
    out = []
    for record in records:
        theta_map = theta_linear_map(record)
        out.append((record, theta_map, linear_image(record.cone, theta_map.rows)))
    return out


def conway_sloane_check(n: int, records, permutation_aware: bool = False, workers: int = 1) -> dict:
    """
    Verify that theta images of distinct domains meet only in relative
    boundaries, along a common face, whose preimages are equivalent.

    Args:
        n (int): Dimension
        records: Cell records; only top-dimensional ones are used
        permutation_aware (bool): Also compare against every GL_n(F_2)
            coordinate permutation of the second image (n <= 4)
        workers (int): Worker processes for the pairwise checks

    Returns:
        dict: Report with one entry per checked pair
    """
    if permutation_aware and n > PERMUTATION_AWARE_MAX_N:
        raise ValueError(f"permutation-aware mode supports n <= {PERMUTATION_AWARE_MAX_N}")
    top = sorted((r for r in records if r.dimension == sym_dim(n)), key=lambda r: r.key)
    images = theta_images(top)
    tasks = []
    for i, j in itertools.combinations(range(len(images)), 2):
        (rec_i, map_i, img_i), (rec_j, map_j, img_j) = images[i], images[j]
        tasks.append(_PairTask(rec_i, rec_j, map_i, map_j, img_i, img_j))
    if permutation_aware:
        for i, j in itertools.combinations_with_replacement(range(len(images)), 2):
            (rec_i, map_i, img_i), (rec_j, map_j, img_j) = images[i], images[j]
            seen = {img_j.rays}
            for g in gl2_group(n):
                permuted = linear_image(img_j, _permutation_matrix(g, n))
                if permuted.rays in seen:
                    continue
                seen.add(permuted.rays)
                tasks.append(_PairTask(rec_i, rec_j, map_i, map_j, img_i, permuted, tuple(g)))
    logger.info("conway-sloane check n=%d: %d domains, %d pairs", n, len(top), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            pairs = list(executor.map(_check_pair, tasks))
    else:
        pairs = [_check_pair(task) for task in tasks]
    failures = [p for p in pairs if not p["passed"]]
    for p in failures:
        logger.warning("pair %s/%s fails: relint_disjoint=%s face_of_both=%s equivalent=%s",
                       p["pair"][0][:12], p["pair"][1][:12], p["relint_disjoint"],
                       p["face_of_both"], p["equivalent_faces"])
    return {
        "n": n,
        "domains": len(top),
        "permutation_aware": permutation_aware,
        "total": len(pairs),
        "passed": len(pairs) - len(failures),
        "pairs": pairs,
    }


def segment_delaunay_test(A: np.ndarray, x: Sequence[int], y: Sequence[int]) -> bool:
    """
    True iff the closed A-ball with diameter [x, y] holds no lattice point besides x and y.

    Raises:
        ValueError: x == y, which spans no segment
    """
    x, y = tuple(int(a) for a in x), tuple(int(b) for b in y)
    if x == y:
        raise ValueError(f"segment endpoints coincide at {x}")
    centre = tuple(Fraction(a + b, 2) for a, b in zip(x, y))
    radius2 = evaluate_form(A, [Fraction(a - b, 2) for a, b in zip(x, y)])
    return set(lattice_points_in_ball(A, centre, radius2)) == {x, y}
