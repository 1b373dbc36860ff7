"""
Arithmetic Equivalence
Canonical forms of vector systems under GL_n(Z): canonical keys,
equivalence witnesses, stabilizers and embeddings.

The canonical form is built from invariant data only. Vectors are colored
by partition refinement of the weights v_i^T adj(Q) v_j (Q = sum v v^T),
ordered bases are grown level by level keeping the lexicographically
smallest invariant keys, and every surviving basis C yields a candidate
C^{-1}(system) plus the lattice C^{-1} Z^n. The smallest candidate is the
canonical form; the bases attaining it are in bijection with the stabilizer.
"""

import hashlib
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import EquivalenceError
from exact_arith import (
    IntVector, determinant, exact_matrix, format_rational, hermite_normal_form,
    integer_rank, inverse, mat_vec,
)
from isoedge import IsoEdgeConfiguration
from lattice_cvp import GeneralizedConfiguration, parity_mask

logger = logging.getLogger(__name__)

CanonicalKey = str
Matrix = Tuple[Tuple[int, ...], ...]


def system_vectors(obj) -> Tuple[IntVector, ...]:
    """Deduplicated, sorted vector system of a configuration or a raw vector list."""
    if isinstance(obj, (GeneralizedConfiguration, IsoEdgeConfiguration)):
        vectors = obj.vectors
    else:
        vectors = obj
    return tuple(sorted({tuple(int(x) for x in v) for v in vectors}))


def _system_rank(obj) -> Optional[int]:
    if isinstance(obj, GeneralizedConfiguration):
        return obj.rank
    return None


def _gram(vectors: Sequence[IntVector], n: int) -> List[List[int]]:
    Q = [[0] * n for _ in range(n)]
    for v in vectors:
        for i in range(n):
            if v[i]:
                for j in range(n):
                    Q[i][j] += v[i] * v[j]
    return Q


def characteristic_weights(vectors) -> np.ndarray:
    """
    Pairwise weights v_i^T Q^{-1} v_j with Q = sum v v^T.

    Args:
        vectors: Spanning integer vector system (order kept)

    Returns:
        np.ndarray: Symmetric rational weight matrix

    Raises:
        EquivalenceError: the system does not span
    """
    vecs = [tuple(int(x) for x in v) for v in vectors]
    if not vecs:
        raise EquivalenceError("empty vector system")
    n = len(vecs[0])
    Q = _gram(vecs, n)
    if determinant(Q) == 0:
        raise EquivalenceError("vector system does not span")
    Q_inv = inverse(Q)
    rows = [[sum(a * q for a, q in zip(u, Q_inv.dot(np.array(v, dtype=object)))) for v in vecs] for u in vecs]
    return exact_matrix(rows)


def _integer_weights(vecs: Sequence[IntVector], n: int) -> List[List[int]]:
    """v_i^T adj(Q) v_j; invariant because det(U Q U^T) = det Q."""
    Q = _gram(vecs, n)
    det = determinant(Q)
    if det == 0:
        raise EquivalenceError("vector system does not span")
    adj = [[int(x * det) for x in row] for row in inverse(Q)]
    images = [mat_vec(adj, v) for v in vecs]
    return [[sum(a * b for a, b in zip(u, img)) for img in images] for u in vecs]


def _relabel(signatures: Sequence) -> List[int]:
    order = {sig: k for k, sig in enumerate(sorted(set(signatures)))}
    return [order[sig] for sig in signatures]


def _refine_colors(vecs: Sequence[IntVector], W: List[List[int]]) -> List[int]:
    classes: Dict[int, int] = {}
    masks = [parity_mask(v) for v in vecs]
    for m in masks:
        classes[m] = classes.get(m, 0) + 1
    colors = _relabel([(W[i][i], classes[masks[i]]) for i in range(len(vecs))])
    while True:
        signatures = [(colors[i], tuple(sorted(zip(colors, W[i])))) for i in range(len(vecs))]
        refined = _relabel(signatures)
        if len(set(refined)) == len(set(colors)):
            return refined
        colors = refined


def _minimal_tuples(vecs: Sequence[IntVector], W: List[List[int]], colors: List[int],
                    n: int) -> List[Tuple[int, ...]]:
    level: List[Tuple[int, ...]] = [()]
    for depth in range(n):
        best = None
        survivors: List[Tuple[int, ...]] = []
        for t in level:
            basis = [vecs[k] for k in t]
            for c in range(len(vecs)):
                if c in t:
                    continue
                key = (colors[c],) + tuple(W[c][k] for k in t)
                if best is not None and key > best:
                    continue
                if integer_rank(basis + [vecs[c]], n) <= depth:
                    continue
                if best is None or key < best:
                    best = key
                    survivors = []
                survivors.append(t + (c,))
        level = survivors
    return level


def _basis_matrix(vecs: Sequence[IntVector], t: Sequence[int]) -> List[List[int]]:
    """Columns are the chosen vectors."""
    n = len(vecs[0])
    return [[vecs[k][i] for k in t] for i in range(n)]


def _lattice_invariant(C_inv: np.ndarray) -> tuple:
    n = C_inv.shape[0]
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in C_inv.flat), 1)
    columns = [[int(C_inv[i, j] * den) for i in range(n)] for j in range(n)]
    return den, hermite_normal_form(columns)


def _candidate(vecs: Sequence[IntVector], t: Sequence[int]) -> tuple:
    C_inv = inverse(_basis_matrix(vecs, t))
    coords = sorted(tuple(C_inv.dot(np.array(v, dtype=object))) for v in vecs)
    return _lattice_invariant(C_inv), tuple(coords)


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical text of a vector system and the bases attaining it."""
    rank: int
    text: str
    vectors: Tuple[IntVector, ...]
    bases: Tuple[Tuple[int, ...], ...]

    @property
    def key(self) -> CanonicalKey:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def basis_matrix(self, which: int = 0) -> List[List[int]]:
        return _basis_matrix(self.vectors, self.bases[which])


def _render(rank: int, candidate: tuple) -> str:
    (den, hnf), coords = candidate
    lattice = "|".join(",".join(str(x) for x in row) for row in hnf)
    body = "|".join(",".join(format_rational(x) for x in vec) for vec in coords)
    return f"rank={rank};den={den};lattice={lattice};vectors={body}"


def canonical_form(obj) -> CanonicalForm:
    """
    Canonical form of a spanning vector system.

    Raises:
        EquivalenceError: empty or non-spanning system
    """
    vecs = system_vectors(obj)
    if not vecs:
        raise EquivalenceError("empty vector system")
    n = len(vecs[0])
    if integer_rank(vecs, n) < n:
        raise EquivalenceError("vector system does not span")
    W = _integer_weights(vecs, n)
    colors = _refine_colors(vecs, W)
    best = None
    winners: List[Tuple[int, ...]] = []
    for t in _minimal_tuples(vecs, W, colors, n):
        candidate = _candidate(vecs, t)
        if best is None or candidate < best:
            best, winners = candidate, [t]
        elif candidate == best:
            winners.append(t)
    logger.debug("canonical form: %d vectors, %d colors, %d minimal bases",
                 len(vecs), len(set(colors)), len(winners))
    return CanonicalForm(rank=n, text=_render(n, best), vectors=vecs, bases=tuple(winners))


def canonical_key(obj) -> CanonicalKey:
    """sha256 of the canonical form; stable under GL_n(Z)."""
    return canonical_form(obj).key


def stabilizer_order(obj) -> Optional[int]:
    """
    Order of the setwise stabilizer in GL_n(Z).

    Generalized configurations of semidefinite forms have infinite
    stabilizers and return None.
    """
    rank = _system_rank(obj)
    if rank is not None and rank < obj.n:
        return None
    return len(canonical_form(obj).bases)


def _matrix_product(A, B) -> List[List[Fraction]]:
    return [[sum(Fraction(a) * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _as_unimodular(M) -> Optional[Matrix]:
    if any(Fraction(x).denominator != 1 for row in M for x in row):
        return None
    U = tuple(tuple(int(x) for x in row) for row in M)
    if abs(determinant(U)) != 1:
        return None
    return U


def _maps_onto(U: Matrix, source: Sequence[IntVector], target: Sequence[IntVector]) -> bool:
    return {tuple(mat_vec(U, v)) for v in source} == set(target)


def are_equivalent(obj1, obj2) -> Optional[Matrix]:
    """
    Unimodular U with U . system1 = system2, or None if none exists.

    The witness is checked exactly before it is returned.
    """
    f1, f2 = canonical_form(obj1), canonical_form(obj2)
    if f1.rank != f2.rank or f1.text != f2.text:
        return None
    C1 = f1.basis_matrix()
    C2 = f2.basis_matrix()
    U = _as_unimodular(_matrix_product(C2, [list(row) for row in inverse(C1)]))
    if U is None or not _maps_onto(U, f1.vectors, f2.vectors):
        raise EquivalenceError("canonical forms agree but the witness failed verification")
    return U


def automorphisms(obj) -> List[Matrix]:
    """Every element of the stabilizer, as integer matrices."""
    form = canonical_form(obj)
    C0_inv = [list(row) for row in inverse(form.basis_matrix(0))]
    group = []
    for k in range(len(form.bases)):
        U = _as_unimodular(_matrix_product(form.basis_matrix(k), C0_inv))
        if U is None or not _maps_onto(U, form.vectors, form.vectors):
            raise EquivalenceError("stabilizer element failed verification")
        group.append(U)
    return group


def embeds_into(small, big) -> Optional[Matrix]:
    """
    Unimodular U with U . small a subset of big, found by backtracking over basis images.

    Vectors of ``small`` whose coordinates only involve the basis vectors
    placed so far must already land in ``big``.
    """
    small_vecs = system_vectors(small)
    big_vecs = system_vectors(big)
    if not small_vecs or not big_vecs:
        return None
    n = len(small_vecs[0])
    if len(big_vecs[0]) != n or len(small_vecs) > len(big_vecs):
        return None
    basis: List[IntVector] = []
    for v in small_vecs:
        if integer_rank(basis + [v], n) > len(basis):
            basis.append(v)
    if len(basis) < n:
        raise EquivalenceError("embedding source does not span")
    B = [[basis[k][i] for k in range(n)] for i in range(n)]
    B_inv = inverse(B)
    coords = [tuple(B_inv.dot(np.array(v, dtype=object))) for v in small_vecs]
    levels: Dict[int, List[int]] = {}
    for idx, c in enumerate(coords):
        last = max(k for k, x in enumerate(c) if x != 0)
        levels.setdefault(last, []).append(idx)
    big_set = set(big_vecs)
    images: List[IntVector] = []

    def extend(depth: int) -> Optional[Matrix]:
        if depth == n:
            image_matrix = [[images[k][i] for k in range(n)] for i in range(n)]
            U = _as_unimodular(_matrix_product(image_matrix, [list(row) for row in B_inv]))
            if U is not None and all(tuple(mat_vec(U, v)) in big_set for v in small_vecs):
                return U
            return None
        for w in big_vecs:
            if integer_rank(images + [w], n) <= depth:
                continue
            images.append(w)
            consistent = True
            for idx in levels.get(depth, []):
                c = coords[idx]
                image = tuple(sum(c[k] * images[k][i] for k in range(depth + 1)) for i in range(n))
                if image not in big_set:
                    consistent = False
                    break
            if consistent:
                found = extend(depth + 1)
                if found is not None:
                    return found
            images.pop()
        return None

    return extend(0)
