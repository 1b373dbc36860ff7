"""
Iso-Edge Configurations
One +- vector pair per parity class, the zero-sum triples, the cone they
cut out in symmetric-matrix coordinates, and the flip across a facet.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import DegenerateFormError, FlipError, IsoEdgeError
from exact_arith import (
    IntVector, exact_matrix, form_functional, is_positive_definite, primitive_vector,
    sign_normalized, sym_dim, sym_to_matrix,
)
from lattice_cvp import FormLattice, parity_mask
from polyhedra import Cone, FacetClass, dd_rays_from_inequalities, interior_point, irredundant_facets

logger = logging.getLogger(__name__)

DEFAULT_PERTURBATION = Fraction(1, 100)
MAX_RESAMPLES = 50


@dataclass(frozen=True)
class IsoEdgeConfiguration:
    """
    Sign-normalized representatives indexed by parity mask 1 .. 2^n - 1.

    ``reps[mask - 1]`` is the vector of class ``mask``; the full system is
    the 2(2^n - 1) vectors +-reps.
    """
    n: int
    reps: Tuple[IntVector, ...]

    def __post_init__(self):
        if len(self.reps) != (1 << self.n) - 1:
            raise ValueError(f"expected {(1 << self.n) - 1} representatives, got {len(self.reps)}")

    def rep(self, mask: int) -> IntVector:
        return self.reps[mask - 1]

    @property
    def vectors(self) -> Tuple[IntVector, ...]:
        signed = [v for r in self.reps for v in (r, tuple(-x for x in r))]
        return tuple(sorted(signed))

    @cached_property
    def triple_inequalities(self) -> Tuple["TripleInequality", ...]:
        return tuple(ineq for triple in zero_triples(self) for ineq in triple.inequalities())

    @cached_property
    def domain_cone(self) -> Cone:
        functionals = tuple(primitive_vector(t.functional) for t in self.triple_inequalities)
        cone = Cone(ambient_dim=sym_dim(self.n), inequalities=functionals)
        return dd_rays_from_inequalities(cone)

    @cached_property
    def facets(self) -> Tuple[FacetClass, ...]:
        return tuple(irredundant_facets(self.domain_cone))

    def to_dict(self) -> dict:
        return {"n": self.n, "reps": [list(r) for r in self.reps]}

    @classmethod
    def from_dict(cls, data: dict) -> "IsoEdgeConfiguration":
        return cls(n=int(data["n"]), reps=tuple(tuple(int(x) for x in r) for r in data["reps"]))


@dataclass(frozen=True)
class ZeroTriple:
    """
    Three parity classes a < b < c = a ^ b whose signed representatives sum to zero.

    ``signed[k]`` is signs[k] * rep(classes[k]).
    """
    classes: Tuple[int, int, int]
    signed: Tuple[IntVector, IntVector, IntVector]

    def inequalities(self) -> List["TripleInequality"]:
        return [TripleInequality(triple=self, distinguished=k) for k in range(3)]


@dataclass(frozen=True)
class TripleInequality:
    """A[u_j] + A[u_k] - A[u_i] >= 0 with u_i the distinguished vector of the triple."""
    triple: ZeroTriple
    distinguished: int

    @property
    def distinguished_class(self) -> int:
        return self.triple.classes[self.distinguished]

    @property
    def others(self) -> Tuple[IntVector, IntVector]:
        j, k = [m for m in range(3) if m != self.distinguished]
        return self.triple.signed[j], self.triple.signed[k]

    @property
    def functional(self) -> tuple:
        u_i = self.triple.signed[self.distinguished]
        u_j, u_k = self.others
        return tuple(a + b - c for a, b, c in
                     zip(form_functional(u_j), form_functional(u_k), form_functional(u_i)))

    def flipped_vector(self) -> IntVector:
        u_j, u_k = self.others
        return sign_normalized(tuple(a - b for a, b in zip(u_j, u_k)))


@dataclass(frozen=True)
class Validation:
    valid: bool
    diagnosis: str = "ok"


def from_form(A: np.ndarray) -> IsoEdgeConfiguration:
    """
    Configuration of a primitive positive definite form.

    Raises:
        NotPositiveDefiniteError: A is not positive definite
        DegenerateFormError: some class has more than two closest points
    """
    lattice = FormLattice(A)
    reps: List[IntVector] = []
    degenerate: Dict[int, int] = {}
    for mask in range(1, 1 << lattice.n):
        points = lattice.closest(mask).minimizers
        if len(points) != 2:
            degenerate[mask] = len(points)
            continue
        reps.append(sign_normalized(tuple(a - b for a, b in zip(points[0], points[1]))))
    if degenerate:
        raise DegenerateFormError(degenerate)
    return IsoEdgeConfiguration(n=lattice.n, reps=tuple(reps))


def selling_form(n: int, parameters: Dict[Tuple[int, int], Fraction]) -> np.ndarray:
    """
    sum_{0<=i<j<=n} p_ij (e_i - e_j)(e_i - e_j)^T with e_0 = 0.

    Args:
        n (int): Dimension
        parameters (dict): (i, j) -> p_ij for 0 <= i < j <= n
    """
    rows = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), p in parameters.items():
        vec = [0] * n
        if i > 0:
            vec[i - 1] += 1
        vec[j - 1] -= 1
        for a in range(n):
            for b in range(n):
                rows[a][b] += p * vec[a] * vec[b]
    return exact_matrix(rows)


def principal_form(n: int, perturbation: Fraction = DEFAULT_PERTURBATION, attempt: int = 0) -> np.ndarray:
    """Generic form of the principal domain: p_ij = 1 + perturbation * (distinct integers)."""
    pairs = [(i, j) for i in range(n + 1) for j in range(i + 1, n + 1)]
    offset = attempt * len(pairs)
    parameters = {pair: 1 + perturbation * (k + 1 + offset) for k, pair in enumerate(pairs)}
    return selling_form(n, parameters)


def principal_configuration(n: int, perturbation: Fraction = DEFAULT_PERTURBATION) -> IsoEdgeConfiguration:
    """
    Configuration of Voronoi's principal domain, read off a generic Selling form.

    Resamples deterministically if the sampled form happens to be degenerate.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    for attempt in range(MAX_RESAMPLES):
        try:
            return from_form(principal_form(n, perturbation, attempt))
        except DegenerateFormError as exc:
            logger.warning("principal form attempt %d degenerate: %s", attempt, exc)
    raise IsoEdgeError(f"no primitive principal form found after {MAX_RESAMPLES} attempts")


def zero_triples(config: IsoEdgeConfiguration) -> List[ZeroTriple]:
    """
    All signed zero-sum triples, at most one per class triple {a, b, a ^ b}.

    The representatives of a and b fix the signs: r_a + s r_b = -s_c r_c.
    """
    triples = []
    size = 1 << config.n
    for a in range(1, size):
        for b in range(a + 1, size):
            c = a ^ b
            if c <= b:
                continue
            ra, rb, rc = config.rep(a), config.rep(b), config.rep(c)
            neg_rc = tuple(-x for x in rc)
            for sb in (1, -1):
                total = tuple(x + sb * y for x, y in zip(ra, rb))
                if total == rc:
                    sc = -1
                elif total == neg_rc:
                    sc = 1
                else:
                    continue
                signed_b = tuple(sb * y for y in rb)
                signed_c = tuple(sc * z for z in rc)
                triples.append(ZeroTriple(classes=(a, b, c), signed=(ra, signed_b, signed_c)))
                break
    return triples


def cone_of(config: IsoEdgeConfiguration) -> Cone:
    """Cone cut out by every triple inequality, with its extreme rays computed."""
    return config.domain_cone


def flip(config: IsoEdgeConfiguration, facet: FacetClass, check: bool = True) -> IsoEdgeConfiguration:
    """
    Cross ``facet`` into the adjacent domain.

    Every distinguished vector u_i of the facet's triples is replaced by
    u_j - u_k (sign-normalized). The result is validated.

    Raises:
        FlipError: facet is not irredundant, conflicting replacements, or
            the flipped configuration does not validate
    """
    if facet not in config.facets:
        raise FlipError(f"{facet.indices} is not an irredundant facet of the domain")
    inequalities = config.triple_inequalities
    replacements: Dict[int, IntVector] = {}
    for idx in facet.indices:
        ineq = inequalities[idx]
        mask = ineq.distinguished_class
        vector = ineq.flipped_vector()
        if parity_mask(vector) != mask:
            raise FlipError(f"flipped vector {vector} left parity class {mask}")
        if replacements.setdefault(mask, vector) != vector:
            raise FlipError(f"facet {facet.indices} gives two replacements for class {mask}: "
                            f"{replacements[mask]} and {vector}")
    reps = list(config.reps)
    for mask, vector in replacements.items():
        reps[mask - 1] = vector
    flipped = IsoEdgeConfiguration(n=config.n, reps=tuple(reps))
    if check:
        verdict = validate(flipped)
        if not verdict.valid:
            raise FlipError(f"flip of {config.reps} at facet {facet.indices} "
                            f"(replacing {sorted(replacements)}) is invalid: {verdict.diagnosis}")
    return flipped


def facet_functional(config: IsoEdgeConfiguration, facet: FacetClass) -> IntVector:
    return config.domain_cone.inequalities[facet.indices[0]]


def find_facet(config: IsoEdgeConfiguration, functional: Sequence[int]) -> Optional[FacetClass]:
    """The facet whose supporting functional is a positive multiple of ``functional``."""
    target = primitive_vector(functional)
    for facet in config.facets:
        if primitive_vector(facet_functional(config, facet)) == target:
            return facet
    return None


def interior_form(config: IsoEdgeConfiguration) -> np.ndarray:
    return sym_to_matrix(interior_point(config.domain_cone))


def validate(config: IsoEdgeConfiguration) -> Validation:
    """
    Round-trip check: the interior form of the cone must reproduce the configuration.

    Returns:
        Validation: verdict with a diagnosis on failure
    """
    cone = config.domain_cone
    full = sym_dim(config.n)
    dim = cone.dimension
    if dim != full:
        return Validation(False, f"cone has dimension {dim}, expected {full}")
    if cone.lineality:
        return Validation(False, f"cone has a lineality space of dimension {len(cone.lineality)}")
    A = interior_form(config)
    if not is_positive_definite(A):
        return Validation(False, "interior form is not positive definite")
    try:
        recovered = from_form(A)
    except DegenerateFormError as exc:
        return Validation(False, f"interior form is not primitive: {exc}")
    if recovered != config:
        mismatched = [mask for mask in range(1, 1 << config.n) if recovered.rep(mask) != config.rep(mask)]
        return Validation(False, f"interior form has different representatives in classes {mismatched}")
    return Validation(True)
