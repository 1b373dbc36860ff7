"""
Polyhedral Cones
Exact conversions between inequality and generator descriptions (through
the Parma Polyhedra Library), facets, faces, intersections and linear images.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import ppl

from errors import EmptyInteriorError
from exact_arith import IntVector, dot, integer_rank, inverse, mat_vec, primitive_vector, row_space_basis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cone:
    """
    Polyhedral cone {x : E x = 0, G x >= 0} = cone(rays) + span(lineality).

    Either description may be missing (None) until a conversion fills it in.
    Rays are primitive integer vectors orthogonal to the lineality space; the
    lineality basis is in reduced echelon form with positive pivots.
    """
    ambient_dim: int
    inequalities: Optional[Tuple[IntVector, ...]] = None
    equalities: Tuple[IntVector, ...] = ()
    rays: Optional[Tuple[IntVector, ...]] = None
    lineality: Tuple[IntVector, ...] = ()

    @property
    def has_rays(self) -> bool:
        return self.rays is not None

    @property
    def has_inequalities(self) -> bool:
        return self.inequalities is not None

    @property
    def dimension(self) -> int:
        cone = self if self.has_rays else dd_rays_from_inequalities(self)
        return integer_rank(list(cone.rays) + list(cone.lineality), self.ambient_dim)

    def contains(self, x) -> bool:
        cone = self if self.has_inequalities else dd_inequalities_from_rays(self)
        return (all(dot(e, x) == 0 for e in cone.equalities)
                and all(dot(a, x) >= 0 for a in cone.inequalities))

    def verify(self) -> bool:
        """Every ray and lineality vector satisfies every constraint."""
        if not (self.has_rays and self.has_inequalities):
            return True
        for r in self.rays:
            if any(dot(e, r) != 0 for e in self.equalities) or any(dot(a, r) < 0 for a in self.inequalities):
                return False
        for l in self.lineality:
            if any(dot(e, l) != 0 for e in self.equalities) or any(dot(a, l) != 0 for a in self.inequalities):
                return False
        return True


@dataclass(frozen=True)
class FacetClass:
    """Inequality indices defining one facet (proportional inequalities grouped)."""
    indices: Tuple[int, ...]
    tight_rays: Tuple[int, ...] = field(default=(), compare=False)

    @property
    def multiplicity(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class Face:
    parent: Cone
    active: Tuple[int, ...]
    as_cone: Cone

    @property
    def dimension(self) -> int:
        return self.as_cone.dimension


def _expression(coeffs) -> ppl.Linear_Expression:
    return ppl.Linear_Expression(list(primitive_vector(coeffs)), 0)


def _coefficients(obj, dim: int) -> IntVector:
    values = [int(c) for c in obj.coefficients()]
    return tuple(values + [0] * (dim - len(values)))


def _from_constraints(dim: int, inequalities, equalities) -> ppl.C_Polyhedron:
    poly = ppl.C_Polyhedron(dim, "universe")
    for e in equalities:
        poly.add_constraint(_expression(e) == 0)
    for a in inequalities:
        poly.add_constraint(_expression(a) >= 0)
    return poly


def _from_generators(dim: int, rays, lines) -> ppl.C_Polyhedron:
    poly = ppl.C_Polyhedron(dim, "empty")
    poly.add_generator(ppl.point())
    for r in rays:
        if any(r):
            poly.add_generator(ppl.ray(_expression(r)))
    for l in lines:
        if any(l):
            poly.add_generator(ppl.line(_expression(l)))
    return poly


def _orthogonal_part(vectors, basis: Sequence[IntVector]) -> Tuple[IntVector, ...]:
    """Primitive components of ``vectors`` orthogonal to span(basis), sorted, zeros dropped."""
    out = set()
    if not basis:
        out = {primitive_vector(v) for v in vectors if any(v)}
        return tuple(sorted(out))
    gram_inv = inverse([[dot(a, b) for b in basis] for a in basis])
    for v in vectors:
        coeffs = mat_vec(gram_inv, [dot(b, v) for b in basis])
        w = tuple(x - sum(c * b[i] for c, b in zip(coeffs, basis)) for i, x in enumerate(v))
        if any(w):
            out.add(primitive_vector(w))
    return tuple(sorted(out))


def _generators(poly: ppl.C_Polyhedron, dim: int) -> Tuple[Tuple[IntVector, ...], Tuple[IntVector, ...]]:
    """Extreme rays (orthogonal to the lineality space) and lineality basis."""
    rays, lines = [], []
    for gen in poly.minimized_generators():
        if gen.is_line():
            lines.append(_coefficients(gen, dim))
        elif gen.is_ray():
            rays.append(_coefficients(gen, dim))
    lineality = tuple(row_space_basis(lines, dim)) if lines else ()
    return _orthogonal_part(rays, lineality), lineality


def dd_rays_from_inequalities(cone: Cone) -> Cone:
    """
    Fill in extreme rays (and lineality) from the H-description.

    Args:
        cone (Cone): Cone with inequalities

    Returns:
        Cone: Same cone with both descriptions; the inequalities are kept as given
    """
    if not cone.has_inequalities:
        raise ValueError("cone has no inequality description")
    dim = cone.ambient_dim
    poly = _from_constraints(dim, cone.inequalities, cone.equalities)
    rays, lineality = _generators(poly, dim)
    logger.debug("dd: %d inequalities in R^%d -> %d rays, lineality %d",
                 len(cone.inequalities), dim, len(rays), len(lineality))
    return Cone(ambient_dim=dim, inequalities=cone.inequalities,
                equalities=cone.equalities, rays=rays, lineality=lineality)


def dd_inequalities_from_rays(cone: Cone) -> Cone:
    """
    Fill in equalities and irredundant facet inequalities from the V-description.

    Generators that are not extreme are dropped, and lineality implied by
    opposite generators moves into the lineality basis. Facet normals are
    taken inside the span of the cone.
    """
    if not cone.has_rays:
        raise ValueError("cone has no ray description")
    dim = cone.ambient_dim
    poly = _from_generators(dim, cone.rays, cone.lineality)
    inequalities, equalities = [], []
    for constraint in poly.minimized_constraints():
        coeffs = _coefficients(constraint, dim)
        if not any(coeffs):
            continue
        if constraint.is_equality():
            equalities.append(coeffs)
        else:
            inequalities.append(coeffs)
    equalities = tuple(row_space_basis(equalities, dim)) if equalities else ()
    rays, lineality = _generators(poly, dim)
    return Cone(ambient_dim=dim, inequalities=_orthogonal_part(inequalities, equalities),
                equalities=equalities, rays=rays, lineality=lineality)


def _both(cone: Cone) -> Cone:
    if cone.has_rays and cone.has_inequalities:
        return cone
    if cone.has_inequalities:
        return dd_rays_from_inequalities(cone)
    return dd_inequalities_from_rays(cone)


def irredundant_facets(cone: Cone) -> List[FacetClass]:
    """
    Facet-defining inequalities, proportional ones grouped with full multiplicity.

    An inequality defines a facet iff the rays it is tight on, together with
    the lineality space, span a subspace of dimension dim(cone) - 1.
    """
    cone = _both(cone)
    if not cone.has_inequalities or cone.inequalities is None:
        return []
    base = list(cone.lineality)
    dim = integer_rank(list(cone.rays) + base, cone.ambient_dim)
    groups = {}
    for idx, a in enumerate(cone.inequalities):
        tight = tuple(k for k, r in enumerate(cone.rays) if dot(a, r) == 0)
        if integer_rank([cone.rays[k] for k in tight] + base, cone.ambient_dim) == dim - 1:
            groups.setdefault(tight, []).append(idx)
    classes = [FacetClass(indices=tuple(idxs), tight_rays=tight) for tight, idxs in groups.items()]
    return sorted(classes, key=lambda f: f.indices)


def face_of(cone: Cone, active: Sequence[int]) -> Face:
    """
    The face of ``cone`` where the ``active`` inequalities are tight.

    Returns:
        Face: Face whose cone carries a recomputed dual description
    """
    cone = _both(cone)
    active = tuple(sorted(set(active)))
    rows = [cone.inequalities[i] for i in active]
    rays = tuple(r for r in cone.rays if all(dot(a, r) == 0 for a in rows))
    face_cone = dd_inequalities_from_rays(Cone(ambient_dim=cone.ambient_dim, rays=rays,
                                               lineality=cone.lineality))
    return Face(parent=cone, active=active, as_cone=face_cone)


def _h_description(cone: Cone) -> Cone:
    return cone if cone.has_inequalities else dd_inequalities_from_rays(cone)


def intersect(c1: Cone, c2: Cone) -> Cone:
    """Intersection by concatenating both H-descriptions and re-running DD."""
    if c1.ambient_dim != c2.ambient_dim:
        raise ValueError("cones live in different spaces")
    h1, h2 = _h_description(c1), _h_description(c2)
    combined = Cone(ambient_dim=c1.ambient_dim,
                    inequalities=tuple(h1.inequalities) + tuple(h2.inequalities),
                    equalities=tuple(h1.equalities) + tuple(h2.equalities))
    return dd_rays_from_inequalities(combined)


def linear_image(cone: Cone, M) -> Cone:
    """
    Image of a cone under the rational linear map M (target x ambient).

    Returns:
        Cone: Image with both descriptions and only extreme generators
    """
    cone = _both(cone)
    target = len(M)
    images = tuple(primitive_vector(mat_vec(M, r)) for r in cone.rays)
    lin = tuple(primitive_vector(mat_vec(M, l)) for l in cone.lineality)
    return dd_inequalities_from_rays(Cone(ambient_dim=target, rays=images, lineality=lin))


def interior_point(cone: Cone) -> tuple:
    """Sum of the extreme rays and lineality basis; lies in the relative interior."""
    cone = cone if cone.has_rays else dd_rays_from_inequalities(cone)
    generators = list(cone.rays) + list(cone.lineality)
    if not generators:
        raise EmptyInteriorError("the zero cone has no interior point")
    return tuple(sum(g[i] for g in generators) for i in range(cone.ambient_dim))
