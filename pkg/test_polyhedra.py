"""
Tests for double description, facets, faces, intersections and images.
"""

import random

import pytest

from errors import EmptyInteriorError
from exact_arith import dot, integer_rank
from polyhedra import (
    Cone, dd_inequalities_from_rays, dd_rays_from_inequalities, face_of, interior_point, intersect,
    irredundant_facets, linear_image,
)

SELLING_2 = ((0, 1, 1), (1, 0, 1), (0, 0, -1))


def test_orthant_rays():
    cone = dd_rays_from_inequalities(Cone(ambient_dim=3, inequalities=((1, 0, 0), (0, 1, 0), (0, 0, 1))))
    assert cone.rays == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    assert cone.lineality == ()
    assert cone.dimension == 3
    assert cone.verify()


def test_selling_cone_rays():
    cone = dd_rays_from_inequalities(Cone(ambient_dim=3, inequalities=SELLING_2))
    assert set(cone.rays) == {(1, 0, 0), (0, 1, 0), (1, 1, -1)}


def test_redundant_inequalities_are_not_facets():
    inequalities = SELLING_2 + ((1, 1, 1), (0, 2, 2))
    cone = dd_rays_from_inequalities(Cone(ambient_dim=3, inequalities=inequalities))
    facets = irredundant_facets(cone)
    assert [f.indices for f in facets] == [(0, 4), (1,), (2,)]
    assert facets[0].multiplicity == 2


def test_square_pyramid():
    """Four rays over a square: a non-simplicial cone."""
    inequalities = ((1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1))
    cone = dd_rays_from_inequalities(Cone(ambient_dim=3, inequalities=inequalities))
    assert set(cone.rays) == {(1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1)}
    assert len(irredundant_facets(cone)) == 4


def test_lineality_and_equalities():
    halfplane = dd_rays_from_inequalities(Cone(ambient_dim=2, inequalities=((1, 0),)))
    assert halfplane.rays == ((1, 0),)
    assert halfplane.lineality == ((0, 1),)

    flat = dd_rays_from_inequalities(Cone(ambient_dim=3, inequalities=((1, 0, 0), (0, 1, 0)),
                                          equalities=((0, 0, 1),)))
    assert set(flat.rays) == {(1, 0, 0), (0, 1, 0)}
    assert flat.dimension == 2


def test_inequalities_from_rays_round_trip():
    cone = Cone(ambient_dim=3, rays=((1, 0, 0), (0, 1, 0), (1, 1, -1), (2, 1, -1)))
    both = dd_inequalities_from_rays(cone)
    assert set(both.rays) == {(1, 0, 0), (0, 1, 0), (1, 1, -1)}
    again = dd_rays_from_inequalities(Cone(ambient_dim=3, inequalities=both.inequalities))
    assert set(again.rays) == set(both.rays)
    for ray in cone.rays:
        assert both.contains(ray)
    assert not both.contains((0, 0, 1))


def test_rays_in_a_subspace_get_equalities():
    cone = dd_inequalities_from_rays(Cone(ambient_dim=3, rays=((1, 0, 0), (0, 1, 0))))
    assert len(cone.equalities) == 1
    assert cone.contains((2, 3, 0))
    assert not cone.contains((0, 0, 1))
    assert cone.dimension == 2


def test_face_of():
    cone = dd_rays_from_inequalities(Cone(ambient_dim=3, inequalities=SELLING_2))
    facet = irredundant_facets(cone)[2]
    face = face_of(cone, facet.indices)
    assert set(face.as_cone.rays) == {(1, 0, 0), (0, 1, 0)}
    assert face.dimension == 2
    edge = face_of(cone, (0, 2))
    assert edge.as_cone.rays == ((1, 0, 0),)


def test_intersect():
    c1 = Cone(ambient_dim=2, inequalities=((1, 0), (0, 1)))
    c2 = Cone(ambient_dim=2, inequalities=((1, -1),))
    meet = intersect(c1, c2)
    assert set(meet.rays) == {(1, 0), (1, 1)}


def test_linear_image():
    cone = Cone(ambient_dim=3, rays=((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    image = linear_image(cone, [[1, 0, 1], [0, 1, 1]])
    assert set(image.rays) == {(1, 0), (0, 1)}


def test_interior_point():
    cone = dd_rays_from_inequalities(Cone(ambient_dim=3, inequalities=SELLING_2))
    point = interior_point(cone)
    assert point == (2, 2, -1)
    assert all(sum(a * x for a, x in zip(ineq, point)) > 0 for ineq in SELLING_2)
    with pytest.raises(EmptyInteriorError):
        interior_point(Cone(ambient_dim=2, rays=()))


def random_generators(rng: random.Random, dim: int, count: int):
    out = []
    while len(out) < count:
        v = tuple(rng.randint(-3, 3) for _ in range(dim))
        if any(v):
            out.append(v)
    return tuple(out)


def test_opposite_generators_become_lineality():
    halfplane = dd_inequalities_from_rays(Cone(ambient_dim=2, rays=((1, 0), (0, 1), (0, -1))))
    assert halfplane.rays == ((1, 0),)
    assert halfplane.lineality == ((0, 1),)
    assert halfplane.inequalities == ((1, 0),)
    assert halfplane.dimension == 2

    plane = dd_inequalities_from_rays(Cone(ambient_dim=2, rays=((1, 0), (-1, 0), (0, 1), (0, -1))))
    assert plane.rays == ()
    assert plane.lineality == ((1, 0), (0, 1))
    assert plane.inequalities == () and plane.equalities == ()
    assert plane.dimension == 2
    assert plane.contains(interior_point(plane))


def test_duality_round_trip_on_random_cones():
    rng = random.Random(77)
    for _ in range(150):
        dim = rng.randint(2, 8)
        generators = random_generators(rng, dim, rng.randint(1, 12))
        both = dd_inequalities_from_rays(Cone(ambient_dim=dim, rays=generators))
        assert both.verify()
        assert all(both.contains(g) for g in generators)
        assert both.dimension == integer_rank(generators, dim)
        again = dd_rays_from_inequalities(Cone(ambient_dim=dim, inequalities=both.inequalities,
                                               equalities=both.equalities))
        assert again.rays == both.rays
        assert again.lineality == both.lineality


def test_intersection_lies_in_both_operands():
    rng = random.Random(78)
    for _ in range(60):
        dim = rng.randint(2, 5)
        c1 = dd_inequalities_from_rays(Cone(ambient_dim=dim, rays=random_generators(rng, dim, rng.randint(1, 8))))
        c2 = dd_inequalities_from_rays(Cone(ambient_dim=dim, rays=random_generators(rng, dim, rng.randint(1, 8))))
        meet = intersect(c1, c2)
        for v in meet.rays + meet.lineality:
            assert c1.contains(v) and c2.contains(v)
        for v in meet.lineality:
            negated = tuple(-x for x in v)
            assert c1.contains(negated) and c2.contains(negated)


def test_interior_point_is_strictly_inside():
    rng = random.Random(79)
    for _ in range(80):
        dim = rng.randint(2, 6)
        cone = dd_inequalities_from_rays(Cone(ambient_dim=dim, rays=random_generators(rng, dim, rng.randint(1, 10))))
        if not (cone.rays or cone.lineality):
            continue
        point = interior_point(cone)
        assert all(dot(e, point) == 0 for e in cone.equalities)
        assert all(dot(a, point) > 0 for a in cone.inequalities)
