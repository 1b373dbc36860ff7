"""
Tests for canonical keys, equivalence witnesses, stabilizers and embeddings.
"""

from fractions import Fraction

import pytest

from errors import EquivalenceError
from exact_arith import integer_determinant, mat_vec, random_unimodular
from equivalence import (
    are_equivalent, automorphisms, canonical_form, canonical_key, characteristic_weights, embeds_into,
    stabilizer_order, system_vectors,
)
from isoedge import IsoEdgeConfiguration, from_form, principal_configuration
from lattice_cvp import form_vector_system

SIGNED_BASIS_3 = [v for i in range(3) for v in
                  (tuple(int(j == i) for j in range(3)), tuple(-int(j == i) for j in range(3)))]


def transformed(vectors, U):
    return [tuple(mat_vec(U, v)) for v in vectors]


def test_hexagonal_stabilizer(hexagonal):
    config = from_form(hexagonal)
    assert stabilizer_order(config) == 12
    group = automorphisms(config)
    assert len(group) == 12
    assert all(abs(integer_determinant(U)) == 1 for U in group)
    assert len(set(group)) == 12


def test_signed_basis_stabilizer():
    assert stabilizer_order(SIGNED_BASIS_3) == 48


def test_characteristic_weights(rng):
    hexagonal = [(1, 0), (0, 1), (1, -1), (-1, 0), (0, -1), (-1, 1)]
    W = characteristic_weights(hexagonal)
    assert all(W[i, i] == Fraction(1, 3) for i in range(6))
    assert (W == W.T).all()
    for _ in range(20):
        U = random_unimodular(2, rng)
        assert characteristic_weights(transformed(hexagonal, U)).tolist() == W.tolist()
    with pytest.raises(EquivalenceError):
        characteristic_weights([(1, 1), (-1, -1)])


def test_canonical_key_invariance(rng):
    for n in (2, 3):
        config = principal_configuration(n)
        key = canonical_key(config)
        for _ in range(100):
            U = random_unimodular(n, rng)
            assert canonical_key(transformed(config.vectors, U)) == key


def test_are_equivalent_returns_verified_witness(rng):
    config = principal_configuration(3)
    for _ in range(10):
        U = random_unimodular(3, rng)
        image = transformed(config.vectors, U)
        W = are_equivalent(config, image)
        assert W is not None
        assert set(transformed(config.vectors, W)) == set(image)


def test_inequivalent_systems():
    hexagonal = [(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)]
    square = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    assert are_equivalent(hexagonal, square) is None
    assert canonical_key(hexagonal) != canonical_key(square)
    index_two = [(2, 0), (0, 1), (-2, 0), (0, -1)]
    assert are_equivalent(square, index_two) is None


def test_canonical_form_text_and_rejections():
    form = canonical_form([(1, 0), (0, 1)])
    assert form.text.startswith("rank=2;")
    assert len(form.key) == 64
    with pytest.raises(EquivalenceError):
        canonical_form([(1, 1), (2, 2)])
    with pytest.raises(EquivalenceError):
        canonical_form([])


def test_system_vectors_deduplicates(hexagonal):
    assert system_vectors([(1, 0), (1, 0), (0, 1)]) == ((0, 1), (1, 0))
    assert system_vectors(from_form(hexagonal)) == system_vectors(form_vector_system(hexagonal))


def test_stabilizer_of_semidefinite_system_is_infinite():
    from exact_arith import exact_matrix
    system = form_vector_system(exact_matrix([[1, 1], [1, 1]]))
    assert system.rank == 1
    assert stabilizer_order(system) is None


def test_embeds_into():
    square = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    hexagonal = [(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)]
    U = embeds_into(square, hexagonal)
    assert U is not None
    assert set(transformed(square, U)) <= set(hexagonal)
    assert embeds_into(hexagonal, square) is None
    skew = [(1, 0), (1, 2), (-1, 0), (-1, -2)]
    assert embeds_into([(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)], skew) is None


def test_configuration_and_raw_system_share_keys(hexagonal):
    config = from_form(hexagonal)
    assert canonical_key(config) == canonical_key(list(config.vectors))
    assert canonical_key(IsoEdgeConfiguration(n=2, reps=((1, 0), (0, 1), (1, -1)))) == canonical_key(config)
