"""
Tests for theta maps, conorms, the matroidal check, the pairwise image check
and the segment test.
"""

from fractions import Fraction

import networkx as nx
import pytest

from enumeration import domain_record, enumerate_cells
from errors import IsoEdgeError, NotPositiveDefiniteError
from exact_arith import exact_matrix, identity
from isoedge import from_form
from lattice_cvp import closest_points, mask_point, parity_mask, theta_values
from tropical import (
    apply_gl2, check_matroidal_theorem, conorm_values, conorm_vector, conway_sloane_check,
    full_sign_transform, gl2_group, is_unimodular_system, matroidal_cone, matroidal_decomposition,
    rank_one_decomposition, segment_delaunay_test, theta_from_conorm, theta_linear_map,
)

K4_EDGES = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -1, 0), (1, 0, -1), (0, 1, -1)]
D4_GRAM = exact_matrix([[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]])


def graph_form(n, weighted_edges):
    """sum c_e v_e v_e^T over edges of a graph on vertices 0..n, vertex 0 grounded."""
    rows = [[0] * n for _ in range(n)]
    for (a, b), c in weighted_edges:
        v = [0] * n
        if a:
            v[a - 1] += 1
        if b:
            v[b - 1] -= 1
        for i in range(n):
            for j in range(n):
                rows[i][j] += c * v[i] * v[j]
    return exact_matrix(rows)


def vectors_form(vectors):
    n = len(vectors[0])
    return exact_matrix([[sum(v[i] * v[j] for v in vectors) for j in range(n)] for i in range(n)])


@pytest.fixture(scope="module")
def cells_2():
    return enumerate_cells(2)


@pytest.fixture(scope="module")
def cells_3():
    return enumerate_cells(3)


def test_conorm_of_identity_and_hexagonal(identity2, hexagonal):
    assert conorm_values(identity2) == (1, 1, 0)
    assert conorm_values(hexagonal) == (1, 1, 1)
    for n in (1, 3, 4):
        values = conorm_values(identity(n))
        assert [mask for mask, c in enumerate(values, start=1) if c] == [1 << i for i in range(n)]
        assert all(c in (0, 1) for c in values)
    keyed = conorm_vector(identity2)
    assert [pv.mask for pv in keyed] == [1, 2, 3]
    assert list(keyed.values()) == [1, 1, 0]


def test_conorm_support_of_a3(a3_gram):
    values = conorm_values(a3_gram)
    support = {mask for mask, c in enumerate(values, start=1) if c}
    assert support == {1, 4, 3, 6}
    assert all(values[m - 1] == 1 for m in support)


def test_conorm_of_k4():
    values = conorm_values(vectors_form(K4_EDGES))
    assert sum(1 for c in values if c) == 6
    assert values[7 - 1] == 0


def test_conorms_of_graphic_forms(rng):
    """Weighted graphic forms have conorm c_e on the parity class of each edge, zero elsewhere."""
    for _ in range(100):
        n = rng.randint(2, 4)
        graph = nx.gnm_random_graph(n + 1, rng.randint(n, n * (n + 1) // 2), seed=rng.randint(0, 10 ** 6))
        graph.add_edges_from((k, k + 1) for k in range(n))
        weights = {tuple(sorted(e)): rng.randint(1, 5) for e in graph.edges}
        A = graph_form(n, weights.items())
        expected = [0] * ((1 << n) - 1)
        for (a, b), c in weights.items():
            mask = parity_mask([int(i + 1 in (a, b)) for i in range(n)])
            expected[mask - 1] += c
        assert list(conorm_values(A)) == expected


def test_theta_from_conorm_inverts(pd_forms):
    for A in pd_forms:
        assert theta_from_conorm(conorm_values(A)) == theta_values(A)


def test_full_sign_transform_squares_to_a_scalar(rng):
    for n in (1, 2, 3, 4):
        x = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(1 << n)]
        twice = full_sign_transform(full_sign_transform(x))
        assert list(twice) == [Fraction(1 << 6, 1 << n) * v for v in x]
    with pytest.raises(ValueError):
        full_sign_transform([1, 2, 3])


def test_hexagonal_theta_map(hexagonal):
    record = domain_record(from_form(hexagonal))
    theta_map = theta_linear_map(record)
    quarter = Fraction(1, 4)
    assert theta_map.rows == ((-quarter, 0, 0), (0, -quarter, 0), (-quarter, -quarter, -2 * quarter))
    assert theta_map.injective
    assert theta_map.apply(hexagonal) == theta_values(hexagonal)


def test_theta_maps_of_domains_are_injective(cells_3):
    for record in cells_3.top:
        theta_map = theta_linear_map(record)
        assert theta_map.rank == 6


def test_theta_map_needs_positive_definite_interior(cells_2):
    line = cells_2.by_dimension(1)[0]
    with pytest.raises(NotPositiveDefiniteError):
        theta_linear_map(line)


def test_matroidal_cone_in_dimension_two_is_the_domain(cells_2):
    record = cells_2.top[0]
    cone = matroidal_cone(record)
    assert set(cone.rays) == set(record.cone.rays)
    report = check_matroidal_theorem(2, cells_2.records)
    assert report["passed"] == report["total"] == 1
    assert report["maximal_systems"] == [[[0, 1], [1, -1], [1, 0]]]


def test_matroidal_theorem_dimension_three(cells_3):
    report = check_matroidal_theorem(3, cells_3.records)
    assert report["passed"] == report["total"] == 1
    assert len(report["maximal_systems"]) == 1
    assert len(report["maximal_systems"][0]) == 6
    assert is_unimodular_system(report["maximal_systems"][0])


def test_is_unimodular_system():
    assert is_unimodular_system([(1, 0), (0, 1), (1, 1)])
    assert is_unimodular_system(K4_EDGES)
    assert not is_unimodular_system([(1, 0), (1, 2)])
    assert not is_unimodular_system([(1, 1, 0), (0, 1, 1), (1, 0, 1)])
    with pytest.raises(IsoEdgeError):
        is_unimodular_system([(1, 1), (2, 2)])


def test_rank_one_decomposition():
    assert rank_one_decomposition((1, 1, -1)) == (1, (1, -1))
    assert rank_one_decomposition((4, 1, 2)) == (1, (2, 1))
    assert rank_one_decomposition((3, 0, 0)) == (3, (1, 0))
    assert rank_one_decomposition((2, 2, -1)) is None
    assert rank_one_decomposition((-1, 0, 0)) is None


def test_matroidal_decomposition(identity2, hexagonal, a3_gram):
    assert matroidal_decomposition(identity2) == [(1, (1, 0)), (1, (0, 1))]
    assert matroidal_decomposition(hexagonal) == [(1, (1, 0)), (1, (0, 1)), (1, (1, -1))]
    terms = matroidal_decomposition(a3_gram)
    assert sorted(v for _, v in terms) == [(0, 0, 1), (0, 1, -1), (1, -1, 0), (1, 0, 0)]

    values = conorm_values(D4_GRAM)
    assert sorted(values)[:4] == [Fraction(-1, 2)] * 3 + [Fraction(1, 2)]
    assert matroidal_decomposition(D4_GRAM) is None


def test_segment_delaunay_examples(identity2, hexagonal):
    assert segment_delaunay_test(identity2, (0, 0), (1, 0))
    assert not segment_delaunay_test(identity2, (0, 0), (1, 1))
    assert segment_delaunay_test(hexagonal, (0, 0), (1, 1))
    assert not segment_delaunay_test(hexagonal, (0, 0), (1, -1))
    with pytest.raises(ValueError):
        segment_delaunay_test(identity2, (1, 2), (1, 2))


def test_closest_pairs_are_delaunay_edges_exactly_when_unique(pd_forms):
    for A in pd_forms[:30]:
        n = A.shape[0]
        for mask in range(1, 1 << n):
            minimizers = closest_points(A, mask).minimizers
            x = minimizers[0]
            y = tuple(int(2 * c - a) for a, c in zip(x, mask_point(mask, n)))
            assert y in minimizers
            assert segment_delaunay_test(A, x, y) == (len(minimizers) == 2)


def test_gl2_group_orders():
    assert len(gl2_group(2)) == 6
    assert len(gl2_group(3)) == 168
    for g in gl2_group(3):
        assert sorted(apply_gl2(g, w) for w in range(8)) == list(range(8))


def test_pairwise_check_with_one_domain(cells_2, cells_3):
    for n, cells in ((2, cells_2), (3, cells_3)):
        report = conway_sloane_check(n, cells.records)
        assert report["domains"] == 1
        assert report["total"] == report["passed"] == 0
    report = conway_sloane_check(2, cells_2.records, permutation_aware=True)
    assert report["passed"] == report["total"]
    with pytest.raises(ValueError):
        conway_sloane_check(5, [], permutation_aware=True)


@pytest.mark.slow
def test_pairwise_check_permutation_aware_dimension_three(cells_3):
    report = conway_sloane_check(3, cells_3.records, permutation_aware=True)
    assert report["passed"] == report["total"]


@pytest.fixture(scope="module")
def domains_4():
    return enumerate_cells(4, min_dim=10)


@pytest.mark.slow
def test_pairwise_check_dimension_four(domains_4):
    report = conway_sloane_check(4, domains_4.records, workers=2)
    assert report["domains"] == 3
    assert report["total"] == 3
    assert report["passed"] == report["total"]


@pytest.mark.slow
def test_matroidal_theorem_dimension_four(domains_4):
    report = check_matroidal_theorem(4, domains_4.records)
    assert report["passed"] == report["total"] == 3
    systems = report["maximal_systems"]
    assert max(len(s) for s in systems) == 10
    assert all(is_unimodular_system([tuple(v) for v in s]) for s in systems)


@pytest.mark.slow
def test_theta_maps_of_domains_are_injective_dimension_four(domains_4):
    assert len(domains_4.top) == 3
    for record in domains_4.top:
        assert theta_linear_map(record).rank == 10
