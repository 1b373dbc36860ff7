"""
Demo & Self-Check Script for the Iso-Edge Toolkit
Run this (or `python app.py validate`) to validate the core computations
on small cases with known answers.
"""

from fractions import Fraction

from enumeration import enumerate_cells, enumerate_primitive, mass_sum
from exact_arith import exact_matrix, ldlt_decompose
from isoedge import from_form, principal_configuration, validate
from lattice_cvp import compute_phi, theta_values
from tropical import conorm_values, segment_delaunay_test, theta_linear_map

HEXAGONAL = [[2, -1], [-1, 2]]


def print_section(title):
    """Print a formatted section header."""
    print("\n" + "=" * 60)
    print(f"  {title}")
    print("=" * 60)


def print_vector(values, title="Vector"):
    print(f"\n{title}:")
    print("-" * 60)
    for mask, value in enumerate(values, start=1):
        print(f"  class {mask:2d} | {value}")


def demo_1_exact_ldlt():
    """Test 1: LDL^T of the hexagonal form."""
    print_section("TEST 1: Exact LDL^T")

    result = ldlt_decompose(exact_matrix(HEXAGONAL))
    print(f"  D = {[str(d) for d in result.D]}")
    print(f"  L[1][0] = {result.L[1, 0]}")

    assert result.ok, "hexagonal form has nonzero pivots"
    assert result.D == (2, Fraction(3, 2)), "pivots should be 2 and 3/2"
    assert result.L[1, 0] == Fraction(-1, 2), "multiplier should be -1/2"
    singular = ldlt_decompose(exact_matrix([[1, 1], [1, 1]]))
    assert not singular.ok and singular.failed_index == 1, "rank-one form fails at the second pivot"
    print("\n✓ TEST 1 PASSED")


def demo_2_theta_constants():
    """Test 2: Theta constants and phi of the identity form."""
    print_section("TEST 2: Tropical Theta Constants")

    identity = exact_matrix([[1, 0], [0, 1]])
    theta = theta_values(identity)
    print_vector(theta, "Theta(I_2)")

    assert theta == (Fraction(-1, 4), Fraction(-1, 4), Fraction(-1, 2)), "theta of I_2"
    assert compute_phi(identity) == 4, "phi(I_2) is the sum of vonorms 1 + 1 + 2"
    print("\n✓ TEST 2 PASSED")


def demo_3_hexagonal_domain():
    """Test 3: The hexagonal form is primitive and its domain validates."""
    print_section("TEST 3: Hexagonal Iso-Edge Domain")

    config = from_form(exact_matrix(HEXAGONAL))
    cone = config.domain_cone
    print(f"  Representatives: {config.reps}")
    print(f"  Extreme rays:    {cone.rays}")
    print(f"  Facets:          {len(config.facets)}")

    assert len(config.reps) == 3, "one representative per parity class"
    assert set(cone.rays) == {(1, 0, 0), (0, 1, 0), (1, 1, -1)}, "rank-one rays of the Selling cone"
    assert validate(config).valid, "domain round-trips through its interior form"
    print("\n✓ TEST 3 PASSED")


def demo_4_conorms():
    """Test 4: Conorms of the hexagonal form."""
    print_section("TEST 4: Conorms")

    conorms = conorm_values(exact_matrix(HEXAGONAL))
    print_vector(conorms, "Conorm([[2,-1],[-1,2]])")

    assert conorms == (1, 1, 1), "hexagonal form is e1e1^T + e2e2^T + (e1-e2)(e1-e2)^T"
    print("\n✓ TEST 4 PASSED")


def demo_5_enumeration():
    """Test 5: Domain enumeration and theta map injectivity for n = 2, 3."""
    print_section("TEST 5: Flip-Graph Enumeration")

    for n in (2, 3):
        result = enumerate_primitive(n)
        print(f"  n={n}: {len(result.top)} domain(s), |Stab| = {[r.stabilizer for r in result.top]}")
        assert len(result.top) == 1, f"n={n} has one primitive domain"
        for record in result.top:
            assert theta_linear_map(record).injective, "theta is injective on each domain"
    assert principal_configuration(3).domain_cone.dimension == 6, "principal domain is full-dimensional"
    print("\n✓ TEST 5 PASSED")


def demo_6_mass_formula():
    """Test 6: Mass formula for n = 3."""
    print_section("TEST 6: Mass Formula (n=3)")

    result = enumerate_cells(3, 1)
    print(f"  Orbits per dimension: {result.counts()}")
    total = mass_sum(result.records)
    print(f"  Mass sum: {total}")

    assert total == 0, "sum of (-1)^dim / |Stab| vanishes for n >= 3"
    print("\n✓ TEST 6 PASSED")


def demo_7_segments():
    """Test 7: Delaunay segment test."""
    print_section("TEST 7: Delaunay Segments")

    identity = exact_matrix([[1, 0], [0, 1]])
    assert segment_delaunay_test(identity, (0, 0), (1, 0)), "edge of the square"
    assert not segment_delaunay_test(identity, (0, 0), (1, 1)), "diagonal of the square"
    assert segment_delaunay_test(exact_matrix(HEXAGONAL), (0, 0), (1, 1)), "hexagonal short diagonal"
    print("  edge ✓   diagonal ✗   hexagonal diagonal ✓")
    print("\n✓ TEST 7 PASSED")


def run_all_demos():
    """Run all demos and report."""
    try:
        demo_1_exact_ldlt()
        demo_2_theta_constants()
        demo_3_hexagonal_domain()
        demo_4_conorms()
        demo_5_enumeration()
        demo_6_mass_formula()
        demo_7_segments()

        print("\n" + "█" * 60)
        print("█  ALL CHECKS PASSED! ✓")
        print("█" * 60)
        print("\nNext Steps:")
        print("  1. python app.py enumerate --dim 4 --out domains4.json")
        print("  2. python app.py cells --dim 4 --out cells4.json")
        print("  3. python app.py mass-check --census cells4.json")
        print("\n")

    except AssertionError as e:
        print(f"\n✗ TEST FAILED: {e}")
        return False
    except Exception as e:
        print(f"\n✗ ERROR: {e}")
        return False

    return True


if __name__ == "__main__":
    run_all_demos()
