"""
Shared test fixtures: seeded randomness, unimodular matrices, random forms.
"""

import random
from fractions import Fraction

import pytest

from exact_arith import exact_matrix, random_unimodular

HEXAGONAL = [[2, -1], [-1, 2]]
A3_GRAM = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]


def random_pd_form(rng: random.Random, n: int, spread: int = 3):
    """U^T D U + I style positive definite form with small rational entries."""
    U = random_unimodular(n, rng, steps=2 * n)
    diag = [Fraction(rng.randint(1, spread), rng.randint(1, 2)) for _ in range(n)]
    rows = [[sum(U[k][i] * diag[k] * U[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return exact_matrix(rows)


@pytest.fixture
def rng():
    return random.Random(20240517)


@pytest.fixture
def hexagonal():
    return exact_matrix(HEXAGONAL)


@pytest.fixture
def identity2():
    return exact_matrix([[1, 0], [0, 1]])


@pytest.fixture
def a3_gram():
    return exact_matrix(A3_GRAM)


@pytest.fixture
def pd_forms(rng):
    """Sixty random positive definite forms, n = 1..4."""
    return [random_pd_form(rng, rng.randint(1, 4)) for _ in range(60)]
