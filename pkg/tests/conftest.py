from fractions import Fraction

import numpy as np
import pytest

from qrank.graph import WebGraph, google_from_graph, random_graph
from qrank.quantum import Liouvillian

# Stationary vector of the 4-node fixture at alpha = 17/20, solved exactly in
# rational arithmetic (sympy nullspace of G - I).
FIXTURE4_EXACT = np.array(
    [float(Fraction(1369, 4116)), float(Fraction(659, 2058)),
     float(Fraction(25493, 82320)), float(Fraction(3, 80))]
)
FIXTURE4_EDGES = [(0, 1), (1, 2), (2, 0), (3, 0)]


@pytest.fixture
def fixture4():
    return WebGraph.from_edges(FIXTURE4_EDGES)


@pytest.fixture
def g4(fixture4):
    return google_from_graph(fixture4, 0.85)


@pytest.fixture
def cycle3():
    return WebGraph.from_edges([(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(n, rng, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (a + a.conj().T)


def random_density(n, rng, rank=None):
    k = n if rank is None else rank
    a = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_liouvillian(n, rng):
    """Random Hermitian H, non-negative rates bounded by 1, epsilon in [0, 1]."""
    return Liouvillian(random_hermitian(n, rng), rng.random((n, n)), float(rng.random()))


def random_google(n, rng, alpha=0.85):
    return google_from_graph(random_graph(n, rng), alpha)
