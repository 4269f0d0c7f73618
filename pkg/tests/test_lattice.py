import numpy as np
import pytest
from scipy.special import jv

from qrank.errors import BoundaryContaminationError, ValidationError
from qrank.lattice import (
    chain_graph,
    lattice_liouvillian,
    position_variance,
    propagator,
    single_photon_distribution,
    spread_exponent,
    spread_profile,
    tight_binding,
    two_photon_correlation,
    uniform_line,
)
from qrank.spectral import matrix_exponential


def test_two_site_matrix():
    np.testing.assert_array_equal(tight_binding([0, 0], [1]).matrix, [[0, 1], [1, 0]])


def test_open_and_periodic_three_site():
    b, c = 0.3, -0.8
    h = tight_binding([b] * 3, [c] * 2).matrix
    np.testing.assert_array_equal(h, [[b, c, 0], [c, b, c], [0, c, b]])
    hp = tight_binding([b] * 3, [c] * 3, "periodic").matrix
    assert hp[0, 2] == hp[2, 0] == c


def test_tight_binding_validation():
    with pytest.raises(ValidationError):
        tight_binding([0, 0, 0], [1, 1, 1])
    with pytest.raises(ValidationError):
        tight_binding([0, 0, 0], [1, 1], "periodic")
    with pytest.raises(ValidationError):
        tight_binding([0, 0], [1], "ring")


def test_matrix_exactly_symmetric(rng):
    for _ in range(10):
        n = int(rng.integers(3, 12))
        h = tight_binding(rng.normal(size=n), rng.normal(size=n), "periodic").matrix
        assert np.array_equal(h, h.T)


def test_propagator_identity_and_inverse(rng):
    h = tight_binding(rng.normal(size=6), rng.normal(size=5))
    np.testing.assert_allclose(propagator(h, 0.0).matrix, np.eye(6), atol=1e-15)
    z = 2.7
    prod = propagator(h, z).matrix @ propagator(h, -z).matrix
    assert np.max(np.abs(prod - np.eye(6))) < 1e-10


def test_propagator_matches_pade(rng):
    h = tight_binding(rng.normal(size=7), rng.normal(size=6))
    np.testing.assert_allclose(
        propagator(h, 1.3).matrix, matrix_exponential(-1j * h.matrix, 1.3), atol=1e-12
    )


def test_coupler_closed_form():
    h = tight_binding([0, 0], [1])
    for z in (0.3, np.pi / 4, np.pi / 2, 2.0):
        closed = np.cos(z) * np.eye(2) - 1j * np.sin(z) * np.array([[0, 1], [1, 0]])
        np.testing.assert_allclose(propagator(h, z).matrix, closed, atol=1e-14)
    assert abs(abs(propagator(h, np.pi / 2).matrix[0, 1]) ** 2 - 1) < 1e-10


def test_single_photon_distribution(rng):
    h = tight_binding([0, 0], [1])
    np.testing.assert_allclose(single_photon_distribution(propagator(h, np.pi / 4), 0), [0.5, 0.5])
    line = uniform_line(7)
    np.testing.assert_array_equal(single_photon_distribution(propagator(line, 0.0), 3), np.eye(7)[3])
    for _ in range(10):
        hr = tight_binding(rng.normal(size=6), rng.normal(size=5))
        p = single_photon_distribution(propagator(hr, rng.normal() * 5), 2)
        assert abs(p.sum() - 1) < 1e-12
    with pytest.raises(ValidationError):
        single_photon_distribution(propagator(line, 1.0), 7)


def test_two_photon_no_evolution():
    u = propagator(uniform_line(5), 0.0)
    gamma = two_photon_correlation(u, 1, 3)
    expected = np.zeros((5, 5))
    expected[1, 3] = expected[3, 1] = 1.0
    np.testing.assert_allclose(gamma, expected, atol=1e-15)


def test_hong_ou_mandel_dip():
    u = propagator(tight_binding([0, 0], [1]), np.pi / 4)
    gamma = two_photon_correlation(u, 0, 1)
    assert gamma[0, 1] < 1e-10 and gamma[1, 0] < 1e-10
    # bunched outcomes carry weight G_qq / 2 each
    np.testing.assert_allclose(np.diag(gamma) / 2, [0.5, 0.5], atol=1e-12)


def test_two_photon_properties(rng):
    for _ in range(10):
        n = int(rng.integers(2, 8))
        h = tight_binding(rng.normal(size=n), rng.normal(size=n - 1))
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        gamma = two_photon_correlation(propagator(h, rng.normal() * 3), a, b)
        assert np.max(np.abs(gamma - gamma.T)) < 1e-12
        assert gamma.min() >= -1e-12
        assert abs(np.sum(np.triu(gamma, 1)) + 0.5 * np.trace(gamma) - 1) < 1e-12


def test_variance_matches_bessel_oracle():
    # infinite line from one site: p_q = J_q(2t)^2, variance 2 t^2
    h = uniform_line(41)
    for t in (1.0, 3.0, 6.0):
        p = single_photon_distribution(propagator(h, t), 20)
        q = np.arange(-20, 21)
        np.testing.assert_allclose(p, jv(q, 2 * t) ** 2, atol=1e-7)
        assert abs(position_variance(p) - 2 * t**2) < 1e-5


def test_unitary_spread_is_ballistic():
    k = spread_exponent(uniform_line(41), 20, np.linspace(2, 6, 9))
    assert 1.9 <= k <= 2.1


def test_dissipative_spread_is_diffusive():
    l = lattice_liouvillian(uniform_line(41), 1.0)
    res = spread_profile(l, 20, np.linspace(2, 8, 7))
    assert 0.9 <= res.exponent <= 1.1
    # hop rate 1/2 to each neighbour: variance t
    np.testing.assert_allclose(res.variances, res.times, rtol=1e-6)


def test_spec_times_to_eight_hit_the_boundary():
    with pytest.raises(BoundaryContaminationError):
        spread_exponent(uniform_line(41), 20, np.arange(2.0, 9.0))


def test_spread_preconditions():
    with pytest.raises(ValidationError):
        spread_exponent(uniform_line(41), 20, [3.0])
    with pytest.raises(ValidationError):
        spread_exponent(uniform_line(41), 20, [0.0, 1, 2, 3])
    with pytest.raises(BoundaryContaminationError):
        spread_exponent(uniform_line(5), 2, [5.0, 10, 20, 40])


def test_chain_graph_is_two_way():
    g = chain_graph(uniform_line(4))
    assert g.edges == {(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2)}
