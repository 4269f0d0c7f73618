import numpy as np
import pytest

from conftest import FIXTURE4_EXACT, random_density, random_google, random_hermitian, random_liouvillian
from qrank.classical import continuous_evolve, stationary
from qrank.errors import InvalidStateError, NumericalInstabilityError, ValidationError
from qrank.graph import google_from_graph, google_matrix
from qrank.lattice import uniform_line
from qrank.quantum import (
    HamiltonianSource,
    Liouvillian,
    apply_generator,
    basis_state,
    build_liouvillian,
    check_density_matrix,
    initial_state,
    integrate,
    purity,
    quantum_pagerank,
    residual,
    steady_state_by_integration,
)
from qrank.spectral import steady_state_by_kernel


def brute_force_generator(l, rho):
    """Eq.-by-eq. sum over all N^2 jump operators |i><j|."""
    n = l.dim
    out = -1j * (1 - l.epsilon) * (l.hamiltonian @ rho - rho @ l.hamiltonian)
    for i in range(n):
        for j in range(n):
            op = np.zeros((n, n))
            op[i, j] = 1.0
            ld = op.T
            out = out + l.epsilon * l.rates[i, j] * (
                op @ rho @ ld - 0.5 * (ld @ op @ rho + rho @ ld @ op)
            )
    return out


def test_generator_matches_brute_force(rng):
    for n in (1, 2, 3, 5):
        l = random_liouvillian(n, rng)
        rho = random_density(n, rng)
        np.testing.assert_allclose(apply_generator(l, rho), brute_force_generator(l, rho), atol=1e-13)


def test_symmetrized_hamiltonian(g4):
    l = build_liouvillian("symmetrized", g4, 0.3)
    a = g4.matrix - np.eye(4)
    np.testing.assert_allclose(l.hamiltonian, (a + a.T) / 2)
    np.testing.assert_array_equal(l.rates, g4.matrix)


def test_lattice_source_defaults_to_chain(g4):
    l = build_liouvillian(HamiltonianSource.LATTICE, g4, 0.5)
    np.testing.assert_array_equal(l.hamiltonian, uniform_line(4).matrix)


def test_custom_source_rejects_non_hermitian(g4):
    with pytest.raises(ValidationError):
        build_liouvillian("custom", g4, 0.5, np.triu(np.ones((4, 4))))
    with pytest.raises(ValidationError):
        build_liouvillian("custom", g4, 0.5, np.eye(3))
    with pytest.raises(ValidationError):
        build_liouvillian("custom", g4, 0.5)


def test_liouvillian_validation():
    with pytest.raises(ValidationError):
        Liouvillian(np.eye(2), -np.ones((2, 2)), 0.5)
    with pytest.raises(ValidationError):
        Liouvillian(np.eye(2), np.ones((2, 2)), 1.5)


def test_epsilon_zero_is_von_neumann(g4, rng):
    l = build_liouvillian("symmetrized", g4, 0.0)
    rho = random_density(4, rng)
    h = l.hamiltonian
    np.testing.assert_allclose(apply_generator(l, rho), -1j * (h @ rho - rho @ h), atol=1e-15)
    np.testing.assert_allclose(apply_generator(l, initial_state(4)), 0, atol=1e-16)


def test_epsilon_one_diagonal_is_classical_generator(g4, rng):
    l = build_liouvillian("symmetrized", g4, 1.0)
    p = rng.random(4)
    p /= p.sum()
    out = apply_generator(l, np.diag(p).astype(complex))
    np.testing.assert_allclose(out, np.diag((g4.matrix - np.eye(4)) @ p), atol=1e-15)


def test_scalar_case_is_static():
    l = Liouvillian(np.array([[2.0]]), np.array([[1.0]]), 0.5)
    assert apply_generator(l, np.array([[1.0 + 0j]]))[0, 0] == 0


def test_trace_and_hermiticity_preserved(rng):
    for _ in range(30):
        n = int(rng.integers(1, 11))
        l = random_liouvillian(n, rng)
        rho = random_hermitian(n, rng)  # intermediate RK stages need not be states
        out = apply_generator(l, rho)
        assert abs(np.trace(out)) < 1e-12
        assert np.max(np.abs(out - out.conj().T)) < 1e-12


def test_integrate_zero_time(g4):
    l = build_liouvillian("symmetrized", g4, 0.5)
    snaps = integrate(l, initial_state(4), 0.0)
    assert len(snaps) == 1 and snaps[0][0] == 0.0


def test_integrate_epsilon_one_matches_classical(g4):
    l = build_liouvillian("symmetrized", g4, 1.0)
    p0 = np.array([0.4, 0.3, 0.2, 0.1])
    snaps = integrate(l, np.diag(p0).astype(complex), 200.0, 0.01, snapshot_every=5000)
    assert snaps[-1][0] == 200.0
    for t, rho in snaps:
        classical = continuous_evolve(g4, p0, t=t, dt=0.01, record_every=10**9).final
        np.testing.assert_allclose(np.real(np.diag(rho)), classical, atol=1e-8)
        off = rho - np.diag(np.diag(rho))
        assert np.max(np.abs(off)) < 1e-12


def test_integrate_unitary_preserves_purity(g4):
    l = build_liouvillian("symmetrized", g4, 0.0)
    snaps = integrate(l, basis_state(4, 0), 20.0, 0.01, snapshot_every=50)
    for _, rho in snaps:
        assert abs(purity(rho) - 1) < 1e-9


def test_integrate_rejects_unstable_step(g4):
    l = build_liouvillian("symmetrized", g4, 1.0)
    with pytest.raises(NumericalInstabilityError):
        integrate(l, basis_state(4, 0), 20.0, dt=3.0)


def test_integrate_last_step_shortened(g4):
    l = build_liouvillian("symmetrized", g4, 0.5)
    snaps = integrate(l, initial_state(4), 0.035, 0.01)
    assert [t for t, _ in snaps] == pytest.approx([0, 0.01, 0.02, 0.03, 0.035], abs=1e-15)


def test_positivity_along_trajectories(rng):
    for _ in range(5):
        g = random_google(int(rng.integers(2, 7)), rng)
        l = build_liouvillian("symmetrized", g, float(rng.random()))
        for _, rho in integrate(l, random_density(g.dim, rng, rank=1), 5.0, 0.01, 25):
            assert np.linalg.eigvalsh(rho).min() >= -1e-8


def test_unitary_flow_is_isospectral(g4, rng):
    l = build_liouvillian("symmetrized", g4, 0.0)
    rho0 = random_density(4, rng)
    ev0 = np.linalg.eigvalsh(rho0)
    for _, rho in integrate(l, rho0, 10.0, 0.01, 100):
        assert np.max(np.abs(np.linalg.eigvalsh(rho) - ev0)) < 1e-8


def test_steady_state_cycle_epsilon_one(cycle3):
    l = build_liouvillian("symmetrized", google_from_graph(cycle3, 0.85), 1.0)
    ss = steady_state_by_integration(l)
    assert ss.converged
    np.testing.assert_allclose(np.real(np.diag(ss.rho)), [1 / 3] * 3, atol=1e-9)


def test_steady_state_uniform_google_vs_kernel():
    g = google_matrix(np.eye(4), 0.0)
    l = build_liouvillian("symmetrized", g, 0.5)
    ss = steady_state_by_integration(l)
    assert ss.converged
    assert np.max(np.abs(ss.rho - steady_state_by_kernel(l))) < 1e-6


def test_steady_state_scalar_returns_immediately():
    l = Liouvillian(np.array([[1.0]]), np.array([[1.0]]), 0.5)
    ss = steady_state_by_integration(l)
    assert ss.converged and ss.time == 0.0
    np.testing.assert_array_equal(ss.rho, [[1.0]])


def test_steady_state_flags_non_stationary(g4):
    l = build_liouvillian("symmetrized", g4, 0.5)
    ss = steady_state_by_integration(l, tol=1e-14, t_max=1.0)
    assert not ss.converged
    assert ss.time == pytest.approx(1.0)


def test_large_n_uses_direct_stepping(rng):
    g = random_google(20, rng)
    l = build_liouvillian("symmetrized", g, 1.0)
    ss = steady_state_by_integration(l, tol=1e-10, t_max=200)
    assert ss.converged
    np.testing.assert_allclose(quantum_pagerank(ss.rho), stationary(g), atol=1e-9)


def test_quantum_pagerank_examples(g4):
    np.testing.assert_allclose(quantum_pagerank(initial_state(5)), [0.2] * 5)
    np.testing.assert_array_equal(quantum_pagerank(basis_state(3, 0)), [1, 0, 0])
    l = build_liouvillian("symmetrized", g4, 1.0)
    p = quantum_pagerank(steady_state_by_integration(l, tol=1e-12, t_max=1e4).rho)
    np.testing.assert_allclose(p, FIXTURE4_EXACT, atol=1e-8)


def test_quantum_pagerank_guards():
    with pytest.raises(InvalidStateError):
        quantum_pagerank(np.diag([0.5, 0.6]))
    with pytest.raises(InvalidStateError):
        quantum_pagerank(np.diag([1.0 + 1e-7, -1e-7]))
    p = quantum_pagerank(np.diag([1.0 + 1e-12, -1e-12]))
    assert p.min() == 0 and p.sum() == 1


def test_initial_state():
    np.testing.assert_array_equal(initial_state(1), [[1]])
    np.testing.assert_array_equal(initial_state(2), np.diag([0.5, 0.5]))
    rho = initial_state(4)
    np.testing.assert_array_equal(rho, np.eye(4) / 4)
    with pytest.raises(ValidationError):
        initial_state(0)


def test_check_density_matrix():
    check_density_matrix(initial_state(3))
    with pytest.raises(InvalidStateError):
        check_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidStateError):
        check_density_matrix(np.array([[0.5, 1j], [0, 0.5]]))


def test_epsilon_continuity(rng):
    for _ in range(3):
        g = random_google(int(rng.integers(2, 9)), rng)
        eps = float(rng.uniform(0.05, 0.95))
        ranks = []
        for e in (eps, eps + 1e-3):
            l = build_liouvillian("symmetrized", g, e)
            ranks.append(quantum_pagerank(steady_state_by_kernel(l)))
        assert np.abs(ranks[0] - ranks[1]).sum() < 1e-1


def test_residual_of_steady_state(g4):
    l = build_liouvillian("symmetrized", g4, 0.5)
    assert residual(l, steady_state_by_kernel(l)) < 1e-9
