"""Quantum stochastic walk on a web graph.

The density matrix obeys

    drho/dt = -i (1 - eps) [H, rho]
              + eps * sum_ij gamma_ij (L_ij rho L_ij^+ - 1/2 {L_ij^+ L_ij, rho})

with jump operators ``L_ij = |i><j|`` and rates ``gamma_ij = G_ij``, so the
rate ``G_ij`` moves population from node ``j`` to node ``i``. Quantum
PageRank is the diagonal of the stationary state.

For these jump operators the dissipator collapses to

    diag(gamma @ diag(rho)) - 1/2 (d_k + d_l) rho_kl,   d_j = sum_i gamma_ij

which is what :func:`apply_generator` evaluates; no N^2 x N^2 object is
formed here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._stepping import rk4_step, time_grid
from .classical import check_rank_vector
from .errors import InvalidStateError, NumericalInstabilityError, ValidationError
from .graph import GoogleMatrix

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10

# Looser limits applied while integrating; crossing them means dt is too large.
INTEGRATION_TRACE_TOL = 1e-8
INTEGRATION_PSD_TOL = 1e-6

DEFAULT_DT = 0.01
DEFAULT_TOL = 1e-9
DEFAULT_T_MAX = 1000.0

# Largest N for which steady-state integration propagates with the dense
# one-step RK4 matrix instead of repeated generator calls.
DENSE_STEP_MAX_N = 16


class HamiltonianSource(enum.Enum):
    SYMMETRIZED = "symmetrized"
    LATTICE = "lattice"
    CUSTOM = "custom"


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Generator of the walk: Hamiltonian, rate matrix and mixing parameter.

    ``hamiltonian`` is in units of inverse time (hbar = 1). ``epsilon = 0``
    is a closed quantum walk, ``epsilon = 1`` a classical Markov walk.
    """

    hamiltonian: np.ndarray
    rates: np.ndarray
    epsilon: float

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        r = np.asarray(self.rates, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValidationError(f"hamiltonian must be square, got shape {h.shape}")
        if r.shape != h.shape:
            raise ValidationError(f"rates shape {r.shape} does not match hamiltonian {h.shape}")
        if hermiticity_error(h) > HERMITIAN_TOL:
            raise ValidationError("hamiltonian is not Hermitian")
        if np.any(r < 0):
            raise ValidationError("rates must be non-negative")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        object.__setattr__(self, "hamiltonian", _frozen(h, complex))
        object.__setattr__(self, "rates", _frozen(r, float))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "_decay", _frozen(r.sum(axis=0), float))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def decay(self) -> np.ndarray:
        """Total outflow rate of each node, ``d_j = sum_i gamma_ij``."""
        return self._decay


def symmetrized_google_hamiltonian(g: GoogleMatrix) -> np.ndarray:
    a = g.matrix - np.eye(g.dim)
    return 0.5 * (a + a.T)


def build_liouvillian(
    h_source: HamiltonianSource | str,
    g: GoogleMatrix,
    epsilon: float,
    hamiltonian=None,
) -> Liouvillian:
    """Assemble the walk generator with rates equal to the Google matrix.

    ``hamiltonian`` is required for ``CUSTOM`` (a Hermitian matrix). For
    ``LATTICE`` it may be a :class:`~qrank.lattice.LatticeHamiltonian`; when
    omitted, the uniform open chain with N sites is used.
    """
    source = HamiltonianSource(h_source)
    n = g.dim
    if source is HamiltonianSource.SYMMETRIZED:
        h = symmetrized_google_hamiltonian(g)
    elif source is HamiltonianSource.LATTICE:
        from .lattice import tight_binding

        lat = hamiltonian if hamiltonian is not None else tight_binding(np.zeros(n), np.ones(n - 1))
        h = lat.matrix if hasattr(lat, "matrix") else np.asarray(lat)
    else:
        if hamiltonian is None:
            raise ValidationError("a custom Hamiltonian matrix is required")
        h = np.asarray(hamiltonian, dtype=complex)
        if h.ndim == 2 and h.shape[0] == h.shape[1] and hermiticity_error(h) > HERMITIAN_TOL:
            raise ValidationError("custom Hamiltonian is not Hermitian")
    h = np.asarray(h)
    if h.shape != (n, n):
        raise ValidationError(f"Hamiltonian shape {h.shape} does not match graph size {n}")
    return Liouvillian(h, g.matrix, epsilon)


def apply_generator(l: Liouvillian, rho: np.ndarray) -> np.ndarray:
    """Return drho/dt for the given state (any square matrix is accepted)."""
    rho = np.asarray(rho)
    if rho.shape != (l.dim, l.dim):
        raise ValidationError(f"state shape {rho.shape} does not match generator dim {l.dim}")
    eps = l.epsilon
    out = np.zeros((l.dim, l.dim), dtype=complex)
    if eps < 1.0:
        h = l.hamiltonian
        out += (-1j * (1.0 - eps)) * (h @ rho - rho @ h)
    if eps > 0.0:
        d = l.decay
        gain = l.rates @ np.diagonal(rho)
        diss = -0.5 * (d[:, None] + d[None, :]) * rho
        diss[np.diag_indices(l.dim)] += gain
        out += eps * diss
    return out


def check_density_matrix(
    rho,
    n: int | None = None,
    herm_tol: float = HERMITIAN_TOL,
    trace_tol: float = TRACE_TOL,
    psd_tol: float = PSD_TOL,
) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    if n is not None and rho.shape[0] != n:
        raise InvalidStateError(f"density matrix has dim {rho.shape[0]}, expected {n}")
    herr = hermiticity_error(rho)
    if herr > herm_tol:
        raise InvalidStateError(f"density matrix not Hermitian (error {herr:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError(f"density matrix trace {tr!r} differs from 1")
    lo = min_eigenvalue(rho)
    if lo < -psd_tol:
        raise InvalidStateError(f"density matrix has negative eigenvalue {lo:.3g}")
    return rho


def min_eigenvalue(rho: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def initial_state(n: int) -> np.ndarray:
    """Maximally mixed state I/N."""
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    return np.eye(n, dtype=complex) / n


def basis_state(n: int, i: int) -> np.ndarray:
    """Pure state |i><i|."""
    if not 0 <= i < n:
        raise ValidationError(f"site {i} outside [0, {n})")
    rho = np.zeros((n, n), dtype=complex)
    rho[i, i] = 1.0
    return rho


def _check_integration_state(rho: np.ndarray, t: float) -> None:
    drift = abs(np.trace(rho) - 1.0)
    if drift > INTEGRATION_TRACE_TOL:
        raise NumericalInstabilityError(
            f"trace drift {drift:.3g} at t={t:g}; reduce dt"
        )
    lo = min_eigenvalue(rho)
    if lo < -INTEGRATION_PSD_TOL:
        raise NumericalInstabilityError(
            f"negative eigenvalue {lo:.3g} at t={t:g}; reduce dt"
        )


def integrate(
    l: Liouvillian,
    rho0: np.ndarray,
    t_final: float,
    dt: float = DEFAULT_DT,
    snapshot_every: int = 1,
) -> list[tuple[float, np.ndarray]]:
    """Fixed-step RK4 integration of the master equation.

    Returns ``(t, rho)`` snapshots: the initial state, every
    ``snapshot_every``-th step, and always the state at exactly ``t_final``.
    """
    if t_final < 0:
        raise ValidationError("t_final must be non-negative")
    if dt <= 0:
        raise ValidationError("dt must be positive")
    if snapshot_every < 1:
        raise ValidationError("snapshot_every must be at least 1")
    rho = check_density_matrix(rho0, l.dim).copy()
    out = [(0.0, rho.copy())]
    grid = time_grid(t_final, dt)

    def f(y):
        return apply_generator(l, y)

    prev = 0.0
    for k, now in enumerate(grid, start=1):
        rho = rk4_step(f, rho, now - prev)
        prev = now
        if k % snapshot_every == 0 or k == grid.size:
            _check_integration_state(rho, now)
            out.append((float(now), rho.copy()))
    return out


@dataclass
class SteadyState:
    rho: np.ndarray
    converged: bool
    residual: float
    time: float


def residual(l: Liouvillian, rho: np.ndarray) -> float:
    """``||L rho||_inf`` as the largest entry magnitude."""
    return float(np.max(np.abs(apply_generator(l, rho))))


def rk4_step_matrix(m: np.ndarray, h: float) -> np.ndarray:
    """One RK4 step of y' = M y as a matrix: the degree-4 Taylor polynomial of hM."""
    a = h * m
    eye = np.eye(m.shape[0], dtype=a.dtype)
    return eye + a @ (eye + a @ (eye / 2 + a @ (eye / 6 + a / 24)))


def steady_state_by_integration(
    l: Liouvillian,
    rho0: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    t_max: float = DEFAULT_T_MAX,
    dt: float = DEFAULT_DT,
    check_every: int = 100,
) -> SteadyState:
    """Integrate from ``rho0`` (default I/N) until ``||L rho||_inf < tol``.

    Reaching ``t_max`` first is not an error: the result comes back with
    ``converged=False``.

    For small N the RK4 step is applied as a dense N^2 x N^2 matrix raised
    to ``check_every``; the trajectory sampled at check points is the same
    fixed-step RK4 trajectory, only cheaper to produce.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if dt <= 0 or t_max < 0:
        raise ValidationError("dt must be positive and t_max non-negative")
    n = l.dim
    rho = check_density_matrix(initial_state(n) if rho0 is None else rho0, n).copy()
    res = residual(l, rho)
    if res < tol:
        return SteadyState(rho, True, res, 0.0)

    total = max(1, int(np.ceil(t_max / dt - 1e-9))) if t_max > 0 else 0
    done = 0
    if n <= DENSE_STEP_MAX_N:
        from .spectral import unvec, vec, vectorize

        m = vectorize(l).matrix
        step = rk4_step_matrix(m, dt)
        block = np.linalg.matrix_power(step, check_every)
        v = vec(rho)
        while done < total:
            k = min(check_every, total - done)
            v = (block if k == check_every else np.linalg.matrix_power(step, k)) @ v
            done += k
            rho = unvec(v)
            res = residual(l, rho)
            if res < tol:
                break
    else:
        def f(y):
            return apply_generator(l, y)

        while done < total:
            rho = rk4_step(f, rho, dt)
            done += 1
            if done % check_every == 0 or done == total:
                res = residual(l, rho)
                if res < tol:
                    break
    t = done * dt
    _check_integration_state(rho, t)
    return SteadyState(rho, res < tol, res, t)


def quantum_pagerank(rho_star: np.ndarray, drift_tol: float = 1e-8) -> np.ndarray:
    """Occupation probabilities: real diagonal, clamped at 0, renormalized."""
    rho_star = np.asarray(rho_star)
    p = np.real(np.diagonal(rho_star)).astype(float)
    if abs(p.sum() - 1.0) > drift_tol:
        raise InvalidStateError(f"diagonal sums to {p.sum()!r}, not 1")
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if abs(s - 1.0) > drift_tol:
        raise InvalidStateError(f"clamping negative populations moved the total to {s!r}")
    return check_rank_vector(p / s)
