"""Photonic waveguide lattices in the single-particle picture.

A lattice of N evanescently coupled waveguides is described by the N x N
mode-coupling matrix with propagation constants on the diagonal and
nearest-neighbour couplings beside it. Propagation length ``z`` plays the
role of time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryContaminationError, ValidationError
from .graph import WebGraph, google_from_graph
from .quantum import Liouvillian, basis_state, integrate

BOUNDARIES = ("open", "periodic")
EDGE_PROB_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class LatticeHamiltonian:
    beta: np.ndarray
    coupling: np.ndarray
    boundary: str = "open"

    @property
    def site_count(self) -> int:
        return self.beta.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        n = self.site_count
        h = np.diag(self.beta.astype(float))
        idx = np.arange(self.coupling.shape[0])
        nxt = (idx + 1) % n
        h[idx, nxt] = self.coupling
        h[nxt, idx] = self.coupling
        return h


def tight_binding(beta, coupling, boundary: str = "open") -> LatticeHamiltonian:
    """Build a nearest-neighbour lattice.

    ``coupling[j]`` couples sites ``j`` and ``j+1``; with a periodic
    boundary the extra last entry couples site ``N-1`` back to site 0.
    """
    beta = np.asarray(beta, dtype=float).ravel()
    coupling = np.asarray(coupling, dtype=float).ravel()
    n = beta.shape[0]
    if n < 1:
        raise ValidationError("lattice needs at least one site")
    if boundary not in BOUNDARIES:
        raise ValidationError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
    if boundary == "periodic" and n < 3:
        raise ValidationError("periodic lattice needs at least 3 sites")
    want = n - 1 if boundary == "open" else n
    if coupling.shape[0] != want:
        raise ValidationError(
            f"{boundary} lattice with {n} sites needs {want} couplings, got {coupling.shape[0]}"
        )
    if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(coupling))):
        raise ValidationError("beta and coupling must be finite")
    beta.setflags(write=False)
    coupling.setflags(write=False)
    return LatticeHamiltonian(beta, coupling, boundary)


def uniform_line(n: int, beta: float = 0.0, coupling: float = 1.0) -> LatticeHamiltonian:
    return tight_binding(np.full(n, beta), np.full(max(n - 1, 0), coupling))


@dataclass(frozen=True, eq=False)
class Propagator:
    matrix: np.ndarray
    z: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def propagator(h: LatticeHamiltonian, z: float) -> Propagator:
    """U = exp(-i H z), via the eigendecomposition of the real symmetric H."""
    if not np.isfinite(z):
        raise ValidationError("z must be finite")
    if z == 0:
        return Propagator(np.eye(h.site_count, dtype=complex), 0.0)
    w, v = np.linalg.eigh(h.matrix)
    u = (v * np.exp(-1j * w * z)) @ v.T
    return Propagator(u, float(z))


def _check_site(site: int, n: int) -> None:
    if not 0 <= site < n:
        raise ValidationError(f"site {site} outside [0, {n})")


def single_photon_distribution(u: Propagator, input_site: int) -> np.ndarray:
    _check_site(input_site, u.dim)
    return np.abs(u.matrix[:, input_site]) ** 2


def two_photon_correlation(u: Propagator, site_a: int, site_b: int) -> np.ndarray:
    """Coincidence matrix for two indistinguishable photons.

    ``G[q, r] = |U_qa U_rb + U_qb U_ra|^2 / (1 + delta_ab)``. With this
    normalization the probability of the unordered outcome {q, r} is
    ``G[q, r]`` for q != r and ``G[q, q] / 2`` for a bunched pair; those
    probabilities are rescaled to sum to exactly 1.
    """
    n = u.dim
    _check_site(site_a, n)
    _check_site(site_b, n)
    ca = u.matrix[:, site_a]
    cb = u.matrix[:, site_b]
    amp = np.outer(ca, cb)
    gamma = np.abs(amp + amp.T) ** 2
    if site_a == site_b:
        gamma /= 2.0
    total = np.sum(np.triu(gamma, 1)) + 0.5 * np.trace(gamma)
    gamma = gamma / total
    return 0.5 * (gamma + gamma.T)


def chain_graph(h: LatticeHamiltonian) -> WebGraph:
    """Undirected coupling graph of the lattice, as a two-way directed graph."""
    m = h.matrix
    n = h.site_count
    edges = {(j, i) for i in range(n) for j in range(n) if i != j and m[i, j] != 0.0}
    return WebGraph(n, frozenset(edges))


def lattice_liouvillian(h: LatticeHamiltonian, epsilon: float, alpha: float = 1.0) -> Liouvillian:
    """Walk generator with the lattice as Hamiltonian and hopping along its bonds.

    Rates are the Google matrix of the lattice's coupling graph, so at
    ``epsilon = 1`` the populations perform a classical random walk on the
    lattice.
    """
    g = google_from_graph(chain_graph(h), alpha)
    return Liouvillian(h.matrix, g.matrix, epsilon)


@dataclass
class SpreadResult:
    times: np.ndarray
    variances: np.ndarray
    exponent: float


def position_variance(p: np.ndarray) -> float:
    q = np.arange(p.shape[0])
    mean = float(q @ p)
    return float(((q - mean) ** 2) @ p)


def spread_profile(h_or_generator, site0: int, times, dt: float = 0.01) -> SpreadResult:
    """Position variance over time and its log-log slope.

    Accepts a :class:`LatticeHamiltonian` (coherent single-photon walk) or a
    :class:`~qrank.quantum.Liouvillian` (density matrix started at
    ``|site0><site0|``). The slope is about 2 for ballistic and 1 for
    diffusive spreading.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 4:
        raise ValidationError("need at least 4 time points")
    if np.any(times <= 0):
        raise ValidationError("time points must be positive")
    order = np.argsort(times)
    times = times[order]

    dists = []
    if isinstance(h_or_generator, LatticeHamiltonian):
        n = h_or_generator.site_count
        _check_site(site0, n)
        for t in times:
            dists.append(single_photon_distribution(propagator(h_or_generator, t), site0))
    elif isinstance(h_or_generator, Liouvillian):
        n = h_or_generator.dim
        _check_site(site0, n)
        rho = basis_state(n, site0)
        prev = 0.0
        for t in times:
            rho = integrate(h_or_generator, rho, t - prev, dt, snapshot_every=10**9)[-1][1]
            prev = t
            dists.append(np.clip(np.real(np.diagonal(rho)), 0.0, None))
    else:
        raise ValidationError("expected a LatticeHamiltonian or a Liouvillian")

    last = dists[-1]
    edge = max(last[0], last[-1]) if n > 1 else 0.0
    if n > 1 and edge > EDGE_PROB_TOL:
        raise BoundaryContaminationError(
            f"edge-site probability {edge:.3g} at t={times[-1]:g} exceeds {EDGE_PROB_TOL:g}; "
            "use a larger lattice or shorter times"
        )
    var = np.array([position_variance(p) for p in dists])
    if np.any(var <= 0):
        raise ValidationError("variance must be positive at every time point")
    slope = float(np.polyfit(np.log(times), np.log(var), 1)[0])
    return SpreadResult(times, var, slope)


def spread_exponent(h_or_generator, site0: int, times, dt: float = 0.01) -> float:
    return spread_profile(h_or_generator, site0, times, dt).exponent
