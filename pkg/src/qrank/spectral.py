"""Superoperator form of the walk generator and its spectrum.

Vectorization is column-stacking everywhere: ``vec(A rho B) = (B^T kron A) vec(rho)``.
Getting this wrong silently transposes the Hamiltonian, so :func:`vec` and
:func:`unvec` are the only places that reshape.

Steady states come from the kernel of the dense generator matrix; the
exponential propagator uses Padé scaling-and-squaring. No Jordan form is
computed: it is discontinuous under perturbation and meaningless in
floating point.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidStateError, NonUniquenessError, SizeCapError, StructuralError
from .quantum import Liouvillian, apply_generator, check_density_matrix

DEFAULT_SIZE_CAP = 64
ZERO_EIG_TOL = 1e-9
STEADY_RESIDUAL_TOL = 1e-8


def size_cap() -> int:
    """Largest N allowed for dense superoperator work (env ``QRANK_SIZE_CAP``)."""
    raw = os.environ.get("QRANK_SIZE_CAP")
    return int(raw) if raw else DEFAULT_SIZE_CAP


def check_size(n: int, cap: int | None = None) -> None:
    cap = size_cap() if cap is None else cap
    if n > cap:
        raise SizeCapError(
            f"N={n} exceeds the superoperator cap N<={cap} ({n * n}x{n * n} matrix); "
            "use time integration instead or raise QRANK_SIZE_CAP"
        )


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    n = math.isqrt(v.shape[0])
    if n * n != v.shape[0]:
        raise ValueError(f"vector length {v.shape[0]} is not a perfect square")
    return np.asarray(v).reshape((n, n), order="F")


@dataclass(frozen=True, eq=False)
class SuperoperatorMatrix:
    matrix: np.ndarray
    source_dim: int


def vectorize(l: Liouvillian, cap: int | None = None) -> SuperoperatorMatrix:
    """Dense N^2 x N^2 matrix M with ``M vec(rho) = vec(L rho)``."""
    n = l.dim
    check_size(n, cap)
    eye = np.eye(n)
    h = l.hamiltonian
    eps = l.epsilon
    m = (-1j * (1.0 - eps)) * (np.kron(eye, h) - np.kron(h.T, eye))
    if eps > 0.0:
        # sum_ij gamma_ij conj(L_ij) kron L_ij only touches the population
        # entries: vec index of rho_kk is k*N + k.
        diag_idx = np.arange(n) * (n + 1)
        m[np.ix_(diag_idx, diag_idx)] += eps * l.rates
        d = l.decay
        # -1/2 (I kron D + D kron I) with D = sum_ij gamma_ij L_ij^+ L_ij = diag(d)
        m[np.diag_indices(n * n)] -= eps * 0.5 * (np.tile(d, n) + np.repeat(d, n))
    return SuperoperatorMatrix(m, n)


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    max_real_part: float
    kernel_dimension: int
    spectral_gap: float
    steady_states: list[np.ndarray] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "max_real_part": self.max_real_part,
            "kernel_dimension": self.kernel_dimension,
            "spectral_gap": None if math.isinf(self.spectral_gap) else self.spectral_gap,
        }


def _normalized_state(x: np.ndarray) -> np.ndarray | None:
    tr = np.trace(x)
    if abs(tr) < 1e-8:
        return None
    x = x / tr
    return 0.5 * (x + x.conj().T)


def _valid_steady(m: np.ndarray, rho: np.ndarray | None) -> bool:
    if rho is None:
        return False
    try:
        check_density_matrix(rho)
    except InvalidStateError:
        return False
    return float(np.max(np.abs(m @ vec(rho)))) < STEADY_RESIDUAL_TOL


def spectrum(sup: SuperoperatorMatrix, zero_tol: float = ZERO_EIG_TOL) -> SpectrumReport:
    """Eigenvalues, kernel dimension, spectral gap and kernel steady states.

    Kernel states are listed with the one reached from the maximally mixed
    state first (its projection onto the kernel along the range of M),
    followed by any further valid states extracted from a Hermitian basis
    of the kernel.
    """
    m = np.asarray(sup.matrix)
    n = sup.source_dim
    check_size(n)
    lam = np.linalg.eigvals(m)
    lam = lam[np.lexsort((lam.imag, -lam.real))]
    zero = np.abs(lam) < zero_tol
    k = int(zero.sum())
    if k == 0:
        raise StructuralError(
            f"no eigenvalue within {zero_tol:g} of zero; a Lindblad generator always has a steady state"
        )
    nonzero = lam[~zero]
    gap = float(-np.max(nonzero.real)) if nonzero.size else math.inf

    u, _, vh = np.linalg.svd(m)
    kernel = vh[-k:].conj().T
    states = []
    if k == 1:
        rho = _normalized_state(unvec(kernel[:, 0]))
        if _valid_steady(m, rho):
            states.append(rho)
    else:
        basis = np.hstack([kernel, u[:, : m.shape[0] - k]])
        coeff = np.linalg.lstsq(basis, vec(np.eye(n, dtype=complex) / n), rcond=None)[0]
        rho = _normalized_state(unvec(kernel @ coeff[:k]))
        if _valid_steady(m, rho):
            states.append(rho)
        for c in range(k):
            x = unvec(kernel[:, c])
            for part in (0.5 * (x + x.conj().T), -0.5j * (x - x.conj().T)):
                cand = _normalized_state(part)
                if _valid_steady(m, cand) and not any(
                    np.max(np.abs(cand - s)) < 1e-8 for s in states
                ):
                    states.append(cand)
    return SpectrumReport(lam, float(np.max(lam.real)), k, gap, states)


def steady_state_by_kernel(l: Liouvillian) -> np.ndarray:
    """The unique stationary state, read off the kernel of the generator."""
    rep = spectrum(vectorize(l))
    if rep.kernel_dimension > 1:
        raise NonUniquenessError(
            f"steady state is not unique: kernel dimension {rep.kernel_dimension}",
            rep.kernel_dimension,
            rep.steady_states,
        )
    if not rep.steady_states:
        raise StructuralError("kernel vector does not normalize to a valid density matrix")
    rho = rep.steady_states[0]
    res = float(np.max(np.abs(apply_generator(l, rho))))
    if res >= STEADY_RESIDUAL_TOL:
        raise StructuralError(f"kernel state residual {res:.3g} too large")
    return rho


# Padé coefficients b_k and 1-norm thresholds theta_m (Higham 2005).
_PADE = {
    3: (1.495585217958292e-2, (120.0, 60.0, 12.0, 1.0)),
    5: (2.539398330063230e-1, (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0)),
    7: (9.504178996162932e-1,
        (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0)),
    9: (2.097847961257068e0,
        (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
         2162160.0, 110880.0, 3960.0, 90.0, 1.0)),
    13: (5.371920351148152e0,
         (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
          1187353796428800.0, 129060195264000.0, 10559470521600.0,
          670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
          16380.0, 182.0, 1.0)),
}


def _pade_uv(a: np.ndarray, deg: int):
    b = _PADE[deg][1]
    eye = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    if deg == 13:
        a4 = a2 @ a2
        a6 = a4 @ a2
        u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
                 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye)
        v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
             + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye)
        return u, v
    powers = [eye, a2]
    while len(powers) <= deg // 2:
        powers.append(powers[-1] @ a2)
    u = a @ sum(b[2 * j + 1] * powers[j] for j in range(deg // 2 + 1))
    v = sum(b[2 * j] * powers[j] for j in range(deg // 2 + 1))
    return u, v


def matrix_exponential(m: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(m t) by Padé approximation with scaling and squaring.

    Raises OverflowError if the result is not finite.
    """
    a = np.asarray(m) * t
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise OverflowError("matrix has non-finite entries")
    if not np.issubdtype(a.dtype, np.inexact):
        a = a.astype(float)
    norm = float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0
    squarings = 0
    for deg in (3, 5, 7, 9):
        if norm <= _PADE[deg][0]:
            break
    else:
        deg = 13
        theta = _PADE[13][0]
        if norm > theta:
            squarings = max(0, math.ceil(math.log2(norm / theta)))
            a = a / 2.0**squarings
    u, v = _pade_uv(a, deg)
    with np.errstate(over="ignore", invalid="ignore"):
        r = np.linalg.solve(v - u, v + u)
        for _ in range(squarings):
            r = r @ r
    if not np.all(np.isfinite(r)):
        raise OverflowError("matrix exponential overflowed")
    return r


def propagate(sup: SuperoperatorMatrix, rho0: np.ndarray, t: float) -> np.ndarray:
    """``unvec(exp(M t) vec(rho0))``."""
    return unvec(matrix_exponential(sup.matrix, t) @ vec(rho0))
