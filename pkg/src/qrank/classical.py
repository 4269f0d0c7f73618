"""Classical PageRank: power iteration, continuous-time diffusion, direct solve.

These routines are the oracle for the quantum walk: at full decoherence the
quantum populations must reproduce them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonUniquenessError, NumericalInstabilityError, StructuralError, ValidationError
from ._stepping import rk4_step, time_grid
from .graph import GoogleMatrix

RANK_NEG_TOL = 1e-14
RANK_SUM_TOL = 1e-10
TIE_TOL = 1e-12


def check_rank_vector(p, n: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValidationError(f"rank vector must be 1-D, got shape {p.shape}")
    if n is not None and p.shape[0] != n:
        raise ValidationError(f"rank vector has length {p.shape[0]}, expected {n}")
    if np.any(p < -RANK_NEG_TOL):
        raise ValidationError(f"rank vector has negative entry {p.min()!r}")
    if abs(p.sum() - 1.0) > RANK_SUM_TOL:
        raise ValidationError(f"rank vector sums to {p.sum()!r}, not 1")
    return p


def uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


@dataclass
class ConvergenceTrace:
    """Residual history of an iterative or time-stepped rank computation.

    ``iterates`` holds ``(step_or_time, residual)`` pairs where the residual
    is an L1 norm. ``drift`` is the probability-sum error of ``final``.
    """

    iterates: list[tuple[float, float]]
    converged: bool
    final: np.ndarray
    drift: float = field(default=0.0)


def power_iterate(g: GoogleMatrix, p0=None, tol: float = 1e-12, max_iter: int = 10000):
    """Iterate p <- G p until the L1 change drops below ``tol``.

    Non-convergence is reported through ``converged=False``, not raised.
    """
    n = g.dim
    p = uniform(n) if p0 is None else check_rank_vector(p0, n).copy()
    if tol <= 0:
        raise ValidationError("tol must be positive")
    iterates = []
    converged = False
    for k in range(1, max_iter + 1):
        nxt = g.matrix @ p
        res = float(np.abs(nxt - p).sum())
        iterates.append((k, res))
        p = nxt
        if res < tol:
            converged = True
            break
    return ConvergenceTrace(iterates, converged, p, drift=abs(float(p.sum()) - 1.0))


def continuous_evolve(
    g: GoogleMatrix,
    p0=None,
    t: float = 100.0,
    dt: float = 0.01,
    tol: float = 1e-10,
    record_every: int = 1,
):
    """Integrate dp/dt = (G - I) p with fixed-step RK4 up to time ``t``.

    The last step is shortened so that the final time is exactly ``t``.
    Residuals are ``||(G - I) p||_1``; ``converged`` means the final
    residual is below ``tol``.
    """
    n = g.dim
    p = uniform(n) if p0 is None else check_rank_vector(p0, n).copy()
    if t < 0:
        raise ValidationError("t must be non-negative")
    if dt <= 0:
        raise ValidationError("dt must be positive")
    gen = g.matrix - np.eye(n)

    def f(y):
        return gen @ y

    iterates = [(0.0, float(np.abs(f(p)).sum()))]
    grid = time_grid(t, dt)
    prev = 0.0
    for k, now in enumerate(grid, start=1):
        p = rk4_step(f, p, now - prev)
        prev = now
        if k % record_every == 0 or k == grid.size:
            iterates.append((float(now), float(np.abs(f(p)).sum())))
    drift = abs(float(p.sum()) - 1.0)
    if drift > 1e-9:
        raise NumericalInstabilityError(f"probability drift {drift:.3g} exceeds 1e-9; reduce dt")
    return ConvergenceTrace(iterates, iterates[-1][1] < tol, p, drift=drift)


def stationary(g: GoogleMatrix, null_tol: float = 1e-10) -> np.ndarray:
    """Solve (G - I) p = 0 with sum(p) = 1 by a dense linear solve."""
    n = g.dim
    a = g.matrix - np.eye(n)
    sv = np.linalg.svd(a, compute_uv=False)
    nullity = int(np.sum(sv < null_tol * max(1.0, sv[0] if sv.size else 1.0)))
    if nullity > 1:
        raise NonUniquenessError(
            f"stationary vector is not unique: kernel of G - I has dimension {nullity}",
            nullity,
        )
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    p = np.linalg.solve(a, b)
    p[np.abs(p) < RANK_NEG_TOL] = 0.0
    if np.max(np.abs(g.matrix @ p - p)) >= 1e-10:
        raise StructuralError("direct solve did not produce a fixed point of G")
    return check_rank_vector(p, n)


def ranking(p, tie_tol: float = TIE_TOL) -> list[tuple[int, float, int]]:
    """Return ``(node, score, rank)`` rows, best first.

    Scores within ``tie_tol`` of each other count as tied and are ordered by
    node id, so the output is deterministic.
    """
    p = np.asarray(p, dtype=float)
    order = sorted(range(p.size), key=lambda i: (-p[i], i))
    rows = []
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and p[order[i]] - p[order[j]] <= tie_tol:
            j += 1
        rows.extend(sorted(order[i:j]))
        i = j
    return [(node, float(p[node]), r) for r, node in enumerate(rows, start=1)]
