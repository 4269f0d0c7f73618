"""Fixed-step RK4 shared by the classical and quantum integrators."""

from __future__ import annotations

import math

import numpy as np


def time_grid(t_final: float, dt: float) -> np.ndarray:
    """Step end times from ``dt`` to ``t_final``; the last step may be shorter."""
    if t_final <= 0:
        return np.zeros(0)
    n = max(1, math.ceil(t_final / dt - 1e-9))
    grid = dt * np.arange(1, n + 1, dtype=float)
    grid[-1] = t_final
    return grid


def rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
