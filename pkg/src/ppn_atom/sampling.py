"""Deterministic low-discrepancy phase points inside the validity guards."""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc

from .states import VELOCITY_GUARD, ComState


def _vectors(u: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Map (n, 3) unit-cube points to vectors with lo <= |v| < hi, directions uniform on the sphere."""
    mag = lo + (hi - lo) * u[:, 0]
    cos_t = 2.0 * u[:, 1] - 1.0
    sin_t = np.sqrt(1.0 - cos_t**2)
    ang = 2.0 * math.pi * u[:, 2]
    return mag[:, None] * np.stack([sin_t * np.cos(ang), sin_t * np.sin(ang), cos_t], axis=1)


def sample_com_states(n: int, seed: int, m1: float, m2: float, e: float, c: float,
                      speed_fraction: tuple = (0.02, 0.1), separation: tuple = (0.5, 2.0),
                      position: float = 1.0) -> list[ComState]:
    """Halton-sampled centre-of-mass phase points.

    |P|/(M c) and |p_r|/(mu c) lie in ``speed_fraction`` (below the guard),
    |r| in ``separation`` and |R| below ``position``.
    """
    lo, hi = speed_fraction
    if not (0 <= lo < hi < VELOCITY_GUARD):
        raise ValueError(f"speed fractions must satisfy 0 <= lo < hi < {VELOCITY_GUARD}")
    M = m1 + m2
    mu = m1 * m2 / M
    u = qmc.Halton(d=12, scramble=True, seed=seed).random(n)
    R = _vectors(u[:, 0:3], 0.0, position)
    P = _vectors(u[:, 3:6], lo * M * c, hi * M * c)
    r = _vectors(u[:, 6:9], *separation)
    p = _vectors(u[:, 9:12], lo * mu * c, hi * mu * c)
    return [ComState(R[i], P[i], r[i], p[i], m1, m2, e) for i in range(n)]
