"""Composite-particle trajectories: Hamilton's equations of the point Hamiltonian.

The mass is M + E_int/c^2.  In terms of u = P/m the equations of motion do
not involve m, so two bodies released with the same velocity follow the same
path; bodies given the same momentum differ by O(E_int / (M c^2)).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import PpnContext
from .hamiltonians import h_point


class DriftWarning(UserWarning):
    """Relative energy drift above the requested bound."""


class IntegrationError(RuntimeError):
    """Implicit step did not converge."""


def composite_mass(M: float, internal_energy: float, c: float) -> float:
    return M + internal_energy / c**2


def point_vector_field(R, P, m: float, ctx: PpnContext):
    """(dR/dt, dP/dt) for the post-Newtonian point Hamiltonian in a linear potential."""
    c2 = ctx.c**2
    phi = ctx.potential_at(R)
    P2 = float(P @ P)
    dR = P / m - P2 * P / (2.0 * m**3 * c2) + (2.0 * ctx.gamma + 1.0) * phi * P / (m * c2)
    weight = m + (2.0 * ctx.gamma + 1.0) * P2 / (2.0 * m * c2) + (2.0 * ctx.beta - 1.0) * m * phi / c2
    dP = -weight * ctx.grad_phi
    return dR, dP


@dataclass
class Trajectory:
    t: np.ndarray
    R: np.ndarray  # (steps+1, 3)
    P: np.ndarray
    H: np.ndarray
    mass: float

    @property
    def energy_drift(self) -> float:
        """max |H - H0| relative to the larger of |H0| and m |phi|-scale quantities."""
        scale = max(abs(self.H[0]), float(np.max(np.abs(self.H))), 1e-300)
        return float(np.max(np.abs(self.H - self.H[0])) / scale)

    def rows(self) -> list[dict]:
        return [
            {"t": float(t), "R_x": R[0], "R_y": R[1], "R_z": R[2], "P_x": P[0], "P_y": P[1], "P_z": P[2], "H": float(h)}
            for t, R, P, h in zip(self.t, self.R.tolist(), self.P.tolist(), self.H)
        ]


def integrate_point(R0, P0, m: float, ctx: PpnContext, dt: float, steps: int, tol: float = 1e-15,
                    max_iter: int = 100, drift_limit: float | None = None) -> Trajectory:
    """Implicit-midpoint integration (symplectic, second order) of the point Hamiltonian."""
    if dt <= 0 or steps < 1:
        raise ValueError("dt must be positive and steps >= 1")
    R = np.asarray(R0, dtype=float).copy()
    P = np.asarray(P0, dtype=float).copy()
    Rs, Ps = [R.copy()], [P.copy()]
    for _ in range(steps):
        Rn, Pn = R.copy(), P.copy()
        for _ in range(max_iter):
            dR, dP = point_vector_field(0.5 * (R + Rn), 0.5 * (P + Pn), m, ctx)
            R_new, P_new = R + dt * dR, P + dt * dP
            change = max(np.max(np.abs(R_new - Rn)) / max(np.max(np.abs(R_new)), 1.0),
                         np.max(np.abs(P_new - Pn)) / max(np.max(np.abs(P_new)), 1e-300))
            Rn, Pn = R_new, P_new
            if change <= tol:
                break
        else:
            raise IntegrationError("implicit midpoint iteration did not converge; reduce dt")
        R, P = Rn, Pn
        Rs.append(R.copy())
        Ps.append(P.copy())
    Rs, Ps = np.array(Rs), np.array(Ps)
    H = np.array([h_point(p, r, m, ctx) for r, p in zip(Rs, Ps)])
    traj = Trajectory(dt * np.arange(steps + 1), Rs, Ps, H, m)
    if drift_limit is not None and traj.energy_drift > drift_limit:
        warnings.warn(f"energy drift {traj.energy_drift:.2e} exceeds {drift_limit:g}", DriftWarning, stacklevel=2)
    return traj


def newtonian_fall(R0, P0, m: float, grad_phi, t) -> np.ndarray:
    """R(t) = R0 + (P0/m) t - grad_phi t^2 / 2 for each t."""
    t = np.asarray(t, dtype=float)[:, None]
    return np.asarray(R0, float) + np.asarray(P0, float) / m * t - 0.5 * np.asarray(grad_phi, float) * t**2


def free_fall_separation(R0, P0, M: float, E_a: float, E_b: float, ctx: PpnContext, dt: float, steps: int) -> float:
    """Maximum distance between two composites with internal energies E_a, E_b and the same (R0, P0)."""
    ta = integrate_point(R0, P0, composite_mass(M, E_a, ctx.c), ctx, dt, steps)
    tb = integrate_point(R0, P0, composite_mass(M, E_b, ctx.c), ctx, dt, steps)
    return float(np.max(np.linalg.norm(ta.R - tb.R, axis=1)))
