"""Point-particle, Darwin and gravity-corrected two-particle Lagrangians; numerical Legendre transform."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .em_sector import FieldConfiguration, em_lagrangian_terms
from .geometry import PpnContext, metric_components
from .states import LagrangianBreakdown, TwoParticleState

EPS = np.finfo(float).eps


class SuperluminalError(ValueError):
    """Worldline is not timelike in the PPN metric."""


class LegendreError(RuntimeError):
    """Numerical Legendre transform failed (non-convex or no convergence)."""


def exact_point_lagrangian(m: float, x, v, ctx: PpnContext, include_rest: bool = True) -> float:
    """-m c^2 sqrt(-g_mn xdot^m xdot^n / c^2) with coordinate-time parametrisation.

    Written as -m c^2 - m c^2 (sqrt(1+X) - 1) to keep the non-rest part free of
    cancellation; ``include_rest=False`` drops the constant -m c^2.
    """
    v = np.asarray(v, dtype=float)
    c2 = ctx.c**2
    metric = metric_components(ctx, ctx.potential_at(x))
    # -(g00 + g_ab v^a v^b / c^2) = 1 + X, with -1 - g00 = -h00 taken from the perturbation
    X = -metric.h[0, 0] - metric.g[1, 1] * (v @ v) / c2
    if 1.0 + X <= 0.0:
        raise SuperluminalError("superluminal in this metric")
    moving = -m * c2 * X / (1.0 + math.sqrt(1.0 + X))
    return moving - m * c2 if include_rest else moving


def pn_point_lagrangian(m: float, x, v, ctx: PpnContext) -> LagrangianBreakdown:
    v = np.asarray(v, dtype=float)
    c2 = ctx.c**2
    phi = ctx.potential_at(x)
    v2 = float(v @ v)
    return LagrangianBreakdown(
        rest_mass=-m * c2,
        newton_kinetic=m * v2 / 2.0,
        p4_kinetic=m * v2**2 / (8.0 * c2),
        newton_potential=-m * phi,
        phi_squared=-(2.0 * ctx.beta - 1.0) * m * phi**2 / (2.0 * c2),
        kinetic_phi_cross=-(2.0 * ctx.gamma + 1.0) / 2.0 * m * phi / c2 * v2,
    )


def darwin_lagrangian(state: TwoParticleState, ctx: PpnContext) -> float:
    """Flat-spacetime Darwin Lagrangian (no rest masses, no external field).

    Only the unit system of ``ctx`` is used.
    """
    flat = ctx.flat()
    c2 = ctx.c**2
    kin = 0.0
    for m, v in ((state.m1, state.v1), (state.m2, state.v2)):
        v2 = float(v @ v)
        kin += m * v2 / 2.0 + m * v2**2 / (8.0 * c2)
    em = em_lagrangian_terms(state, FieldConfiguration.none(), flat, include_field=False)
    return kin + em.coulomb + em.darwin_velocity


def total_lagrangian(state: TwoParticleState, ctx: PpnContext, fields: FieldConfiguration | None = None,
                     t: float = 0.0, include_field: bool = True) -> LagrangianBreakdown:
    """Two charges with gravity-corrected kinetic terms, internal EM and external coupling.

    Kinetic gravity terms see phi at each particle (linear potential); the
    internal Coulomb prefactor uses phi at the centre of mass.
    """
    if state.rep != "velocity":
        raise ValueError("total_lagrangian needs the velocity representation")
    fields = FieldConfiguration.none() if fields is None else fields
    parts = pn_point_lagrangian(state.m1, state.r1, state.v1, ctx) + pn_point_lagrangian(
        state.m2, state.r2, state.v2, ctx
    )
    em = em_lagrangian_terms(state, fields, ctx.frozen(state.R), t, include_field=include_field)
    return parts + em


@dataclass
class LegendreResult:
    hamiltonian: float
    velocities: np.ndarray
    iterations: int


def _steps(v: np.ndarray, floor: float, power: float) -> np.ndarray:
    """Per-component steps eps**power * max(|v_block|, floor), blocks of 3."""
    if len(v) % 3 == 0:
        norms = np.repeat(np.linalg.norm(v.reshape(-1, 3), axis=1), 3)
    else:
        norms = np.abs(v)
    return EPS**power * np.maximum(norms, floor)


def _gradient(L, v, h):
    g = np.empty_like(v)
    for i in range(len(v)):
        e = np.zeros_like(v)
        e[i] = h[i]
        g[i] = (L(v + e) - L(v - e)) / (2.0 * h[i])
    return g


def _hessian(L, v, k):
    n = len(v)
    H = np.empty((n, n))
    L0 = L(v)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = k[i]
        H[i, i] = (L(v + ei) - 2.0 * L0 + L(v - ei)) / k[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = k[j]
            H[i, j] = H[j, i] = (
                L(v + ei + ej) - L(v + ei - ej) - L(v - ei + ej) + L(v - ei - ej)
            ) / (4.0 * k[i] * k[j])
    return H


def legendre_solve(lagrangian: Callable[[np.ndarray], float], momenta, v_guess, floor: float = 1e-8,
                   max_iter: int = 50, tol: float = 1e-12) -> LegendreResult:
    """Solve dL/dv = p by damped Newton iteration and return H = p.v - L.

    Derivatives are central differences: steps eps^(1/3) max(|v|, floor) for
    the gradient and eps^(1/4) max(|v|, floor) for the Hessian.
    """
    p = np.asarray(momenta, dtype=float).ravel()
    v = np.asarray(v_guess, dtype=float).ravel().copy()

    def residual(u):
        return _gradient(lagrangian, u, _steps(u, floor, 1.0 / 3.0)) - p

    r = residual(v)
    it = 0
    for it in range(1, max_iter + 1):
        h = _steps(v, floor, 1.0 / 3.0)
        noise = 10.0 * EPS * (abs(lagrangian(v)) + 1e-300) / h.min()
        rn = np.linalg.norm(r)
        if rn <= max(tol * np.linalg.norm(p), noise):
            break
        J = _hessian(lagrangian, v, _steps(v, floor, 0.25))
        if np.min(np.linalg.eigvalsh(0.5 * (J + J.T))) <= 0.0:
            raise LegendreError("Lagrangian is not convex in the velocities here")
        dv = np.linalg.solve(J, r)
        step = 1.0
        while True:
            trial = v - step * dv
            r_trial = residual(trial)
            if np.linalg.norm(r_trial) <= rn or step < 2.0**-10:
                break
            step *= 0.5
        v, r = trial, r_trial
        if np.linalg.norm(step * dv) <= 4.0 * EPS * max(np.linalg.norm(v), floor):
            break
    else:
        raise LegendreError(f"Newton iteration did not converge in {max_iter} steps")
    return LegendreResult(float(p @ v - lagrangian(v)), v, it)


def numerical_legendre(lagrangian: Callable[[np.ndarray], float], momenta, v_guess, floor: float = 1e-8,
                       **kw) -> float:
    """Hamiltonian value sum p.v - L at the velocities conjugate to ``momenta``."""
    return legendre_solve(lagrangian, momenta, v_guess, floor, **kw).hamiltonian


def legendre_hamiltonian(state: TwoParticleState, ctx: PpnContext, fields: FieldConfiguration | None = None,
                         t: float = 0.0) -> LegendreResult:
    """Numerical Legendre transform of :func:`total_lagrangian` at a momentum-space state.

    Only velocity-dependent terms are differentiated; static terms
    (potentials, Coulomb) are subtracted exactly.  Rest energies and the field
    energy are excluded (the field has its own conjugate pair).
    """
    if state.rep != "momentum":
        raise ValueError("legendre_hamiltonian needs the momentum representation")
    p = np.concatenate([state.p1, state.p2])
    guess = np.concatenate([state.p1 / state.m1, state.p2 / state.m2])

    def lag(u):
        s = state.with_velocities(u[:3], u[3:])
        return total_lagrangian(s, ctx, fields, t, include_field=False)

    L_vel = lambda u: lag(u).velocity_part  # noqa: E731
    res = legendre_solve(L_vel, p, guess, floor=1e-6 * ctx.c)
    static = lag(res.velocities).potential_part
    return LegendreResult(res.hamiltonian - static, res.velocities, res.iterations)
