"""The standard truncation-order probes.

All probes scale c -> lambda c with phi, grad phi, positions and momenta (or
velocities) held fixed, so phi/c^2 falls like lambda^-2 and every neglected
term falls like lambda^-4.
"""
from __future__ import annotations

import math

import numpy as np

from .config import RunConfig
from .em_sector import FieldConfiguration, PlaneWave, QuadratureBox, field_energy
from .geometry import PpnContext
from .hamiltonians import (
    atom_light_terms,
    composite_identity_residual,
    cross_term_residual,
    h_final,
    h_lab_new,
    h_point,
    h_point_exact,
)
from .lagrangians import exact_point_lagrangian, legendre_hamiltonian, pn_point_lagrangian
from .order import OrderResult, ScalingProbe, residual_order
from .sampling import sample_com_states
from .states import ComState

PROBE_SPEED = (0.05, 0.1)  # |v|/c at the base c
PROBE_MIN_EPS = 1e-3  # smallest |phi|/c^2 at the base c; weaker fields hit rounding by lambda = 32


def plane_wave_field(c: float, e_amplitude: float = 1.0, points: int = 16) -> FieldConfiguration:
    """One plane wave along x, polarised along y, with fixed electric amplitude, in a one-wavelength box."""
    k = 1.0
    mode = PlaneWave(amplitude=np.array([0.0, e_amplitude / (c * k), 0.0]), wavevector=np.array([k, 0.0, 0.0]))
    L = 2.0 * math.pi / k
    return FieldConfiguration((mode,), QuadratureBox((0.0, 0.0, 0.0), (L, L, L), (points, 4, 4)))


def probe_states(cfg: RunConfig, n: int | None = None) -> list[ComState]:
    return sample_com_states(cfg.n_points if n is None else n, cfg.seed, cfg.m1, cfg.m2, cfg.e, cfg.c,
                             speed_fraction=PROBE_SPEED)


def _scaled(ctx: PpnContext):
    return lambda lam: ctx.with_c(ctx.c * lam)


def point_lagrangian_probe(ctx: PpnContext, m: float = 1.0, speed: float = 0.05) -> ScalingProbe:
    v = np.array([speed * ctx.c, 0.0, 0.0])
    x = np.zeros(3)
    at = _scaled(ctx)

    def exact(lam):
        return exact_point_lagrangian(m, x, v, at(lam), include_rest=False)

    def truncated(lam):
        parts = pn_point_lagrangian(m, x, v, at(lam))
        return parts.potential_part + parts.velocity_part

    return ScalingProbe("point_lagrangian", 4, exact=exact, truncated=truncated)


def point_hamiltonian_probe(ctx: PpnContext, m: float = 1.0, speed: float = 0.05) -> ScalingProbe:
    P = np.array([0.0, speed * m * ctx.c, 0.0])
    R = np.zeros(3)
    at = _scaled(ctx)
    return ScalingProbe(
        "point_hamiltonian", 4,
        exact=lambda lam: h_point_exact(P, R, m, at(lam)),
        truncated=lambda lam: h_point(P, R, m, at(lam)),
    )


def legendre_probe(com: ComState, ctx: PpnContext, name: str = "legendre_lab") -> ScalingProbe:
    lab = com.to_lab()
    at = _scaled(ctx)
    kinetic = float(lab.p1 @ lab.p1) / (2 * lab.m1) + float(lab.p2 @ lab.p2) / (2 * lab.m2)
    return ScalingProbe(
        name, 4,
        residual=lambda lam: legendre_hamiltonian(lab, at(lam)).hamiltonian - h_lab_new(lab, None, at(lam)),
        magnitude=lambda lam: kinetic,
    )


def composite_probe(com: ComState, ctx: PpnContext, name: str = "composite_identity") -> ScalingProbe:
    at = _scaled(ctx)
    return ScalingProbe(
        name, 4,
        residual=lambda lam: composite_identity_residual(com, at(lam)),
        magnitude=lambda lam: max(abs(h_final(com, None, at(lam)).group("H_C")), com.M * abs(ctx.potential_at(com.R))),
    )


def decoupling_probe(com: ComState, ctx: PpnContext, name: str = "decoupling_cross_terms") -> ScalingProbe:
    units = ctx.units

    def magnitude(lam):
        rep = h_final(com, None, ctx.flat().with_c(units.c * lam))
        return abs(rep.group("H_C")) + abs(rep.group("H_A"))

    return ScalingProbe(
        name, 4,
        residual=lambda lam: cross_term_residual(com, units.with_c(units.c * lam), odd=True),
        magnitude=magnitude,
    )


def field_energy_probe(ctx: PpnContext) -> ScalingProbe:
    at = _scaled(ctx)

    def pair(lam):
        local = at(lam)
        f = plane_wave_field(local.c)
        return field_energy(f, local, frame="coordinate"), field_energy(f, local, frame="tetrad")

    return ScalingProbe(
        "field_energy_frames", 4,
        exact=lambda lam: pair(lam)[0],
        truncated=lambda lam: pair(lam)[1],
    )


def dipole_frame_probe(com: ComState, ctx: PpnContext) -> ScalingProbe:
    at = _scaled(ctx)

    def term(lam, frame):
        local = at(lam)
        return atom_light_terms(com, plane_wave_field(local.c), local, frame=frame)["dipole"]

    return ScalingProbe(
        "dipole_frames", 4,
        exact=lambda lam: term(lam, "coordinate"),
        truncated=lambda lam: term(lam, "tetrad"),
    )


def probe_context(cfg: RunConfig) -> PpnContext:
    """Base context for the probes: the configured one, with a nonzero but weak
    potential (and its gradient) scaled up to |phi|/c^2 = PROBE_MIN_EPS."""
    ctx = cfg.context()
    eps = abs(ctx.eps)
    if 0.0 < eps < PROBE_MIN_EPS:
        f = PROBE_MIN_EPS / eps
        ctx = ctx.replace(phi=ctx.phi * f, grad_phi=ctx.grad_phi * f)
    return ctx


def build_probes(cfg: RunConfig) -> list[ScalingProbe]:
    ctx = probe_context(cfg)
    states = probe_states(cfg)
    frozen = ctx.flat().replace(phi=ctx.phi)
    probes = [
        point_lagrangian_probe(ctx, cfg.m1),
        point_hamiltonian_probe(ctx, cfg.m1),
        field_energy_probe(frozen),
        dipole_frame_probe(states[0], frozen),
    ]
    for i, com in enumerate(states):
        local = ctx.replace(anchor=com.R)
        probes.append(legendre_probe(com, local, f"legendre_lab[{i}]"))
        probes.append(composite_probe(com, frozen, f"composite_identity[{i}]"))
        probes.append(decoupling_probe(com, frozen, f"decoupling_cross_terms[{i}]"))
    return probes


def run_probes(cfg: RunConfig, executor=None) -> list[OrderResult]:
    return [residual_order(p, executor) for p in build_probes(cfg)]
