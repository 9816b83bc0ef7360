"""Closed-form Hamiltonians: lab frame, centre-of-mass split, final set, point particle.

All Hamiltonians are classical phase-space functions without rest energies.
Products that would be symmetrised as operators (``p . phi p`` or ``{A + h.c.}``)
are plain numbers here, so a symmetrised pair is simply twice one ordering.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .em_sector import FieldConfiguration, field_energy, scalar_prefactor
from .geometry import PpnContext, UnitSystem, lapse, spatial_inner, to_physical_dipole, to_physical_fields
from .states import ComState, TwoParticleState

GROUPS = ("H_C", "H_A", "H_AL", "H_L", "H_X")


class TransformError(RuntimeError):
    """Fixed-point inversion of the decoupling map did not converge."""


@dataclass
class HamiltonianReport:
    """Named summands grouped as H_C, H_A, H_AL, H_L, H_X."""

    parts: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def group(self, name: str) -> float:
        return math.fsum(self.parts.get(name, {}).values())

    @property
    def total(self) -> float:
        return math.fsum(v for g in self.parts.values() for v in g.values())

    def totals(self) -> dict:
        return {g: self.group(g) for g in self.parts}

    def flat(self) -> dict:
        """Summands keyed ``group.term``, sorted."""
        out = {f"{g}.{t}": v for g, terms in self.parts.items() for t, v in terms.items()}
        return dict(sorted(out.items()))

    def to_dict(self) -> dict:
        return {
            "parts": {g: dict(sorted(t.items())) for g, t in sorted(self.parts.items())},
            "totals": dict(sorted(self.totals().items())),
            "total": self.total,
            "flags": dict(sorted(self.flags.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _coupling(units: UnitSystem, e1: float, e2: float) -> float:
    return units.coulomb(e1, e2)


def _abs(x) -> float:
    return math.sqrt(float(x @ x))


# --- lab frame -------------------------------------------------------------------------

def h_lab_new(state: TwoParticleState, fields: FieldConfiguration | None, ctx: PpnContext,
              t: float = 0.0, em_gravity: bool = True, include_field: bool = False) -> float:
    """Minimal-coupling two-particle Hamiltonian with the gravitational correction terms.

    Kinetic gravity terms see phi at each particle (linear potential).  With
    ``em_gravity`` the Coulomb term carries (1 + (gamma+1) phi(R)/c^2); without
    it the electromagnetic sector is the gravity-free one.  The external field
    energy is added only when ``include_field`` is set and the field has a box.
    """
    if state.rep != "momentum":
        raise ValueError("h_lab_new needs the momentum representation")
    fields = FieldConfiguration.none() if fields is None else fields
    c = ctx.c
    c2 = c * c
    pb = []
    for p, x, q in ((state.p1, state.r1, state.e1), (state.p2, state.r2, state.e2)):
        a = fields.vector_potential(x, t, c) if fields.modes else np.zeros(3)
        pb.append(p - q * a)
    pb1, pb2 = pb
    r = state.r
    rn = _abs(r)
    k = _coupling(ctx.units, state.e1, state.e2)
    com_ctx = ctx.frozen(state.R)
    pref = scalar_prefactor(com_ctx) if em_gravity else 1.0

    terms = []
    for m, x, p in ((state.m1, state.r1, pb1), (state.m2, state.r2, pb2)):
        p2 = float(p @ p)
        phi = ctx.potential_at(x)
        terms += [
            p2 / (2.0 * m),
            -(p2**2) / (8.0 * m**3 * c2),
            m * phi,
            (2.0 * ctx.gamma + 1.0) * phi * p2 / (2.0 * m * c2),
            (2.0 * ctx.beta - 1.0) * m * phi**2 / (2.0 * c2),
        ]
    terms += [
        pref * k / rn,
        -k / (2.0 * state.m1 * state.m2 * c2) * (float(pb1 @ pb2) / rn + float(pb1 @ r) * float(pb2 @ r) / rn**3),
    ]
    if include_field and fields.box is not None:
        terms.append(field_energy(fields, com_ctx if em_gravity else ctx.flat()))
    return math.fsum(terms)


# --- gravity-free centre-of-mass pieces --------------------------------------------------

def _com_flat(com: ComState, units: UnitSystem) -> dict:
    """H_C, H_A, H_X summands without gravity, general charge signs."""
    P, r, p = com.P, com.r, com.p_r
    M, mu, m1, m2 = com.M, com.mu, com.m1, com.m2
    c2 = units.c**2
    rn = _abs(r)
    k = _coupling(units, com.e1, com.e2)
    p2, P2, Pp = float(p @ p), float(P @ P), float(P @ p)
    Pr, pr = float(P @ r), float(p @ r)
    h_int = p2 / (2 * mu) + k / rn
    return {
        "H_C": {
            "P2_2M": P2 / (2 * M),
            "P4": -(P2**2) / (8 * M**3 * c2),
            "P2_internal": -P2 / (2 * M) * h_int / (M * c2),
        },
        "H_A": {
            "kinetic": p2 / (2 * mu),
            "coulomb": k / rn,
            "p4": -(m1**3 + m2**3) / M**3 * p2**2 / (8 * mu**3 * c2),
            "darwin": k / (2 * mu * M * c2) * (p2 / rn + pr**2 / rn**3),
        },
        "H_X": {
            "Pp_squared": -(Pp**2) / (2 * M**2 * mu * c2),
            "coulomb_Pr": -k / rn * (Pr / rn) ** 2 / (2 * M**2 * c2),
            "asymmetry": (m1 - m2) / (2 * mu * M**2 * c2) * (Pp * p2 / mu + k * (Pp / rn + Pr * pr / rn**3)),
        },
    }


def gaussian_self_energy(d, sigma: float, units: UnitSystem) -> float:
    """(1/2 eps0) int |P_perp|^2 for a dipole density d g_sigma(x - R).

    The transverse projection keeps 2/3 of the Gaussian's k-space weight,
    which gives |d|^2 / (24 pi^(3/2) eps0 sigma^3).
    """
    if sigma <= 0:
        raise ValueError("smearing width must be positive")
    d = np.asarray(d, dtype=float)
    return float(d @ d) / (24.0 * math.pi**1.5 * units.epsilon0 * sigma**3)


def default_dipole_width(com: ComState, units: UnitSystem) -> float:
    """A tenth of the Bohr radius hbar^2 / (mu |k|) of the pair."""
    k = abs(_coupling(units, com.e1, com.e2))
    if k == 0:
        raise ValueError("uncharged pair has no Bohr radius")
    return units.hbar**2 / (com.mu * k) / 10.0


def atom_light_terms(com: ComState, fields: FieldConfiguration | None, ctx: PpnContext, t: float = 0.0,
                     frame: str = "coordinate", sigma_d: float | None = None) -> dict:
    """Electric-dipole atom-light summands at the centre of mass.

    ``coordinate`` uses coordinate field and dipole components; ``tetrad``
    rewrites each summand with physical components and the factors that make
    it agree with the coordinate form to O(c^-2).  The Gaussian self-energy
    carries (1 + (gamma+1) phi/c^2) in both frames.
    """
    fields = FieldConfiguration.none() if fields is None else fields
    c = ctx.c
    if fields.modes:
        E = fields.electric(com.R, t, c)
        B = fields.magnetic(com.R, t, c)
    else:
        E = np.zeros(3)
        B = np.zeros(3)
    d = com.dipole
    m1, m2, M, mu = com.m1, com.m2, com.M, com.mu
    sigma = default_dipole_width(com, ctx.units) if sigma_d is None else sigma_d
    self_term = scalar_prefactor(ctx) * gaussian_self_energy(d, sigma, ctx.units)
    if frame == "coordinate":
        dxB = np.cross(d, B)
        return {
            "dipole": -float(d @ E),
            "rontgen": float(com.P @ dxB) / M,
            "internal_rontgen": -(m1 - m2) / (2 * m1 * m2) * float(com.p_r @ dxB),
            "diamagnetic": float(dxB @ dxB) / (8 * mu),
            "self_energy": self_term,
        }
    if frame == "tetrad":
        w = 1.0 - ctx.gamma * ctx.eps
        E_phys, B_phys = to_physical_fields(ctx, E, B)
        d_phys = to_physical_dipole(ctx, d)
        dxB = np.cross(d_phys, B_phys)
        return {
            "dipole": -lapse(ctx) * float(d_phys @ E_phys),
            "rontgen": w * float(com.P @ dxB) / M,
            "internal_rontgen": -w * (m1 - m2) / (2 * m1 * m2) * float(com.p_r @ dxB),
            "diamagnetic": w**2 * float(dxB @ dxB) / (8 * mu),
            "self_energy": self_term,
        }
    raise ValueError(f"frame must be 'coordinate' or 'tetrad', got {frame!r}")


# --- centre-of-mass split with gravity -------------------------------------------------

def h_com_split(com: ComState, fields: FieldConfiguration | None, ctx: PpnContext,
                t: float = 0.0) -> HamiltonianReport:
    """Centre-of-mass Hamiltonian with gravity in the kinetic terms only.

    The electromagnetic sector (Coulomb, atom-light, field energy) is the
    gravity-free one.  Gradient terms r . grad phi enter iff ``ctx`` has a
    gradient; phi and grad phi are taken at the centre of mass.
    """
    fields = FieldConfiguration.none() if fields is None else fields
    c2 = ctx.c**2
    M, mu = com.M, com.mu
    phi = ctx.potential_at(com.R)
    grad = ctx.grad_phi
    g, b = ctx.gamma, ctx.beta
    P, p, r = com.P, com.p_r, com.r
    P2, p2 = float(P @ P), float(p @ p)
    parts = _com_flat(com, ctx.units)
    parts["H_C"].update({
        "kinetic_phi": (2 * g + 1) * phi * P2 / (2 * M * c2),
        "rest_phi": M * phi,
        "internal_kinetic_phi": p2 / (2 * mu * c2) * phi,
        "phi_squared": (2 * b - 1) * M * phi**2 / (2 * c2),
    })
    parts["H_A"]["kinetic_metric"] = 2 * g * phi / c2 * p2 / (2 * mu)
    flat = ctx.flat()
    al = atom_light_terms(com, fields, flat, t) if fields.modes else {}
    al.pop("self_energy", None)
    parts["H_AL"] = al
    parts["H_L"] = {"field_energy": field_energy(fields, flat, t)} if fields.box is not None else {}
    has_grad = ctx.has_gradient
    if has_grad:
        rg = float(r @ grad)
        parts["H_A"]["gradient_kinetic"] = -(2 * g + 1) / (2 * c2) * (com.m1 - com.m2) / (com.m1 * com.m2) * rg * p2
        parts["H_X"]["gradient_cross"] = (2 * g + 1) / (M * c2) * rg * float(P @ p)
    return HamiltonianReport(parts, {"gradient_terms": has_grad, "em_gravity": False})


def h_final(com: ComState, fields: FieldConfiguration | None, ctx: PpnContext, t: float = 0.0,
            sigma_d: float | None = None) -> HamiltonianReport:
    """Final centre-of-mass Hamiltonian with prefactored Coulomb and field energy.

    The potential is frozen at its centre-of-mass value; any gradient in
    ``ctx`` is dropped and flagged.  The internal Hamiltonian uses the metric
    kinetic term and the metric-distance Coulomb term, both to first order.
    """
    fields = FieldConfiguration.none() if fields is None else fields
    local = ctx.frozen(com.R)
    c2 = local.c**2
    eps = local.eps
    phi = local.phi
    M, mu = com.M, com.mu
    g, b = local.gamma, local.beta
    P, p, r = com.P, com.p_r, com.r
    P2, p2 = float(P @ P), float(p @ p)
    rn = _abs(r)
    k = _coupling(local.units, com.e1, com.e2)
    h_int = p2 / (2 * mu) + k / rn
    flat = _com_flat(com, local.units)
    parts = {
        "H_C": {
            "P2_2M": P2 / (2 * M),
            "P2_internal": -P2 / (2 * M) * h_int / (M * c2),
            "rest_phi": M * phi,
            "internal_phi": h_int * phi / c2,
            "P4": -(P2**2) / (8 * M**3 * c2),
            "kinetic_phi": (2 * g + 1) * phi * P2 / (2 * M * c2),
            "phi_squared": (2 * b - 1) * M * phi**2 / (2 * c2),
        },
        "H_A": {
            "kinetic": spatial_inner(local, p, p, "inverse") / (2 * mu),
            "coulomb": k * (1.0 + g * eps) / rn,
            "p4": flat["H_A"]["p4"],
            "darwin": flat["H_A"]["darwin"],
        },
        "H_AL": atom_light_terms(com, fields, local, t, sigma_d=sigma_d) if fields.modes else {},
        "H_L": {"field_energy": field_energy(fields, local, t)} if fields.box is not None else {},
        "H_X": flat["H_X"],
    }
    return HamiltonianReport(parts, {"gradient_terms": False, "gradient_dropped": ctx.has_gradient,
                                     "em_gravity": True})


# --- point particle ---------------------------------------------------------------------

def h_point(P, R, m: float, ctx: PpnContext) -> float:
    """Post-Newtonian point-particle Hamiltonian without rest energy."""
    P = np.asarray(P, dtype=float)
    c2 = ctx.c**2
    phi = ctx.potential_at(R)
    P2 = float(P @ P)
    return math.fsum([
        P2 / (2 * m),
        m * phi,
        -(P2**2) / (8 * m**3 * c2),
        (2 * ctx.gamma + 1) * phi * P2 / (2 * m * c2),
        (2 * ctx.beta - 1) * m * phi**2 / (2 * c2),
    ])


def h_point_exact(P, R, m: float, ctx: PpnContext) -> float:
    """Energy minus mc^2 from the mass shell g^{mu nu} p_mu p_nu = -m^2 c^2, with the inverse metric as given.

    E = c sqrt((m^2 c^2 + g^aa P^2) / (-g^00)), written without cancellation.
    """
    P = np.asarray(P, dtype=float)
    c2 = ctx.c**2
    eps = ctx.potential_at(R) / c2
    G = 1.0 - 2.0 * eps - (2.0 * ctx.beta - 4.0) * eps**2  # -g^00
    A = 1.0 + 2.0 * ctx.gamma * eps
    Z = (A * float(P @ P) / (m * m * c2) + 2.0 * eps + (2.0 * ctx.beta - 4.0) * eps**2) / G
    return m * c2 * Z / (1.0 + math.sqrt(1.0 + Z))


# --- composite point particle ------------------------------------------------------------

def _identity_difference(com: ComState, ctx: PpnContext, split: str) -> float:
    rep = h_final(com, None, ctx)
    h_c = rep.group("H_C")
    h_a = rep.group("H_A")
    if split == "metric":
        return h_c - h_point(com.P, com.R, com.M + h_a / ctx.c**2, ctx.frozen(com.R))
    if split == "flat":
        h_a_flat = math.fsum(_com_flat(com, ctx.units)["H_A"].values())
        h_c_wrong = h_c + h_a - h_a_flat
        return h_c_wrong - h_point(com.P, com.R, com.M + h_a_flat / ctx.c**2, ctx.frozen(com.R))
    raise ValueError(f"split must be 'metric' or 'flat', got {split!r}")


def composite_identity_residual(com: ComState, ctx: PpnContext, split: str = "metric") -> float:
    """|H_C,final - H_point(P, R; M + H_A/c^2)|.

    ``split="flat"`` uses the gravity-free internal Hamiltonian for the mass
    and moves the difference into the central part; this leaves an O(c^-2)
    residual (see :func:`flat_split_coefficient`).
    """
    return abs(_identity_difference(com, ctx, split))


def flat_split_difference(com: ComState, ctx: PpnContext) -> float:
    """Signed residual of the flat-metric split."""
    return _identity_difference(com, ctx, "flat")


def flat_split_coefficient(com: ComState, ctx: PpnContext) -> float:
    """Closed-form c^2 x (flat-split residual) at leading order: gamma (2 p^2/2mu + k/r) phi."""
    k = _coupling(ctx.units, com.e1, com.e2)
    p2 = float(com.p_r @ com.p_r)
    return ctx.gamma * (2.0 * p2 / (2.0 * com.mu) + k / _abs(com.r)) * ctx.potential_at(com.R)


# --- decoupling transformation -----------------------------------------------------------

def decoupling_inverse(new: ComState, units: UnitSystem) -> ComState:
    """Map new coordinates (Q, q, p) at total momentum P to the old (R, r, p_r).

    ``new`` carries Q in ``R``, q in ``r`` and p in ``p_r``.
    """
    Q, q, p, P = new.R, new.r, new.p_r, new.P
    m1, m2, M, mu = new.m1, new.m2, new.M, new.mu
    c2 = units.c**2
    k = _coupling(units, new.e1, new.e2)
    qn = _abs(q)
    p2 = float(p @ p)
    qP, Pp = float(q @ P), float(P @ p)
    R = Q + (m1 - m2) / (2 * M**2 * c2) * (p2 / mu * q + k / qn * q) - ((qP * p) + Pp * q) / (2 * M**2 * c2)
    r = q + (m1 - m2) / (mu * M**2 * c2) * qP * p - qP / (2 * M**2 * c2) * P
    p_r = p + Pp / (2 * M**2 * c2) * P - (m1 - m2) / (2 * M**2 * c2) * (p2 / mu * P + k * (P / qn - qP * q / qn**3))
    return new.replace(R=R, r=r, p_r=p_r)


def decoupling_transform(com: ComState, units: UnitSystem, tol: float = 1e-14, max_iter: int = 100) -> ComState:
    """New coordinates (Q, q, p) for an old phase point, by fixed-point inversion."""
    new = com
    scale = [max(_abs(x), 1e-300) for x in (com.R, com.r, com.p_r)]
    for _ in range(max_iter):
        old = decoupling_inverse(new, units)
        dR, dr, dp = com.R - old.R, com.r - old.r, com.p_r - old.p_r
        new = new.replace(R=new.R + dR, r=new.r + dr, p_r=new.p_r + dp)
        err = max(_abs(dR) / max(scale[0], scale[1]), _abs(dr) / scale[1], _abs(dp) / scale[2])
        if err <= tol:
            return new
    raise TransformError(f"decoupling map inversion did not reach {tol:g} in {max_iter} steps")


def com_hamiltonian_flat(com: ComState, units: UnitSystem) -> dict:
    """Gravity-free, field-free H_C, H_A, H_X totals."""
    return {g: math.fsum(t.values()) for g, t in _com_flat(com, units).items()}


def cross_term_residual(new: ComState, units: UnitSystem, transformed: bool = True, odd: bool = False) -> float:
    """H_C + H_A + H_X at old(new) minus H_C + H_A at ``new``.

    With ``odd`` only the part odd under P -> -P is returned.  Without the
    transformation (``transformed=False``) the residual is just H_X.
    """
    def res(point: ComState) -> float:
        old = decoupling_inverse(point, units) if transformed else point
        h_old = com_hamiltonian_flat(old, units)
        h_new = com_hamiltonian_flat(point, units)
        return math.fsum([h_old["H_C"], h_old["H_A"], h_old["H_X"], -h_new["H_C"], -h_new["H_A"]])

    if not odd:
        return res(new)
    return 0.5 * (res(new) - res(new.replace(P=-new.P)))
