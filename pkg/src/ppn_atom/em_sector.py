"""Internal potentials with gravitational prefactors, grid residuals, and the external field.

Over the extent of the atom the potential is taken constant and equal to
``ctx.phi``; gradients never enter this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .geometry import PpnContext, metric_components, to_physical_fields
from .states import LagrangianBreakdown, SingularPointError, TwoParticleState

_SINGULAR = 1e-12


class QuadratureError(ValueError):
    """Quadrature box too coarse for the field modes."""


class GridError(ValueError):
    """Grid does not enclose the smeared charges."""


def scalar_prefactor(ctx: PpnContext) -> float:
    """1 + (gamma + 1) phi/c^2: internal scalar potential, Coulomb and field-energy weight."""
    return 1.0 + (ctx.gamma + 1.0) * ctx.eps


def vector_prefactor(ctx: PpnContext) -> float:
    """1 - (gamma + 1) phi/c^2: internal vector potential and canonical field momentum."""
    return 1.0 - (ctx.gamma + 1.0) * ctx.eps


@dataclass(frozen=True)
class ChargeModel:
    """Point charges, optionally smeared into Gaussians of standard deviation ``sigma``."""

    positions: np.ndarray
    charges: np.ndarray
    sigma: float = 0.0

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        q = np.atleast_1d(np.asarray(self.charges, dtype=float))
        if pos.shape != (len(q), 3):
            raise ValueError("positions must be (n, 3) matching n charges")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "charges", q)

    @classmethod
    def from_state(cls, state: TwoParticleState, sigma: float = 0.0) -> "ChargeModel":
        return cls(np.stack([state.r1, state.r2]), np.array([state.e1, state.e2]), sigma)

    @property
    def total_charge(self) -> float:
        return float(self.charges.sum())

    def density(self, x) -> np.ndarray:
        """Gaussian charge density at points x of shape (..., 3); needs sigma > 0."""
        if self.sigma <= 0:
            raise ValueError("point charges have no pointwise density")
        x = np.asarray(x, dtype=float)
        norm = (2.0 * math.pi) ** 1.5 * self.sigma**3
        rho = np.zeros(x.shape[:-1])
        for ri, qi in zip(self.positions, self.charges):
            d2 = np.sum((x - ri) ** 2, axis=-1)
            rho += qi * np.exp(-d2 / (2.0 * self.sigma**2)) / norm
        return rho


def _coulomb_kernel(d: np.ndarray, sigma: float) -> np.ndarray:
    """1/d for points, erf(d / (sqrt2 sigma))/d for Gaussians."""
    if sigma == 0.0:
        if np.any(d < _SINGULAR):
            raise SingularPointError("potential evaluated on a point charge")
        return 1.0 / d
    out = np.empty_like(d)
    small = d < 1e-8 * sigma
    out[small] = math.sqrt(2.0 / math.pi) / sigma
    ds = d[~small]
    out[~small] = erf(ds / (math.sqrt(2.0) * sigma)) / ds
    return out


def internal_scalar_potential(charges: ChargeModel, x, ctx: PpnContext):
    """Electric potential of the charges with the (1 + (gamma+1) phi/c^2) weight.

    ``x`` may be a single point or an array of points (..., 3).
    """
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape[:-1])
    for ri, qi in zip(charges.positions, charges.charges):
        d = np.sqrt(np.sum((x - ri) ** 2, axis=-1))
        total = total + qi * _coulomb_kernel(np.atleast_1d(d), charges.sigma).reshape(d.shape)
    out = scalar_prefactor(ctx) * total / (4.0 * math.pi * ctx.units.epsilon0)
    return float(out) if out.ndim == 0 else out


def internal_vector_potential(state: TwoParticleState, x, ctx: PpnContext):
    """Quasi-static transverse vector potential of the moving charges, Coulomb gauge."""
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape)
    for ri, vi, qi in ((state.r1, state.v1, state.e1), (state.r2, state.v2, state.e2)):
        d = x - ri
        dn = np.sqrt(np.sum(d**2, axis=-1))[..., None]
        if np.any(dn < _SINGULAR):
            raise SingularPointError("vector potential evaluated on a point charge")
        vd = np.sum(d * vi, axis=-1)[..., None]
        total = total + qi * (vi / dn + d * vd / dn**3)
    return vector_prefactor(ctx) * ctx.units.mu0 / (8.0 * math.pi) * total


@dataclass(frozen=True)
class GridSpec:
    """Cubic lattice of half-width ``half_width`` centred at ``center``."""

    half_width: float
    spacing: float
    center: tuple = (0.0, 0.0, 0.0)
    stencil_order: int = 2

    def __post_init__(self):
        if self.spacing <= 0 or self.half_width <= 0:
            raise ValueError("spacing and half-width must be positive")
        if self.stencil_order != 2:
            raise ValueError("only the second-order 7-point stencil is implemented")

    @property
    def n(self) -> int:
        return int(round(2.0 * self.half_width / self.spacing)) + 1

    def axis(self, k: int) -> np.ndarray:
        return self.center[k] - self.half_width + self.spacing * np.arange(self.n)

    def encloses(self, charges: ChargeModel, margin_sigmas: float = 6.0) -> bool:
        c = np.asarray(self.center, dtype=float)
        reach = np.max(np.abs(charges.positions - c)) + margin_sigmas * charges.sigma
        return reach <= self.half_width


def poisson_residual(charges: ChargeModel, grid: GridSpec, ctx: PpnContext) -> float:
    """Relative L2 residual of the discrete Poisson equation for the smeared internal potential.

    The 7-point Laplacian of the closed-form potential is compared with
    -(1/eps0)(1 + (gamma+1) phi/c^2) rho on interior nodes.
    """
    if charges.sigma <= 0:
        raise ValueError("poisson_residual needs smeared charges (sigma > 0)")
    if not grid.encloses(charges):
        raise GridError("box must enclose every charge by at least 6 sigma")
    x, y, z = (grid.axis(k) for k in range(3))
    h2 = grid.spacing**2
    weight = scalar_prefactor(ctx) / ctx.units.epsilon0
    num = 0.0
    den = 0.0
    # slab-wise along x to bound memory on fine grids
    yy, zz = np.meshgrid(y, z, indexing="ij")

    def plane(xi):
        pts = np.stack([np.full_like(yy, xi), yy, zz], axis=-1)
        return internal_scalar_potential(charges, pts, ctx), pts

    prev, _ = plane(x[0])
    cur, pts = plane(x[1])
    for i in range(1, len(x) - 1):
        nxt, nxt_pts = plane(x[i + 1])
        lap = (
            prev[1:-1, 1:-1] + nxt[1:-1, 1:-1]
            + cur[2:, 1:-1] + cur[:-2, 1:-1] + cur[1:-1, 2:] + cur[1:-1, :-2]
            - 6.0 * cur[1:-1, 1:-1]
        ) / h2
        rhs = -weight * charges.density(pts[1:-1, 1:-1])
        num += float(np.sum((lap - rhs) ** 2))
        den += float(np.sum(rhs**2))
        prev, cur, pts = cur, nxt, nxt_pts
    return math.sqrt(num / den)


def poisson_convergence(charges: ChargeModel, ctx: PpnContext, spacings, half_width: float,
                        center=(0.0, 0.0, 0.0)) -> list[dict]:
    """Residuals over successively refined grids with observed orders (CSV-ready rows)."""
    rows = []
    prev = None
    for h in spacings:
        res = poisson_residual(charges, GridSpec(half_width, h, tuple(center)), ctx)
        order = math.nan if prev is None else math.log(prev[1] / res) / math.log(prev[0] / h)
        rows.append({"h": h, "residual": res, "order": order})
        prev = (h, res)
    return rows


@dataclass(frozen=True)
class PlaneWave:
    """A(x, t) = amplitude cos(k.x - omega t + phase), with omega = c |k|."""

    amplitude: np.ndarray
    wavevector: np.ndarray
    phase: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.amplitude, dtype=float)
        k = np.asarray(self.wavevector, dtype=float)
        if a.shape != (3,) or k.shape != (3,):
            raise ValueError("amplitude and wavevector must be 3-vectors")
        if not np.any(k):
            raise ValueError("wavevector must be non-zero")
        if abs(a @ k) > 1e-12 * np.linalg.norm(a) * np.linalg.norm(k):
            raise ValueError("plane-wave amplitude must be transverse to its wavevector")
        object.__setattr__(self, "amplitude", a)
        object.__setattr__(self, "wavevector", k)

    def omega(self, c: float) -> float:
        return c * float(np.linalg.norm(self.wavevector))


@dataclass(frozen=True)
class QuadratureBox:
    """Midpoint-rule box: ``points`` cells per axis over ``lengths`` from ``origin``."""

    origin: tuple = (0.0, 0.0, 0.0)
    lengths: tuple = (1.0, 1.0, 1.0)
    points: tuple = (16, 16, 16)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def nodes(self) -> tuple[np.ndarray, float]:
        axes = [
            o + (np.arange(n) + 0.5) * (L / n)
            for o, L, n in zip(self.origin, self.lengths, self.points)
        ]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return grid, self.volume / float(np.prod(self.points))


@dataclass(frozen=True)
class FieldConfiguration:
    """External transverse field as a superposition of plane waves."""

    modes: tuple = ()
    box: QuadratureBox | None = None

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))

    @classmethod
    def none(cls) -> "FieldConfiguration":
        return cls(())

    def _phases(self, x, t, c):
        x = np.asarray(x, dtype=float)
        for m in self.modes:
            yield m, np.tensordot(x, m.wavevector, axes=([-1], [0])) - m.omega(c) * t + m.phase

    def vector_potential(self, x, t: float, c: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for m, th in self._phases(x, t, c):
            out = out + np.cos(th)[..., None] * m.amplitude
        return out

    def dA_dt(self, x, t: float, c: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for m, th in self._phases(x, t, c):
            out = out + (m.omega(c) * np.sin(th))[..., None] * m.amplitude
        return out

    def electric(self, x, t: float, c: float) -> np.ndarray:
        """Coordinate components E = -dA/dt."""
        return -self.dA_dt(x, t, c)

    def magnetic(self, x, t: float, c: float) -> np.ndarray:
        """Coordinate components B = curl A."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for m, th in self._phases(x, t, c):
            out = out - np.sin(th)[..., None] * np.cross(m.wavevector, m.amplitude)
        return out

    def check_resolution(self, min_points: int = 16) -> None:
        if self.box is None:
            raise QuadratureError("field configuration has no quadrature box")
        h = np.array([L / n for L, n in zip(self.box.lengths, self.box.points)])
        for m in self.modes:
            kn = np.linalg.norm(m.wavevector)
            wavelength = 2.0 * math.pi / kn
            # cell size along the propagation direction
            spacing = float(np.max(np.abs(m.wavevector) / kn * h))
            if wavelength / spacing < min_points:
                raise QuadratureError(
                    f"{wavelength / spacing:.1f} points per wavelength < {min_points}"
                )


def canonical_field_momentum(fields: FieldConfiguration, x, t: float, ctx: PpnContext) -> np.ndarray:
    """Pi = eps0 (1 - (gamma+1) phi/c^2) dA/dt."""
    return ctx.units.epsilon0 * vector_prefactor(ctx) * fields.dA_dt(x, t, ctx.c)


def field_lagrangian(fields: FieldConfiguration, ctx: PpnContext, t: float = 0.0) -> float:
    """(eps0/2) int [(1-(g+1)phi/c^2)(dA/dt)^2 - c^2 (1+(g+1)phi/c^2)(curl A)^2]."""
    if not fields.modes:
        return 0.0
    fields.check_resolution()
    x, dv = fields.box.nodes()
    adot = fields.dA_dt(x, t, ctx.c)
    b = fields.magnetic(x, t, ctx.c)
    density = vector_prefactor(ctx) * np.sum(adot**2, axis=-1) - ctx.c**2 * scalar_prefactor(ctx) * np.sum(b**2, axis=-1)
    return 0.5 * ctx.units.epsilon0 * float(np.sum(density)) * dv


def field_energy(fields: FieldConfiguration, ctx: PpnContext, t: float = 0.0, frame: str = "coordinate") -> float:
    """External field energy in the box.

    ``coordinate``: (eps0/2) int (1+(g+1)phi/c^2)[(Pi/eps0)^2 + c^2 (curl A)^2].
    ``tetrad``: (eps0/2) int sqrt(-g) [E_phys^2 + c^2 B_phys^2].
    """
    if not fields.modes:
        return 0.0
    fields.check_resolution()
    x, dv = fields.box.nodes()
    eps0 = ctx.units.epsilon0
    c2 = ctx.c**2
    if frame == "coordinate":
        pi = canonical_field_momentum(fields, x, t, ctx)
        b = fields.magnetic(x, t, ctx.c)
        density = scalar_prefactor(ctx) * (np.sum((pi / eps0) ** 2, axis=-1) + c2 * np.sum(b**2, axis=-1))
    elif frame == "tetrad":
        e_phys, b_phys = to_physical_fields(ctx, fields.electric(x, t, ctx.c), fields.magnetic(x, t, ctx.c))
        density = metric_components(ctx).sqrt_minus_g * (
            np.sum(e_phys**2, axis=-1) + c2 * np.sum(b_phys**2, axis=-1)
        )
    else:
        raise ValueError(f"frame must be 'coordinate' or 'tetrad', got {frame!r}")
    return 0.5 * eps0 * float(np.sum(density)) * dv


def external_coupling(state: TwoParticleState, fields: FieldConfiguration, ctx: PpnContext, t: float = 0.0) -> float:
    """Pointwise sum_i e_i v_i . A(r_i)."""
    if not fields.modes:
        return 0.0
    a1 = fields.vector_potential(state.r1, t, ctx.c)
    a2 = fields.vector_potential(state.r2, t, ctx.c)
    return float(state.e1 * state.v1 @ a1 + state.e2 * state.v2 @ a2)


def em_lagrangian_terms(state: TwoParticleState, fields: FieldConfiguration, ctx: PpnContext,
                        t: float = 0.0, include_field: bool = True) -> LagrangianBreakdown:
    """Electromagnetic part of the post-Newtonian Lagrangian, self-interactions dropped.

    The Coulomb term carries (1 + (gamma+1) phi/c^2); the velocity-dependent
    Darwin term carries no gravitational factor at this order.
    """
    if fields is None:
        fields = FieldConfiguration.none()
    r = state.r
    rn = float(np.linalg.norm(r))
    k = ctx.units.coulomb(state.e1, state.e2)
    v1, v2 = state.v1, state.v2
    coulomb = -scalar_prefactor(ctx) * k / rn
    darwin = k / (2.0 * ctx.c**2) * ((v1 @ v2) / rn + (v1 @ r) * (v2 @ r) / rn**3)
    out = LagrangianBreakdown(
        coulomb=coulomb,
        darwin_velocity=float(darwin),
        external_coupling=external_coupling(state, fields, ctx, t),
    )
    if include_field and fields.box is not None:
        out.field = field_lagrangian(fields, ctx, t)
    return out
