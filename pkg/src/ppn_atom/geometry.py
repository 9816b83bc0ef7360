"""Eddington-Robertson PPN background: metric, inverse, tetrad and frame conversions.

Everything here is a pure function of an immutable :class:`PpnContext`.  The
potential ``phi`` has units of velocity squared, so ``phi / c**2`` is the
dimensionless field strength.  Off-diagonal metric entries are O(c^-5) and are
stored as exact zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

DEFAULT_C = 137.035999
WEAK_FIELD_LIMIT = 1e-2


class WeakFieldError(ValueError):
    """Raised when |phi|/c^2 leaves the weak-field regime."""


@dataclass(frozen=True)
class UnitSystem:
    """Code units.  Defaults are atomic-like (hbar = 1, 4 pi eps0 = 1)."""

    c: float = DEFAULT_C
    epsilon0: float = 1.0 / (4.0 * math.pi)
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("c", "epsilon0", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")

    @property
    def mu0(self) -> float:
        return 1.0 / (self.epsilon0 * self.c**2)

    def coulomb(self, q1: float, q2: float) -> float:
        """Coulomb coupling q1 q2 / (4 pi eps0)."""
        return q1 * q2 / (4.0 * math.pi * self.epsilon0)

    def with_c(self, c: float) -> "UnitSystem":
        return replace(self, c=c)


def _vec3(value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PpnContext:
    """Gravitational background: PPN parameters plus a linear potential.

    ``phi`` and ``grad_phi`` are the potential and its gradient at ``anchor``
    (normally the centre of mass).  Away from the anchor the potential is the
    monopole linearisation ``phi + grad_phi . (x - anchor)``.
    """

    units: UnitSystem = field(default_factory=UnitSystem)
    gamma: float = 1.0
    beta: float = 1.0
    phi: float = 0.0
    grad_phi: np.ndarray = field(default_factory=lambda: np.zeros(3))
    anchor: np.ndarray = field(default_factory=lambda: np.zeros(3))
    weak_field_limit: float = WEAK_FIELD_LIMIT

    def __post_init__(self):
        object.__setattr__(self, "grad_phi", _vec3(self.grad_phi))
        object.__setattr__(self, "anchor", _vec3(self.anchor))
        if not (math.isfinite(self.gamma) and math.isfinite(self.beta)):
            raise ValueError("gamma and beta must be finite")
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")
        if abs(self.phi) / self.units.c**2 >= self.weak_field_limit:
            raise WeakFieldError(
                f"|phi|/c^2 = {abs(self.phi) / self.units.c**2:.3g} "
                f">= {self.weak_field_limit:g} (weak-field regime violated)"
            )

    @property
    def c(self) -> float:
        return self.units.c

    @property
    def eps(self) -> float:
        """Dimensionless field strength phi/c^2 at the anchor."""
        return self.phi / self.units.c**2

    @property
    def has_gradient(self) -> bool:
        return bool(np.any(self.grad_phi != 0.0))

    def potential_at(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.phi + self.grad_phi @ (x - self.anchor))

    def replace(self, **changes) -> "PpnContext":
        return replace(self, **changes)

    def with_c(self, c: float, hold_ratio: bool = False) -> "PpnContext":
        """Same background with a different speed of light.

        By default phi (and grad phi) stay fixed, so phi/c^2 falls as c^-2;
        this is post-Newtonian counting.  ``hold_ratio`` keeps phi/c^2 fixed.
        """
        scale = (c / self.units.c) ** 2 if hold_ratio else 1.0
        return replace(
            self,
            units=self.units.with_c(c),
            phi=self.phi * scale,
            grad_phi=self.grad_phi * scale,
        )

    def flat(self) -> "PpnContext":
        """Gravity-free copy (phi = 0, grad phi = 0)."""
        return replace(self, phi=0.0, grad_phi=np.zeros(3))

    def frozen(self, at=None) -> "PpnContext":
        """Uniform potential equal to phi(at); drops the gradient."""
        phi = self.phi if at is None else self.potential_at(at)
        anchor = self.anchor if at is None else _vec3(at)
        return replace(self, phi=phi, grad_phi=np.zeros(3), anchor=anchor)


@dataclass(frozen=True)
class MetricComponents:
    g: np.ndarray          # 4x4 covariant components
    g_inv: np.ndarray      # 4x4 contravariant components
    sqrt_minus_g: float
    h: np.ndarray | None = None  # g - diag(-1, 1, 1, 1), formed without cancellation

    @property
    def g00(self) -> float:
        return float(self.g[0, 0])

    @property
    def g0a(self) -> np.ndarray:
        return self.g[0, 1:].copy()

    @property
    def gab(self) -> np.ndarray:
        return self.g[1:, 1:].copy()


def metric_components(ctx: PpnContext, phi: float | None = None) -> MetricComponents:
    """PPN metric at potential ``phi`` (defaults to the anchor value)."""
    eps = ctx.eps if phi is None else phi / ctx.c**2
    if abs(eps) >= ctx.weak_field_limit:
        raise WeakFieldError(f"|phi|/c^2 = {abs(eps):.3g} outside weak-field regime")
    h = np.zeros((4, 4))
    h[0, 0] = -2.0 * eps - 2.0 * ctx.beta * eps**2
    h[1:, 1:] = -2.0 * ctx.gamma * eps * np.eye(3)
    g = np.diag([-1.0, 1.0, 1.0, 1.0]) + h
    g_inv = np.zeros((4, 4))
    g_inv[0, 0] = -1.0 + 2.0 * eps + (2.0 * ctx.beta - 4.0) * eps**2
    g_inv[1:, 1:] = (1.0 + 2.0 * ctx.gamma * eps) * np.eye(3)
    sqrt_minus_g = 1.0 - (3.0 * ctx.gamma - 1.0) * eps
    return MetricComponents(g=g, g_inv=g_inv, sqrt_minus_g=sqrt_minus_g, h=h)


def lapse(ctx: PpnContext, phi: float | None = None) -> float:
    """sqrt(-g00): the gravitational time-dilation factor."""
    return math.sqrt(-metric_components(ctx, phi).g00)


def spatial_inner(ctx: PpnContext, u, v, variant: str = "metric") -> float:
    """Inner product of two spatial vectors with the physical 3-metric or its inverse."""
    dot = float(np.dot(np.asarray(u, dtype=float), np.asarray(v, dtype=float)))
    if variant == "metric":
        return (1.0 - 2.0 * ctx.gamma * ctx.eps) * dot
    if variant == "inverse":
        return (1.0 + 2.0 * ctx.gamma * ctx.eps) * dot
    raise ValueError(f"variant must be 'metric' or 'inverse', got {variant!r}")


@dataclass(frozen=True)
class Tetrad:
    """Orthonormal frame e_0 = e0_factor d_0, e_a = ea_factor d_a.

    ``exact`` frames use 1/sqrt(|g_mumu|) and are orthonormal to rounding;
    truncated frames use (1 - phi/c^2) and (1 + gamma phi/c^2) and are
    orthonormal up to O((phi/c^2)^2).
    """

    e0_factor: float
    ea_factor: float
    exact: bool = True

    def matrix(self) -> np.ndarray:
        """Columns are the frame vectors in the coordinate basis."""
        return np.diag([self.e0_factor, self.ea_factor, self.ea_factor, self.ea_factor])

    def gram(self, metric: MetricComponents) -> np.ndarray:
        """g(e_mu, e_nu)."""
        e = self.matrix()
        return e.T @ metric.g @ e


def tetrad(ctx: PpnContext, exact: bool = True) -> Tetrad:
    eps = ctx.eps
    if exact:
        m = metric_components(ctx)
        return Tetrad(1.0 / math.sqrt(-m.g00), 1.0 / math.sqrt(m.g[1, 1]), exact=True)
    return Tetrad(1.0 - eps, 1.0 + ctx.gamma * eps, exact=False)


def to_physical_fields(ctx: PpnContext, e_coord, b_coord) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate (E, B) components to tetrad components.  Works on (..., 3) arrays."""
    eps = ctx.eps
    e_factor = (1.0 + ctx.gamma * eps) / lapse(ctx)
    b_factor = 1.0 + 2.0 * ctx.gamma * eps
    return e_factor * np.asarray(e_coord, dtype=float), b_factor * np.asarray(b_coord, dtype=float)


def to_physical_dipole(ctx: PpnContext, d_coord) -> np.ndarray:
    return (1.0 - ctx.gamma * ctx.eps) * np.asarray(d_coord, dtype=float)


def from_physical_dipole(ctx: PpnContext, d_phys) -> np.ndarray:
    return (1.0 + ctx.gamma * ctx.eps) * np.asarray(d_phys, dtype=float)
