"""Phase-space points of the two-particle system and the centre-of-mass map."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

VELOCITY_GUARD = 0.3  # |v|/c and |p|/(mc) must stay below this


class SingularPointError(ValueError):
    """Evaluation at (or numerically on top of) a point charge."""


class ValidityError(ValueError):
    """State outside the slow-motion regime of the expansion."""


def _v(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class TwoParticleState:
    """Two spinless charges.  ``rep`` says whether ``u1, u2`` are velocities or momenta.

    Charges are e1 = sign1 * e and e2 = sign2 * e (default -e, +e).
    """

    m1: float
    m2: float
    e: float
    r1: np.ndarray
    r2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    rep: str = "velocity"
    sign1: float = -1.0
    sign2: float = 1.0

    def __post_init__(self):
        for name in ("r1", "r2", "u1", "u2"):
            object.__setattr__(self, name, _v(getattr(self, name)))
        if not (self.m1 > 0 and self.m2 > 0):
            raise ValueError("masses must be positive")
        if self.rep not in ("velocity", "momentum"):
            raise ValueError("rep must be 'velocity' or 'momentum'")
        if np.linalg.norm(self.r1 - self.r2) == 0.0:
            raise SingularPointError("coincident particles (r1 == r2)")

    @classmethod
    def from_velocities(cls, m1, m2, e, r1, r2, v1, v2, **kw) -> "TwoParticleState":
        return cls(m1, m2, e, r1, r2, v1, v2, rep="velocity", **kw)

    @classmethod
    def from_momenta(cls, m1, m2, e, r1, r2, p1, p2, **kw) -> "TwoParticleState":
        return cls(m1, m2, e, r1, r2, p1, p2, rep="momentum", **kw)

    @property
    def e1(self) -> float:
        return self.sign1 * self.e

    @property
    def e2(self) -> float:
        return self.sign2 * self.e

    @property
    def v1(self) -> np.ndarray:
        self._need("velocity")
        return self.u1

    @property
    def v2(self) -> np.ndarray:
        self._need("velocity")
        return self.u2

    @property
    def p1(self) -> np.ndarray:
        self._need("momentum")
        return self.u1

    @property
    def p2(self) -> np.ndarray:
        self._need("momentum")
        return self.u2

    def _need(self, rep):
        if self.rep != rep:
            raise ValueError(f"state is in {self.rep} representation, {rep} required")

    @property
    def M(self) -> float:
        return self.m1 + self.m2

    @property
    def mu(self) -> float:
        return self.m1 * self.m2 / (self.m1 + self.m2)

    @property
    def R(self) -> np.ndarray:
        return (self.m1 * self.r1 + self.m2 * self.r2) / self.M

    @property
    def r(self) -> np.ndarray:
        return self.r1 - self.r2

    def with_velocities(self, v1, v2) -> "TwoParticleState":
        return replace(self, u1=_v(v1), u2=_v(v2), rep="velocity")

    def with_momenta(self, p1, p2) -> "TwoParticleState":
        return replace(self, u1=_v(p1), u2=_v(p2), rep="momentum")

    def swapped(self) -> "TwoParticleState":
        """Exchange the labels 1 <-> 2 (masses, charges, positions, velocities)."""
        return replace(
            self, m1=self.m2, m2=self.m1, r1=self.r2, r2=self.r1, u1=self.u2, u2=self.u1,
            sign1=self.sign2, sign2=self.sign1,
        )

    def translated(self, shift) -> "TwoParticleState":
        s = _v(shift)
        return replace(self, r1=self.r1 + s, r2=self.r2 + s)

    def check_velocities(self, c: float) -> None:
        if self.rep == "velocity":
            speeds = (np.linalg.norm(self.u1), np.linalg.norm(self.u2))
        else:
            speeds = (np.linalg.norm(self.u1) / self.m1, np.linalg.norm(self.u2) / self.m2)
        if max(speeds) >= VELOCITY_GUARD * c:
            raise ValidityError(f"speed {max(speeds):.4g} exceeds {VELOCITY_GUARD} c")

    def to_com(self) -> "ComState":
        self._need("momentum")
        P = self.u1 + self.u2
        p_r = (self.m2 * self.u1 - self.m1 * self.u2) / self.M
        return ComState(self.R, P, self.r, p_r, self.m1, self.m2, self.e, self.sign1, self.sign2)


@dataclass(frozen=True)
class ComState:
    """Newtonian centre-of-mass and relative variables (R, P, r, p_r)."""

    R: np.ndarray
    P: np.ndarray
    r: np.ndarray
    p_r: np.ndarray
    m1: float
    m2: float
    e: float
    sign1: float = -1.0
    sign2: float = 1.0

    def __post_init__(self):
        for name in ("R", "P", "r", "p_r"):
            object.__setattr__(self, name, _v(getattr(self, name)))
        if not (self.m1 > 0 and self.m2 > 0):
            raise ValueError("masses must be positive")
        if np.linalg.norm(self.r) == 0.0:
            raise SingularPointError("relative separation is zero")

    @property
    def M(self) -> float:
        return self.m1 + self.m2

    @property
    def mu(self) -> float:
        return self.m1 * self.m2 / (self.m1 + self.m2)

    @property
    def e1(self) -> float:
        return self.sign1 * self.e

    @property
    def e2(self) -> float:
        return self.sign2 * self.e

    @property
    def dipole(self) -> np.ndarray:
        """d = sum_k e_k (r_k - R)."""
        return (self.e1 * self.m2 - self.e2 * self.m1) / self.M * self.r

    @property
    def r1(self) -> np.ndarray:
        return self.R + self.m2 / self.M * self.r

    @property
    def r2(self) -> np.ndarray:
        return self.R - self.m1 / self.M * self.r

    def check_momenta(self, c: float) -> None:
        if np.linalg.norm(self.P) >= VELOCITY_GUARD * self.M * c:
            raise ValidityError("|P|/(Mc) exceeds validity guard")
        if np.linalg.norm(self.p_r) >= VELOCITY_GUARD * self.mu * c:
            raise ValidityError("|p_r|/(mu c) exceeds validity guard")

    def to_lab(self) -> TwoParticleState:
        p1 = self.m1 / self.M * self.P + self.p_r
        p2 = self.m2 / self.M * self.P - self.p_r
        return TwoParticleState(
            self.m1, self.m2, self.e, self.r1, self.r2, p1, p2, rep="momentum",
            sign1=self.sign1, sign2=self.sign2,
        )

    def replace(self, **changes) -> "ComState":
        return replace(self, **changes)

    def exchanged(self) -> "ComState":
        """Swap constituents: m1 <-> m2, charges swapped, r -> -r, p_r -> -p_r."""
        return replace(
            self, m1=self.m2, m2=self.m1, r=-self.r, p_r=-self.p_r,
            sign1=self.sign2, sign2=self.sign1,
        )


@dataclass
class LagrangianBreakdown:
    """Named Lagrangian contributions; ``total`` is their sum."""

    rest_mass: float = 0.0
    newton_kinetic: float = 0.0
    p4_kinetic: float = 0.0
    newton_potential: float = 0.0
    phi_squared: float = 0.0
    kinetic_phi_cross: float = 0.0
    coulomb: float = 0.0
    darwin_velocity: float = 0.0
    external_coupling: float = 0.0
    field: float = 0.0

    VELOCITY_TERMS = ("newton_kinetic", "p4_kinetic", "kinetic_phi_cross", "darwin_velocity", "external_coupling")

    def terms(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def total(self) -> float:
        return math.fsum(self.terms().values())

    @property
    def velocity_part(self) -> float:
        """Sum of the terms that depend on particle velocities."""
        return math.fsum(getattr(self, n) for n in self.VELOCITY_TERMS)

    @property
    def static_part(self) -> float:
        return math.fsum(v for n, v in self.terms().items() if n not in self.VELOCITY_TERMS)

    @property
    def potential_part(self) -> float:
        """Static terms other than the rest energy."""
        skip = self.VELOCITY_TERMS + ("rest_mass",)
        return math.fsum(v for n, v in self.terms().items() if n not in skip)

    def __add__(self, other: "LagrangianBreakdown") -> "LagrangianBreakdown":
        return LagrangianBreakdown(**{n: v + getattr(other, n) for n, v in self.terms().items()})
