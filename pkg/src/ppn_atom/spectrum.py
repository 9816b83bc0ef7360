"""Hydrogen-like internal spectrum with metric kinetic and Coulomb coefficients.

The radial problem is

    -(A hbar^2 / 2 mu) (u'' - l(l+1) u / r^2) - (B k / r) u = E u,

with A = 1 + 2 gamma phi/c^2, B = 1 + gamma phi/c^2 and u(0) = u(r_max) = 0.
It is discretised with the three-point stencil on a uniform grid (in units of
the scaled Bohr radius) and the lowest eigenvalues are extracted from the
symmetric tridiagonal matrix.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .geometry import PpnContext, lapse

MIN_POINTS = 2000
MIN_BOHR_RADII = 30.0


class GridTooCoarseError(RuntimeError):
    """Discretisation error estimate exceeds the requested tolerance."""


@dataclass(frozen=True)
class RadialProblem:
    mu: float
    k: float  # attraction strength, e^2 / (4 pi eps0) > 0
    A: float = 1.0
    B: float = 1.0
    l: int = 0
    hbar: float = 1.0
    r_max: float | None = None  # default: 60 scaled Bohr radii
    N: int = 8000

    def __post_init__(self):
        if not (self.mu > 0 and self.k > 0 and self.A > 0 and self.B > 0 and self.hbar > 0):
            raise ValueError("mu, k, A, B and hbar must be positive")
        if self.l < 0 or int(self.l) != self.l:
            raise ValueError("l must be a non-negative integer")
        if self.N < MIN_POINTS:
            raise ValueError(f"N must be at least {MIN_POINTS}")
        if self.r_max is not None and self.r_max < MIN_BOHR_RADII * self.bohr_radius:
            raise ValueError(f"r_max must cover at least {MIN_BOHR_RADII:g} scaled Bohr radii")

    @property
    def bohr_radius(self) -> float:
        """A hbar^2 / (B mu k)."""
        return self.A * self.hbar**2 / (self.B * self.mu * self.k)

    @property
    def extent(self) -> float:
        return 60.0 * self.bohr_radius if self.r_max is None else self.r_max

    def bohr_levels(self, count: int) -> np.ndarray:
        """-(B^2/A) mu k^2 / (2 hbar^2 n^2) for n = l+1, ..., l+count."""
        n = np.arange(self.l + 1, self.l + 1 + count)
        return -(self.B**2 / self.A) * self.mu * self.k**2 / (2.0 * self.hbar**2 * n**2)


@lru_cache(maxsize=64)
def _unit_eigen(l: int, N: int, rho_max: float, count: int, vectors: bool):
    """Three-point eigenproblem of -u''/2 + l(l+1)u/(2 rho^2) - u/rho in Bohr units."""
    h = rho_max / (N + 1)
    rho = h * np.arange(1, N + 1)
    diag = 1.0 / h**2 + 0.5 * l * (l + 1) / rho**2 - 1.0 / rho
    off = np.full(N - 1, -0.5 / h**2)
    if vectors:
        w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
        return w, v, rho, h
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, count - 1))


def _eigen(problem: RadialProblem, N: int, count: int, vectors: bool = False):
    """Eigenpairs of ``problem`` on N interior points.

    Substituting r = a rho maps the A, B problem exactly onto the unit
    hydrogen problem with energies in units of (B^2/A) mu k^2 / hbar^2, so all
    (A, B) share one discretisation error and level ratios are exact.
    """
    a = problem.bohr_radius
    unit = problem.B**2 / problem.A * problem.mu * problem.k**2 / problem.hbar**2
    out = _unit_eigen(problem.l, N, problem.extent / a, count, vectors)
    if not vectors:
        return unit * out
    w, v, rho, h = out
    return unit * w, v.copy(), a * rho, a * h


def solve_radial(problem: RadialProblem, n_levels: int, extrapolate: bool = True, tol: float = 1e-4) -> np.ndarray:
    """Lowest ``n_levels`` eigenvalues.

    The problem is solved on N and 2N+1 interior points (h halves exactly);
    with ``extrapolate`` the O(h^2) term is removed by Richardson
    extrapolation.  Raises :class:`GridTooCoarseError` when the fine-grid
    ground state differs from the extrapolated one by more than ``tol``
    (relative).
    """
    if n_levels < 1:
        raise ValueError("n_levels must be at least 1")
    coarse = _eigen(problem, problem.N, n_levels)
    fine = _eigen(problem, 2 * problem.N + 1, n_levels)
    rich = (4.0 * fine - coarse) / 3.0
    if abs(fine[0] - rich[0]) > tol * abs(rich[0]):
        raise GridTooCoarseError(
            f"ground-state discretisation error {abs(fine[0] - rich[0]) / abs(rich[0]):.2e} exceeds {tol:g}"
        )
    return rich if extrapolate else fine


def radial_states(problem: RadialProblem, n_levels: int):
    """Eigenvalues and unit-normalised u(r) on the interior grid of ``problem.N`` points."""
    w, v, r, h = _eigen(problem, problem.N, n_levels, vectors=True)
    v = v / np.sqrt(np.sum(v**2, axis=0) * h)
    return w, v, r, h


def _integrate(f: np.ndarray, h: float) -> float:
    """Trapezoid rule on [0, r_max]; the r=0 value is extrapolated and f(r_max) = 0."""
    f0 = 2.0 * f[0] - f[1]
    return float(h * (0.5 * f0 + np.sum(f)))


def _padded_derivative(u: np.ndarray, h: float) -> np.ndarray:
    full = np.concatenate([[0.0], u, [0.0]])
    return np.gradient(full, h, edge_order=2)[1:-1]


def p4_expectation(u, r, h, energy: float, problem: RadialProblem) -> float:
    """<p^4> from (A p^2 / 2 mu)^2 psi = (E + B k / r)^2 psi: (2 mu / A)^2 <(E + B k/r)^2>."""
    w = (energy + problem.B * problem.k / r) ** 2
    return (2.0 * problem.mu / problem.A) ** 2 * _integrate(w * u**2, h)


def darwin_cross_expectation(u, r, h, l: int, hbar: float) -> float:
    """<p.(1/r)p + p.r (1/r^3) r.p> = hbar^2 int [2 (u' - u/r)^2 + l(l+1) u^2/r^2] / r dr."""
    du = _padded_derivative(u, h) - u / r
    integrand = (2.0 * du**2 + l * (l + 1) * u**2 / r**2) / r
    return hbar**2 * _integrate(integrand, h)


@dataclass
class SpectrumResult:
    l: int
    n: list
    energies: np.ndarray  # coordinate-time eigenvalues of the metric internal Hamiltonian
    delta_p4: np.ndarray
    delta_cross: np.ndarray
    M: float
    c: float
    hbar: float
    lapse: float
    params: dict = field(default_factory=dict)

    @property
    def totals(self) -> np.ndarray:
        return self.energies + self.delta_p4 + self.delta_cross

    def index(self, n: int) -> int:
        if n not in self.n:
            raise KeyError(f"level n={n} not in spectrum (have {self.n})")
        return self.n.index(n)

    def rows(self) -> list[dict]:
        ref = self.totals[0]
        out = []
        for i, n in enumerate(self.n):
            out.append({
                "n": n,
                "l": self.l,
                "E_coord": float(self.energies[i]),
                "dE_p4": float(self.delta_p4[i]),
                "dE_cross": float(self.delta_cross[i]),
                "mass_defect": float(self.M + self.totals[i] / self.c**2),
                "omega_proper": float((self.totals[i] - ref) / (self.hbar * self.lapse)),
            })
        return out

    def to_json(self) -> str:
        return json.dumps({"params": self.params, "levels": self.rows()}, sort_keys=True, indent=2)


def internal_levels(ctx: PpnContext, m1: float, m2: float, e: float, n_levels: int = 3, l: int = 0,
                    N: int = 8000, r_max_bohr: float = 60.0, tol: float = 1e-4) -> SpectrumResult:
    """Levels of the final internal Hamiltonian for charges -e, +e.

    Eigenvalues come from the A, B-scaled Coulomb problem; the p^4 and
    Darwin-type corrections are first-order shifts evaluated with the
    unperturbed radial functions.
    """
    eps = ctx.eps
    M = m1 + m2
    mu = m1 * m2 / M
    k = e * e / (4.0 * math.pi * ctx.units.epsilon0)
    A = 1.0 + 2.0 * ctx.gamma * eps
    B = 1.0 + ctx.gamma * eps
    hbar = ctx.units.hbar
    a = A * hbar**2 / (B * mu * k)
    problem = RadialProblem(mu, k, A, B, l, hbar, r_max_bohr * a, N)
    energies = solve_radial(problem, n_levels, tol=tol)
    w, v, r, h = radial_states(problem, n_levels)
    c2 = ctx.c**2
    mass_factor = (m1**3 + m2**3) / M**3
    dp4 = np.array([
        -mass_factor * p4_expectation(v[:, i], r, h, w[i], problem) / (8.0 * mu**3 * c2) for i in range(n_levels)
    ])
    # e1 e2 / (4 pi eps0) = -k for opposite charges
    dcross = np.array([
        -k / (2.0 * mu * M * c2) * darwin_cross_expectation(v[:, i], r, h, l, hbar) for i in range(n_levels)
    ])
    return SpectrumResult(
        l=l,
        n=list(range(l + 1, l + 1 + n_levels)),
        energies=energies,
        delta_p4=dp4,
        delta_cross=dcross,
        M=M,
        c=ctx.c,
        hbar=hbar,
        lapse=lapse(ctx),
        params={"gamma": ctx.gamma, "beta": ctx.beta, "phi_over_c2": eps, "m1": m1, "m2": m2, "e": e,
                "c": ctx.c, "N": N},
    )


def mass_defect(spectrum: SpectrumResult, n: int) -> float:
    """M + E_n / c^2 with the perturbative corrections included."""
    return spectrum.M + spectrum.totals[spectrum.index(n)] / spectrum.c**2


def proper_time_frequency(spectrum: SpectrumResult, n: int, m: int) -> float:
    """(E_n - E_m) / (hbar sqrt(-g00)): the transition frequency in local proper time."""
    if n == m:
        raise ValueError("transition needs two different levels")
    i, j = spectrum.index(n), spectrum.index(m)
    return (spectrum.totals[i] - spectrum.totals[j]) / (spectrum.hbar * spectrum.lapse)
