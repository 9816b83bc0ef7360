"""Gravity-free two-charge formulas, transcribed term by term.

These are the flat-spacetime Darwin Lagrangian, its Legendre transform, the
centre-of-mass Hamiltonian with its decoupling transformation, and the
quasi-static internal potentials.  Nothing here knows about phi, gamma or
beta; the gravity-aware modules are regressed against these at phi = 0.

Charges follow the usual convention e1 = -e, e2 = +e, so e1 e2 = -e^2.
Hermitian conjugates of classical products are plain doubles.
"""
from __future__ import annotations

import math

import numpy as np

from .geometry import UnitSystem


def darwin_lagrangian(m1, m2, e1, e2, r1, r2, v1, v2, units: UnitSystem) -> float:
    c2 = units.c**2
    r = np.asarray(r1, float) - np.asarray(r2, float)
    rn = math.sqrt(r @ r)
    v1 = np.asarray(v1, float)
    v2 = np.asarray(v2, float)
    k = e1 * e2 / (4.0 * math.pi * units.epsilon0)
    return (
        m1 * (v1 @ v1) / 2.0
        + m1 * (v1 @ v1) ** 2 / (8.0 * c2)
        + m2 * (v2 @ v2) / 2.0
        + m2 * (v2 @ v2) ** 2 / (8.0 * c2)
        - k / rn * (1.0 - (v1 @ v2) / (2.0 * c2))
        + k * (v1 @ r) * (v2 @ r) / (2.0 * rn**3 * c2)
    )


def lab_hamiltonian(m1, m2, e1, e2, r1, r2, p1, p2, units: UnitSystem, a1=None, a2=None) -> float:
    """Particle part of the minimal-coupling Hamiltonian (field energy excluded)."""
    c2 = units.c**2
    a1 = np.zeros(3) if a1 is None else np.asarray(a1, float)
    a2 = np.zeros(3) if a2 is None else np.asarray(a2, float)
    pb1 = np.asarray(p1, float) - e1 * a1
    pb2 = np.asarray(p2, float) - e2 * a2
    r = np.asarray(r1, float) - np.asarray(r2, float)
    rn = math.sqrt(r @ r)
    k = e1 * e2 / (4.0 * math.pi * units.epsilon0)
    return (
        (pb1 @ pb1) / (2.0 * m1)
        - (pb1 @ pb1) ** 2 / (8.0 * m1**3 * c2)
        + (pb2 @ pb2) / (2.0 * m2)
        - (pb2 @ pb2) ** 2 / (8.0 * m2**3 * c2)
        + k / rn * (1.0 - (pb1 @ pb2) / (2.0 * m1 * m2 * c2))
        - k * (pb1 @ r) * (pb2 @ r) / (2.0 * rn**3 * c2 * m1 * m2)
    )


def com_hamiltonian(P, r, p, m1, m2, e, units: UnitSystem, E=None, B=None) -> dict:
    """Centre-of-mass Hamiltonian pieces H_C, H_A, H_X and the point-dipole H_AL.

    H_AL omits the (divergent) transverse polarisation self-energy.  The
    dipole is d = sum_k e_k (r_k - R) = -e r for e1 = -e, e2 = +e.
    """
    P = np.asarray(P, float)
    r = np.asarray(r, float)
    p = np.asarray(p, float)
    M = m1 + m2
    mu = m1 * m2 / M
    c2 = units.c**2
    rn = math.sqrt(r @ r)
    ke = e**2 / (4.0 * math.pi * units.epsilon0)
    p2 = p @ p
    P2 = P @ P
    Pp = P @ p

    H_C = P2 / (2 * M) * (1 - P2 / (4 * M**2 * c2) - (p2 / (2 * mu) - ke / rn) / (M * c2))
    H_A = p2 / (2 * mu) * (1 - (m1**3 + m2**3) / M**3 * p2 / (4 * mu**2 * c2)) - ke * (
        1 / rn + (p2 / rn + (p @ r) ** 2 / rn**3) / (2 * mu * M * c2)
    )
    H_X = (
        -(Pp**2) / (2 * M**2 * mu * c2)
        + ke / rn * (P @ r / rn) ** 2 / (2 * M**2 * c2)
        + (m1 - m2)
        / (2 * mu * M**2 * c2)
        * (Pp * p2 / mu - e**2 / (8 * math.pi * units.epsilon0) * 2 * (Pp / rn + (P @ r) * (r @ p) / rn**3))
    )
    out = {"H_C": H_C, "H_A": H_A, "H_X": H_X}
    if E is not None and B is not None:
        d = -e * r
        dxB = np.cross(d, np.asarray(B, float))
        out["H_AL"] = (
            -d @ np.asarray(E, float)
            + (P @ dxB) / M
            - (m1 - m2) / (4 * m1 * m2) * 2 * (p @ dxB)
            + dxB @ dxB / (8 * mu)
        )
    return out


def decoupling_map(Q, q, p, P, m1, m2, e, units: UnitSystem):
    """New (Q, q, p) with total momentum P to old (R, r, p_r)."""
    Q = np.asarray(Q, float)
    q = np.asarray(q, float)
    p = np.asarray(p, float)
    P = np.asarray(P, float)
    M = m1 + m2
    mu = m1 * m2 / M
    c2 = units.c**2
    qn = math.sqrt(q @ q)
    e2 = e**2 / (4.0 * math.pi * units.epsilon0)
    R = (
        Q
        + (m1 - m2) / (2 * M**2 * c2) * (2 * (p @ p) / (2 * mu) * q - e2 / qn * q)
        - 1 / (4 * M**2 * c2) * 2 * ((q @ P) * p + (P @ p) * q)
    )
    r = q + (m1 - m2) / (2 * mu * M**2 * c2) * 2 * (q @ P) * p - (q @ P) / (2 * M**2 * c2) * P
    pr = (
        p
        + (p @ P) / (2 * M**2 * c2) * P
        - (m1 - m2) / (2 * M**2 * c2) * ((p @ p) / mu * P - e2 * (P / qn - (P @ q) * q / qn**3))
    )
    return R, r, pr


def scalar_potential(x, positions, charges, units: UnitSystem) -> float:
    x = np.asarray(x, float)
    total = 0.0
    for ri, qi in zip(positions, charges):
        d = x - np.asarray(ri, float)
        total += qi / math.sqrt(d @ d)
    return total / (4.0 * math.pi * units.epsilon0)


def vector_potential(x, positions, velocities, charges, units: UnitSystem) -> np.ndarray:
    x = np.asarray(x, float)
    total = np.zeros(3)
    for ri, vi, qi in zip(positions, velocities, charges):
        d = x - np.asarray(ri, float)
        vi = np.asarray(vi, float)
        dn = math.sqrt(d @ d)
        total += qi * (vi / dn + d * (vi @ d) / dn**3)
    return units.mu0 / (8.0 * math.pi) * total
