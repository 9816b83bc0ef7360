"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a physics check fails, 2 for
configuration errors.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import output
from .config import ConfigError, RunConfig, load_config
from .dynamics import composite_mass, integrate_point
from .em_sector import ChargeModel, poisson_convergence
from .hamiltonians import composite_identity_residual, h_com_split, h_final, h_lab_new, h_point
from .probes import run_probes
from .sampling import sample_com_states
from .spectrum import GridTooCoarseError, internal_levels
from .states import ValidityError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
DRIFT_LIMIT = 1e-6


def _emit(cfg: RunConfig, rows: list[dict], payload=None) -> None:
    if cfg.format == "json":
        output.write(output.to_json(rows if payload is None else payload), cfg.output)
    else:
        output.write(output.to_csv(rows), cfg.output)


def cmd_order_check(cfg: RunConfig) -> int:
    results = run_probes(cfg)
    _emit(cfg, [r.row() for r in results])
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_spectrum(cfg: RunConfig) -> int:
    rows = []
    for point in cfg.sweep():
        ctx = point.context()
        spec = internal_levels(ctx, point.m1, point.m2, point.e, point.n_levels, point.l, point.grid_points)
        for row in spec.rows():
            rows.append({"gamma": point.gamma, "beta": point.beta, "phi_over_c2": point.phi_over_c2, **row})
    _emit(cfg, rows)
    return EXIT_OK


def cmd_trajectory(cfg: RunConfig) -> int:
    ctx = cfg.context()
    M = cfg.m1 + cfg.m2
    rows = []
    trajectories = []
    status = EXIT_OK
    for body, energy in enumerate(cfg.internal_energy):
        m = composite_mass(M, energy, cfg.c)
        traj = integrate_point(np.zeros(3), np.asarray(cfg.momentum), m, ctx, cfg.dt, cfg.steps)
        trajectories.append(traj)
        if traj.energy_drift > DRIFT_LIMIT:
            print(f"warning: body {body} energy drift {traj.energy_drift:.3e} > {DRIFT_LIMIT:g}", file=sys.stderr)
            if cfg.strict:
                status = EXIT_FAIL
        for row in traj.rows():
            rows.append({"body": body, "internal_energy": float(energy), **row})
    if len(trajectories) > 1:
        sep = max(float(np.max(np.linalg.norm(t.R - trajectories[0].R, axis=1))) for t in trajectories[1:])
        print(f"max separation from body 0: {sep:.6e}", file=sys.stderr)
    _emit(cfg, rows)
    return status


def _gamma_derivative(com, ctx, step: float = 1.0) -> float:
    # H_final is linear in gamma, so a wide central difference is exact up to rounding
    up = h_final(com, None, ctx.replace(gamma=ctx.gamma + step)).total
    down = h_final(com, None, ctx.replace(gamma=ctx.gamma - step)).total
    return (up - down) / (2.0 * step)


def _gamma_coefficient(com, ctx) -> float:
    """Closed-form dH_final/dgamma: phi (P^2/M + 2 p^2/2mu + k/r)/c^2."""
    eps = ctx.frozen(com.R).eps
    k = ctx.units.coulomb(com.e1, com.e2)
    P2, p2 = float(com.P @ com.P), float(com.p_r @ com.p_r)
    return eps * (P2 / com.M + p2 / com.mu + k / math.sqrt(float(com.r @ com.r)))


def cmd_hamiltonian_report(cfg: RunConfig) -> int:
    ctx = cfg.context()
    states = sample_com_states(cfg.n_points, cfg.seed, cfg.m1, cfg.m2, cfg.e, cfg.c, speed_fraction=(0.001, 0.01))
    records, rows = [], []
    for i, com in enumerate(states):
        local = ctx.replace(anchor=com.R)
        final = h_final(com, None, local)
        split = h_com_split(com, None, local)
        lab = h_lab_new(com.to_lab(), None, local, em_gravity=False)
        m_eff = com.M + final.group("H_A") / cfg.c**2
        rec = {
            "index": i,
            "state": {"R": com.R, "P": com.P, "r": com.r, "p_r": com.p_r},
            "H_final": final.to_dict(),
            "H_com_new": split.to_dict(),
            "H_lab_new": lab,
            "H_point_composite": h_point(com.P, com.R, m_eff, local.frozen(com.R)),
            "composite_identity_residual": composite_identity_residual(com, local),
            "dH_dgamma_fd": _gamma_derivative(com, local),
            "dH_dgamma_closed": _gamma_coefficient(com, local),
        }
        records.append(rec)
        rows.append({"index": i, **final.flat(), "total": final.total, "H_lab_new": lab,
                     "dH_dgamma_fd": rec["dH_dgamma_fd"], "dH_dgamma_closed": rec["dH_dgamma_closed"]})
    _emit(cfg, rows, payload={"config": {"gamma": cfg.gamma, "beta": cfg.beta, "phi_over_c2": cfg.phi_over_c2,
                                         "c": cfg.c, "seed": cfg.seed}, "points": records})
    return EXIT_OK


def cmd_maxwell_residual(cfg: RunConfig) -> int:
    ctx = cfg.context()
    charges = ChargeModel([[-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]], [-cfg.e, cfg.e], sigma=1.0)
    rows = poisson_convergence(charges, ctx, (0.25, 0.125, 0.0625), half_width=6.5)
    _emit(cfg, rows)
    orders = [r["order"] for r in rows[1:]]
    return EXIT_OK if all(1.8 <= o <= 2.2 for o in orders) else EXIT_FAIL


COMMANDS = {
    "order-check": cmd_order_check,
    "spectrum": cmd_spectrum,
    "trajectory": cmd_trajectory,
    "hamiltonian-report": cmd_hamiltonian_report,
    "maxwell-residual": cmd_maxwell_residual,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppn-atom", description="Post-Newtonian two-charge bound systems in a PPN background.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--phi-over-c2", dest="phi_over_c2", type=float)
    parser.add_argument("--grad-phi", dest="grad_phi", help="comma-separated gradient of phi")
    parser.add_argument("--c", type=float, help="speed of light in code units")
    parser.add_argument("--m1", type=float)
    parser.add_argument("--m2", type=float)
    parser.add_argument("--e", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--n-points", dest="n_points", type=int)
    parser.add_argument("--n-levels", dest="n_levels", type=int)
    parser.add_argument("--l", type=int)
    parser.add_argument("--grid-points", dest="grid_points", type=int)
    parser.add_argument("--sweep", dest="sweep_parameter", choices=["gamma", "beta", "phi_over_c2"])
    parser.add_argument("--values", dest="sweep_values", help="comma-separated sweep values")
    parser.add_argument("--dt", type=float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--internal-energy", dest="internal_energy", help="comma-separated internal energies")
    parser.add_argument("--momentum", help="comma-separated initial momentum")
    parser.add_argument("--strict", action="store_const", const=True, default=None)
    parser.add_argument("--format", choices=["csv", "json"])
    parser.add_argument("--output", "-o", help="output file (relative to $%s); '-' for stdout" % output.OUTPUT_DIR_ENV)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = load_config(args.config, overrides)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidityError, GridTooCoarseError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
