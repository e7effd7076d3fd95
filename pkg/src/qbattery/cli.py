"""Command-line harness.

Subcommands: simulate, sweep, capacity, table1, certify, validate.
Exit codes: 0 success, 2 configuration error, 3 bound violation (certify),
4 numerical-validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .capacity import capacity_at_entropy, solve_beta_for_entropy, thermal_curve
from .config import load_capacity, load_scenario
from .errors import ConfigError, QBatteryError
from .linalg import eigendecompose
from .models import build_battery_for
from .output import (
    TRAJECTORY_COLUMNS,
    write_csv,
    write_diagram_csv,
    write_json,
    write_scaling_outputs,
    write_trajectory_csv,
)
from .sweeps import quantities_for, sweep_scaling
from .trajectory import find_tf, run_trajectory
from .verification import certify_trajectory, run_oracle_checks, verify_benchmark_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VIOLATION = 3
EXIT_VALIDATION = 4


def _apply_overrides(spec, args):
    if getattr(args, "no_normalization", False):
        if spec.family != "dicke":
            raise ConfigError("--no-normalization applies only to the cavity model")
        spec = replace(spec, normalize_coupling=False)
    return spec


def cmd_simulate(args) -> int:
    cfg = load_scenario(args.config)
    spec = _apply_overrides(cfg.spec, args)
    traj = run_trajectory(spec, cfg.lam_t_max, cfg.steps, cfg.level_rel_tol)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, out_dir / "trajectory.csv", "populations" in cfg.series)
    peak = find_tf(traj)
    report = certify_trajectory(traj)
    summary = {
        "model": spec.family,
        "N": spec.n_cells,
        "lam": spec.lam,
        "t_f": peak.t_f,
        "t_f_at_boundary": peak.at_boundary,
        "E_max": peak.energy_max,
        "stored_fraction": report.amplitude.stored_fraction,
        "witness_block_max": report.witness_block_max,
        "max_ratio_fisher_power": report.max_ratio_fisher_power,
        "max_ratio_heisenberg": report.max_ratio_heisenberg,
        "certification_ok": report.ok,
        "n_violations": len(report.violations),
    }
    if spec.family == "dicke":
        summary["n_max_used"] = traj.n_max_used
        summary["fock_edge_population"] = traj.fock_edge_population
        summary["initial_var_charger"] = float(traj.var_charger[0])
    write_json(out_dir / "summary.json", summary)
    print(f"wrote {out_dir / 'trajectory.csv'} and summary.json ({traj.n_steps} steps)")
    if not report.ok:
        print(f"certification found {len(report.violations)} violation(s)", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_scenario(args.config)
    if cfg.sweep is None:
        raise ConfigError("sweep command needs a 'sweep' section in the config")
    spec = _apply_overrides(cfg.spec, args)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.sweep.parameter == "gamma":
        rows = []
        for gamma in cfg.sweep.values:
            spec_g = replace(spec, gamma=float(gamma))
            row = quantities_for(spec_g, cfg.lam_t_max, cfg.steps, cfg.sweep.path)
            rows.append((gamma, row))
        keys = sorted(rows[0][1])
        write_csv(
            out_dir / "gamma_scan.csv",
            ["gamma"] + keys,
            [[g] + [row.get(k) for k in keys] for g, row in rows],
        )
        print(f"wrote {out_dir / 'gamma_scan.csv'} ({len(rows)} points)")
        return EXIT_OK
    n_values = [int(v) for v in cfg.sweep.values]
    result, rows = sweep_scaling(
        spec, n_values, cfg.sweep.quantity, cfg.lam_t_max, cfg.steps, cfg.sweep.path
    )
    write_scaling_outputs(result, n_values, rows, out_dir)
    print(
        f"{cfg.sweep.quantity}: exponent {result.exponent:.4f} "
        f"(residual {result.residual:.2e}, excluded {list(result.excluded)})"
    )
    return EXIT_OK


def cmd_capacity(args) -> int:
    cfg = load_capacity(args.config)
    battery = eigendecompose(build_battery_for(cfg.spec))
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pos = np.logspace(-3, math.log10(cfg.beta_max_abs), cfg.points_per_branch)
    betas = np.concatenate([-pos[::-1], [0.0], pos])
    write_diagram_csv(thermal_curve(battery, betas), out_dir / "diagram.csv")
    targets = {}
    for s_bits in cfg.entropy_targets_bits:
        low = solve_beta_for_entropy(battery, s_bits, "positive_beta")
        high = solve_beta_for_entropy(battery, s_bits, "negative_beta")
        targets[format(s_bits, ".6g")] = {
            "E_min": low.energy,
            "E_max": high.energy,
            "beta_positive": low.beta,
            "beta_negative": high.beta,
            "capacity": capacity_at_entropy(battery, s_bits),
        }
    summary = {
        "N": cfg.spec.n_cells,
        "dim": battery.dim,
        "capacity_S0": float(battery.eigenvalues[-1] - battery.eigenvalues[0]),
        "entropy_targets": targets,
    }
    write_json(out_dir / "capacity.json", summary)
    print(f"wrote {out_dir / 'diagram.csv'} and capacity.json")
    return EXIT_OK


def cmd_table1(args) -> int:
    report = verify_benchmark_table(seed=args.seed, lam=args.lam)
    for cell in report.cells:
        tag = "PASS" if cell.passed else "FAIL"
        layout = f" q={cell.q} r={cell.r}" if cell.family == "hybrid" else ""
        print(
            f"{tag} {cell.family:8s} N={cell.n_cells}{layout:10s} {cell.cell:22s} "
            f"expected {cell.expected:.12g} actual {cell.actual:.12g}"
        )
    n_fail = len(report.failed())
    print(f"{len(report.cells) - n_fail}/{len(report.cells)} cells passed")
    if args.json:
        write_json(
            args.json,
            {
                "all_passed": report.all_passed,
                "cells": [
                    {
                        "family": c.family,
                        "N": c.n_cells,
                        "q": c.q,
                        "r": c.r,
                        "cell": c.cell,
                        "expected": c.expected,
                        "actual": c.actual,
                        "passed": c.passed,
                    }
                    for c in report.cells
                ],
            },
        )
    return EXIT_OK if report.all_passed else EXIT_VALIDATION


def _read_trajectory_csv(path: str) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = [
            [float(cell) if cell else math.nan for cell in row]
            for row in reader
        ]
    data = np.array(rows, dtype=float)
    missing = [c for c in TRAJECTORY_COLUMNS if c not in header]
    if missing:
        raise ConfigError(f"{path}: missing trajectory columns {missing}")
    return {name: data[:, header.index(name)] for name in header}


def cmd_certify(args) -> int:
    cols = _read_trajectory_csv(args.trajectory)
    tol = 1e-8
    floor = 1e-12
    violations = []

    def check(label, lhs, rhs):
        bad = lhs > rhs * (1 + tol) + floor
        bad &= ~(np.isnan(lhs) | np.isnan(rhs))
        for idx in np.flatnonzero(bad):
            violations.append(
                {"label": label, "t": cols["t"][idx], "lhs": lhs[idx], "rhs": rhs[idx]}
            )

    # The I_E column is the floored observable, a lower bound on the exact
    # Fisher sum, so it is safe on the small side of each inequality below;
    # the power-bound check itself rides on the emitted ratio column.
    check("fisher_power_ratio", cols["bound_ratio_cor1"], np.ones_like(cols["t"]))
    check("heisenberg_ratio", cols["bound_ratio_heis"], np.ones_like(cols["t"]))
    check("heisenberg_power", cols["P"] ** 2, 4.0 * cols["var_HB"] * cols["var_HC"])
    check("dephasing_fisher", cols["I_E"], 4.0 * cols["var_HC"])
    check("fisher_vs_state", cols["I_E"], cols["I_Q"])
    check("cos_theta_range", np.abs(cols["cos_theta_P"]), np.full_like(cols["t"], 1.0 + 1e-6))
    payload = {"ok": not violations, "n_steps": len(cols["t"]), "violations": violations}
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_validate(args) -> int:
    checks = run_oracle_checks(seed=args.seed)
    for check in checks:
        print(f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbattery",
        description="Quantum-battery charging simulations with power and capacity bound checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one trajectory and emit CSV + summary JSON")
    p.add_argument("config", help="scenario JSON file")
    p.add_argument("--no-normalization", action="store_true",
                   help="drop the 1/sqrt(N) cavity coupling normalization")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run an N or gamma sweep with a scaling fit")
    p.add_argument("config", help="scenario JSON file with a sweep section")
    p.add_argument("--no-normalization", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("capacity", help="emit the energy-entropy diagram and entropy targets")
    p.add_argument("config", help="capacity JSON file")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("table1", help="verify the closed-form benchmark table")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--json", help="optional JSON report path")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("certify", help="re-check bound columns of an emitted trajectory CSV")
    p.add_argument("trajectory", help="trajectory.csv produced by simulate")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("validate", help="run all independent-oracle cross-checks")
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QBatteryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
