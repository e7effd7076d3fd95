"""Deterministic CSV and JSON emission.

CSV files carry full double precision (17 significant digits), UTF-8, comma
separators, a header row, LF line endings, and empty fields for undefined
values, so identical configs reproduce byte-identical outputs.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .capacity import DiagramPoint
from .sweeps import ScalingResult
from .trajectory import Trajectory

TRAJECTORY_COLUMNS = (
    "t",
    "E",
    "P",
    "var_HB",
    "var_HC",
    "I_E",
    "I_Q",
    "cos_theta_P",
    "bound_ratio_cor1",
    "bound_ratio_heis",
)


def format_value(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path: str | Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _guarded_ratio(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    out = np.full_like(lhs, np.nan, dtype=float)
    ok = rhs > 1e-12
    out[ok] = lhs[ok] / rhs[ok]
    return out


def trajectory_rows(traj: Trajectory, include_populations: bool = False):
    """Column header and row iterator for the trajectory CSV schema."""
    header = list(TRAJECTORY_COLUMNS)
    # Ratio columns come from the untruncated Fisher sum (the certification
    # arithmetic); the I_E column itself is the floored observable.
    ratio_cor1 = _guarded_ratio(traj.power**2, traj.var_battery * traj.fisher_energy_full)
    ratio_heis = _guarded_ratio(traj.power**2, 4.0 * traj.var_battery * traj.var_charger)
    columns = [
        traj.times,
        traj.energy,
        traj.power,
        traj.var_battery,
        traj.var_charger,
        traj.fisher_energy,
        traj.fisher_state,
        traj.cos_theta,
        ratio_cor1,
        ratio_heis,
    ]
    if include_populations:
        header += [f"p_{k}" for k in range(traj.levels.n_levels)]
        columns += [traj.populations[k] for k in range(traj.levels.n_levels)]
    return header, zip(*columns)


def write_trajectory_csv(traj: Trajectory, path: str | Path, include_populations: bool = False) -> None:
    header, rows = trajectory_rows(traj, include_populations)
    write_csv(path, header, rows)


def write_json(path: str | Path, payload: dict) -> None:
    def default(obj):
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        raise TypeError(f"not JSON serializable: {type(obj)}")

    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True, default=default)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")


def write_scaling_outputs(
    result: ScalingResult,
    n_values: list[int],
    rows: list[dict],
    directory: str | Path,
    stem: str = "scaling",
) -> None:
    directory = Path(directory)
    keys = sorted(rows[0]) if rows else []
    header = ["N"] + keys
    table = [[n] + [row.get(k) for k in keys] for n, row in zip(n_values, rows)]
    write_csv(directory / f"{stem}.csv", header, table)
    write_json(
        directory / f"{stem}.json",
        {
            "quantity": result.quantity,
            "N": n_values,
            "values": list(result.values),
            "exponent": result.exponent,
            "residual": result.residual,
            "excluded": list(result.excluded),
        },
    )


def write_diagram_csv(points: list[DiagramPoint], path: str | Path) -> None:
    rows = [[p.beta, p.energy, p.entropy_bits] for p in points]
    write_csv(path, ["beta", "E", "S_bits"], rows)
