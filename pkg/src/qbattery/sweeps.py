"""Parameter sweeps and log-log scaling fits.

Quantities are time averages over the charging window [0, t_f], with t_f the
refined time of maximal stored energy inside the configured grid.  Chains too
large for dense diagonalization are evaluated through the free-fermion path.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .freefermion import (
    dispersion,
    fisher_energy_series,
    observables_on_grid,
    pair_excitations,
)
from .models import MAX_QUBITS_CHAIN, ModelSpec, power_law_couplings
from .observables import battery_entanglement_entropy, time_average
from .trajectory import (
    DEFAULT_STEPS,
    PeakResult,
    Trajectory,
    find_peak_time,
    find_tf,
    run_trajectory,
    time_grid,
)

SWEEP_QUANTITIES = (
    "energy_at_tf",
    "avg_power",
    "avg_var_battery",
    "avg_fisher_energy",
    "rel_final_std",
    "cos_theta_timeavg",
    "cos_theta_timeavg_heis",
    "initial_var_charger",
    "final_battery_entropy",
)


@dataclass(frozen=True)
class ScalingResult:
    """Least-squares exponent of value ~ N^a from a log-log fit."""

    quantity: str
    n_values: tuple[int, ...]
    values: tuple[float, ...]
    exponent: float
    residual: float  # RMS residual of the log-log fit
    excluded: tuple[int, ...] = ()


def fit_exponent(n_values, values, quantity: str = "") -> ScalingResult:
    """Slope of log(value) vs log(N), dropping nonpositive entries.

    The smallest N is excluded (repeatedly, keeping at least 4 points) when
    doing so shrinks the RMS residual by more than a factor of 2; exclusions
    are recorded on the result.
    """
    n_values = [int(n) for n in n_values]
    values = [float(v) for v in values]
    usable = [(n, v) for n, v in zip(n_values, values) if v > 0 and np.isfinite(v)]
    if len(usable) < 3:
        raise ValidationError(
            f"need at least 3 positive values for a scaling fit, got {len(usable)}"
        )
    excluded = [n for n, v in zip(n_values, values) if not (v > 0 and np.isfinite(v))]

    def fit(points):
        log_n = np.log([n for n, _ in points])
        log_v = np.log([v for _, v in points])
        slope, intercept = np.polyfit(log_n, log_v, 1)
        res = float(np.sqrt(np.mean((log_v - (slope * log_n + intercept)) ** 2)))
        return float(slope), res

    points = list(usable)
    slope, res = fit(points)
    while len(points) > 4:
        slope_trim, res_trim = fit(points[1:])
        if res_trim < res / 2:
            excluded.append(points[0][0])
            points = points[1:]
            slope, res = slope_trim, res_trim
        else:
            break
    return ScalingResult(
        quantity=quantity,
        n_values=tuple(n for n, _ in usable),
        values=tuple(v for _, v in usable),
        exponent=slope,
        residual=res,
        excluded=tuple(excluded),
    )


def _window(times: np.ndarray, t_f: float) -> int:
    """Index of the last grid point inside the charging window (>= 1)."""
    return max(int(np.searchsorted(times, t_f, side="right")), 2)


def trajectory_quantities(traj: Trajectory, peak: PeakResult | None = None) -> dict[str, float]:
    """All sweep quantities derivable from one dense trajectory."""
    peak = peak or find_tf(traj)
    stop = _window(traj.times, peak.t_f)
    dt = traj.dt
    avg_var = time_average(traj.var_battery[:stop], dt)
    avg_fisher = time_average(traj.fisher_energy[:stop], dt)
    avg_var_charger = time_average(traj.var_charger[:stop], dt)
    avg_power = peak.energy_max / peak.t_f if peak.t_f > 0 else 0.0
    out = {
        "energy_at_tf": peak.energy_max,
        "avg_power": avg_power,
        "avg_var_battery": avg_var,
        "avg_fisher_energy": avg_fisher,
        "rel_final_std": _rel_final_std(traj, peak),
        "cos_theta_timeavg": _guarded_ratio(avg_power, avg_var * avg_fisher),
        "cos_theta_timeavg_heis": _guarded_ratio(avg_power, avg_var * 4.0 * avg_var_charger),
        "initial_var_charger": float(traj.var_charger[0]),
        "t_f": peak.t_f,
        "t_f_at_boundary": float(peak.at_boundary),
    }
    if traj.spec.family == "dicke":
        idx = min(stop - 1, traj.n_steps - 1)
        out["final_battery_entropy"] = float(
            battery_entanglement_entropy(traj.state_at(idx))
        )
    return out


def _rel_final_std(traj: Trajectory, peak: PeakResult) -> float:
    idx = int(np.argmin(np.abs(traj.times - peak.t_f)))
    e_final = traj.energy[idx]
    if e_final <= 1e-12:
        return float("nan")
    return float(np.sqrt(max(traj.var_battery[idx], 0.0)) / e_final)


def _guarded_ratio(numerator: float, denom_sq: float) -> float:
    if denom_sq < 1e-24:
        return float("nan")
    return float(numerator / np.sqrt(denom_sq))


def chain_analytic_quantities(
    spec: ModelSpec, lam_t_max: float | None = None, steps: int = DEFAULT_STEPS
) -> dict[str, float]:
    """Sweep quantities for a chain through the free-fermion path (any even N)."""
    modes = dispersion(spec)
    times = time_grid(spec, lam_t_max, steps)
    series = observables_on_grid(modes, times)

    def energy_at(t: float) -> float:
        eps, _ = pair_excitations(modes, t)
        return float(eps.sum())

    peak = find_peak_time(times, series["energy"], energy_at)
    stop = _window(times, peak.t_f)
    dt = float(times[1] - times[0])
    fisher = fisher_energy_series(modes, times[:stop])
    avg_var = time_average(series["var_battery"][:stop], dt)
    avg_fisher = time_average(fisher, dt)
    avg_power = peak.energy_max / peak.t_f if peak.t_f > 0 else 0.0
    idx = int(np.argmin(np.abs(times - peak.t_f)))
    e_final = series["energy"][idx]
    return {
        "energy_at_tf": peak.energy_max,
        "avg_power": avg_power,
        "avg_var_battery": avg_var,
        "avg_fisher_energy": avg_fisher,
        "rel_final_std": float(np.sqrt(max(series["var_battery"][idx], 0.0)) / e_final)
        if e_final > 1e-12
        else float("nan"),
        "cos_theta_timeavg": _guarded_ratio(avg_power, avg_var * avg_fisher),
        "cos_theta_timeavg_heis": _guarded_ratio(avg_power, avg_var * 4.0 * modes.var_charger),
        "initial_var_charger": modes.var_charger,
        "t_f": peak.t_f,
        "t_f_at_boundary": float(peak.at_boundary),
    }


def quantities_for(
    spec: ModelSpec,
    lam_t_max: float | None = None,
    steps: int = DEFAULT_STEPS,
    path: str = "auto",
) -> dict[str, float]:
    """Dispatch between dense and analytic evaluation of the sweep quantities."""
    if path not in ("auto", "dense", "analytic"):
        raise ValidationError(f"unknown evaluation path {path!r}")
    if spec.family == "jw_chain":
        if path == "analytic" or (path == "auto" and spec.n_cells > MAX_QUBITS_CHAIN):
            return chain_analytic_quantities(spec, lam_t_max, steps)
    elif path == "analytic":
        raise ValidationError("analytic path exists only for jw_chain models")
    return trajectory_quantities(run_trajectory(spec, lam_t_max, steps))


def sweep_scaling(
    base_spec: ModelSpec,
    n_values,
    quantity: str,
    lam_t_max: float | None = None,
    steps: int = DEFAULT_STEPS,
    path: str = "auto",
    max_workers: int | None = None,
) -> tuple[ScalingResult, list[dict[str, float]]]:
    """Evaluate one quantity over an N sweep and fit its scaling exponent.

    Returns the fit plus the full per-N quantity dictionaries (one CSV row
    each).  Sweep entries are independent and evaluated concurrently.
    """
    n_values = [int(n) for n in n_values]
    if len(n_values) < 4:
        raise ValidationError("sweep needs at least 4 N values")
    if sorted(set(n_values)) != n_values:
        raise ValidationError("sweep N values must be strictly increasing")
    if quantity not in SWEEP_QUANTITIES:
        raise ValidationError(f"unknown sweep quantity {quantity!r}")

    def evaluate(n: int) -> dict[str, float]:
        spec_n = _respecify(base_spec, n)
        return quantities_for(spec_n, lam_t_max, steps, path)

    with ThreadPoolExecutor(max_workers=max_workers or min(4, len(n_values))) as pool:
        rows = list(pool.map(evaluate, n_values))
    values = [row[quantity] for row in rows]
    result = fit_exponent(n_values, values, quantity)
    return result, rows


def _respecify(spec: ModelSpec, n: int) -> ModelSpec:
    """Copy a model spec at a different cell count, rescaling layout fields."""
    if spec.family == "hybrid":
        if spec.r is None or n % spec.r != 0:
            raise ValidationError(f"hybrid sweep needs block size r dividing N = {n}")
        return replace(spec, n_cells=n, q=n // spec.r)
    if spec.family == "jw_chain" and len(spec.lambdas) > 1:
        # Recognized coupling laws are re-extended to the new size; anything
        # else has no defined N dependence.
        for kind in ("xx", "xy"):
            if (spec.lambdas, spec.gammas) == power_law_couplings(spec.n_cells, kind):
                lambdas, gammas = power_law_couplings(n, kind)
                return replace(spec, n_cells=n, lambdas=lambdas, gammas=gammas)
        raise ValidationError(
            "cannot sweep a multi-range chain with custom couplings over N"
        )
    return replace(spec, n_cells=n)
