"""Exact trajectory runs: batch propagation plus vectorized observables.

A trajectory holds the full time grid of states and the derived series
(stored energy, power, variances, level populations and rates, Fisher
informations, bound saturation ratio).  Scalar observables are computed from
the battery level populations, so bound checks and reported values share one
arithmetic path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .linalg import (
    HermitianOperator,
    LevelStructure,
    StateVector,
    eigendecompose,
    evolve,
    evolve_batch,
    group_levels,
)
from .models import (
    ModelSpec,
    build_battery_for,
    build_charger_for,
    initial_state,
)
from .observables import (
    POPULATION_FLOOR,
    ObservableRecord,
    PopulationRecord,
    battery_entanglement_entropy,
)

DEFAULT_STEPS = 2000
DEFAULT_LAM_T_MAX = {
    "parallel": 1.2 * math.pi / 2,
    "global": 1.2 * math.pi / 2,
    "hybrid": 1.2 * math.pi / 2,
    "jw_chain": 10.0,
    "lmg": 6.0,
    "dicke": 20.0,
}
FOCK_LEAK_TOL = 1e-8
MAX_FOCK_DOUBLINGS = 4


@dataclass
class Trajectory:
    """Uniform-grid charging run with per-step derived series."""

    spec: ModelSpec
    times: np.ndarray
    states: np.ndarray  # (dim, T), column per grid time
    battery: HermitianOperator
    charger: HermitianOperator
    levels: LevelStructure
    psi0: StateVector
    initial_energy: float  # absolute <H_B> at t = 0
    populations: np.ndarray  # (L, T)
    population_rates: np.ndarray  # (L, T)
    energy: np.ndarray  # stored energy, relative to t = 0
    power: np.ndarray
    var_battery: np.ndarray
    var_charger: np.ndarray
    fisher_energy: np.ndarray
    fisher_energy_full: np.ndarray  # untruncated, used by bound certification
    fisher_state: np.ndarray
    cos_theta: np.ndarray
    n_max_used: int | None = None
    fock_edge_population: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def n_steps(self) -> int:
        return len(self.times)

    def state_at(self, index: int) -> StateVector:
        return StateVector(self.states[:, index], self.psi0.basis)

    def population_record(self, index: int) -> PopulationRecord:
        return PopulationRecord(
            t=float(self.times[index]),
            p=self.populations[:, index],
            p_dot=self.population_rates[:, index],
        )

    def observable_record(self, index: int) -> ObservableRecord:
        return ObservableRecord(
            t=float(self.times[index]),
            energy=float(self.energy[index]),
            power=float(self.power[index]),
            var_battery=float(self.var_battery[index]),
            var_charger=float(self.var_charger[index]),
            fisher_energy=float(self.fisher_energy[index]),
            fisher_state=float(self.fisher_state[index]),
            cos_theta=float(self.cos_theta[index]),
        )

    def battery_entropy_series(self) -> np.ndarray:
        """Normalized battery-cavity entanglement entropy (spin-Fock runs only)."""
        return np.array(
            [battery_entanglement_entropy(self.state_at(i)) for i in range(self.n_steps)]
        )

    def stored_energy_at(self, t: float) -> float:
        """Exact stored energy at an arbitrary (off-grid) time."""
        psi = evolve(self.charger, self.psi0, t)
        overlaps = self.battery.eigenvectors.conj().T @ psi.amplitudes
        return float(np.abs(overlaps) ** 2 @ self.battery.eigenvalues - self.initial_energy)


def time_grid(spec: ModelSpec, lam_t_max: float | None = None, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Uniform grid over [0, t_max] with t_max given in units of 1/lam."""
    if steps < 2:
        raise ValidationError("time grid needs at least 2 steps")
    if lam_t_max is None:
        lam_t_max = DEFAULT_LAM_T_MAX[spec.family]
    if lam_t_max <= 0:
        raise ValidationError("lam_t_max must be positive")
    return np.linspace(0.0, lam_t_max / spec.lam, steps)


def _fock_edge_population(states: np.ndarray, n_cells: int, n_max: int) -> float:
    n_fock = n_max + 1
    blocks = states.reshape(n_cells + 1, n_fock, -1)
    edge = np.abs(blocks[:, n_max - 1 :, :]) ** 2
    return float(edge.sum(axis=(0, 1)).max())


def _run_fixed(spec: ModelSpec, times: np.ndarray, level_rel_tol: float, n_max: int | None) -> Trajectory:
    battery = eigendecompose(build_battery_for(spec, n_max))
    charger = eigendecompose(build_charger_for(spec, n_max))
    levels = group_levels(battery, level_rel_tol)
    psi0 = initial_state(spec, n_max)
    states = evolve_batch(charger, psi0, times)

    overlaps = battery.eigenvectors.conj().T @ states
    driven = battery.eigenvectors.conj().T @ (charger.matrix @ states)
    starts = levels.starts[:-1]
    populations = np.add.reduceat(np.abs(overlaps) ** 2, starts, axis=0)
    rates = 2.0 * np.add.reduceat((overlaps.conj() * driven).imag, starts, axis=0)

    e_levels = levels.energies
    energy_abs = e_levels @ populations
    initial_energy = float(energy_abs[0])
    energy = energy_abs - initial_energy
    power = e_levels @ rates
    var_battery = e_levels**2 @ populations - energy_abs**2

    charger_weights = np.abs(charger.eigenvectors.conj().T @ states) ** 2
    mean_c = charger.eigenvalues @ charger_weights
    var_charger = charger.eigenvalues**2 @ charger_weights - mean_c**2

    masked = np.where(populations > POPULATION_FLOOR, populations, np.inf)
    fisher_energy = (rates**2 / masked).sum(axis=0)
    # Untruncated sum for bound certification: the floor drops a real Fisher
    # share (up to ~1e-7 of the total near full charge), which would break
    # saturated inequality checks at the 1e-8 tolerance.  Exact zeros are
    # masked; symmetry-protected zeros contribute only noise^2 terms.
    unfloored = np.where(populations > 0.0, populations, np.inf)
    fisher_energy_full = (rates**2 / unfloored).sum(axis=0)
    fisher_state = 4.0 * var_charger  # pure-state trajectories

    denom = var_battery * fisher_energy
    cos_theta = np.full_like(energy, np.nan)
    defined = denom > POPULATION_FLOOR**2
    cos_theta[defined] = power[defined] / np.sqrt(denom[defined])

    return Trajectory(
        spec=spec,
        times=times,
        states=states,
        battery=battery,
        charger=charger,
        levels=levels,
        psi0=psi0,
        initial_energy=initial_energy,
        populations=populations,
        population_rates=rates,
        energy=energy,
        power=power,
        var_battery=np.maximum(var_battery, 0.0),
        var_charger=np.maximum(var_charger, 0.0),
        fisher_energy=fisher_energy,
        fisher_energy_full=fisher_energy_full,
        fisher_state=fisher_state,
        cos_theta=cos_theta,
        n_max_used=n_max,
    )


def run_trajectory(
    spec: ModelSpec,
    lam_t_max: float | None = None,
    steps: int = DEFAULT_STEPS,
    level_rel_tol: float = 1e-9,
) -> Trajectory:
    """Charge from the model's initial state over a uniform grid.

    For the cavity model with no explicit n_max, the Fock cutoff starts at
    2N+8 and doubles until the population within one level of the cutoff
    stays below 1e-8 over the whole window.
    """
    times = time_grid(spec, lam_t_max, steps)
    if spec.family != "dicke":
        return _run_fixed(spec, times, level_rel_tol, None)

    auto = spec.n_max is None
    n_max = spec.n_max if spec.n_max is not None else 2 * spec.n_cells + 8
    for _ in range(MAX_FOCK_DOUBLINGS + 1):
        traj = _run_fixed(spec, times, level_rel_tol, n_max)
        leak = _fock_edge_population(traj.states, spec.n_cells, n_max)
        traj.fock_edge_population = leak
        if leak < FOCK_LEAK_TOL or not auto:
            return traj
        n_max *= 2
    raise ValidationError(
        f"Fock cutoff did not converge below leakage {FOCK_LEAK_TOL} "
        f"after {MAX_FOCK_DOUBLINGS} doublings (last n_max = {n_max})"
    )


@dataclass(frozen=True)
class PeakResult:
    t_f: float
    energy_max: float
    at_boundary: bool


def _golden_maximize(f, a: float, b: float, rel_tol: float) -> tuple[float, float]:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    scale = max(abs(a), abs(b), 1e-12)
    while (b - a) > rel_tol * scale:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    mid = 0.5 * (a + b)
    return mid, f(mid)


def find_peak_time(
    times: np.ndarray,
    energies: np.ndarray,
    evaluator,
    rel_tol: float = 1e-6,
) -> PeakResult:
    """Grid argmax of the stored energy refined by golden-section search.

    ``evaluator(t)`` must return the exact stored energy at arbitrary t.  The
    refined value never falls below the grid maximum; a peak sitting on the
    final grid point is flagged instead of refined.
    """
    times = np.asarray(times, dtype=float)
    energies = np.asarray(energies, dtype=float)
    if len(times) < 3:
        raise ValidationError("need at least 3 grid points to locate a peak")
    idx = int(np.argmax(energies))
    if idx == len(times) - 1:
        return PeakResult(t_f=float(times[idx]), energy_max=float(energies[idx]), at_boundary=True)
    if idx == 0:
        return PeakResult(t_f=float(times[0]), energy_max=float(energies[0]), at_boundary=False)
    t_ref, e_ref = _golden_maximize(evaluator, times[idx - 1], times[idx + 1], rel_tol)
    if e_ref < energies[idx]:
        t_ref, e_ref = float(times[idx]), float(energies[idx])
    return PeakResult(t_f=float(t_ref), energy_max=float(e_ref), at_boundary=False)


def find_tf(traj: Trajectory, rel_tol: float = 1e-6) -> PeakResult:
    """Refined time of maximal stored energy for a computed trajectory."""
    return find_peak_time(traj.times, traj.energy, traj.stored_energy_at, rel_tol)
