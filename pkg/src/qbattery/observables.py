"""Per-state measurements: energy, power, variances, populations, Fisher
information in the battery-energy eigenspace, state-space Fisher information,
distances, and the local/correlation variance split.

Fisher information in energy space uses the natural-log form
``sum_k pdot_k^2 / p_k``, the one for which the power bound chain
``P^2 <= var(H_B) * I_E <= 4 var(H_B) var(H_C)`` is an exact inequality.
Entropies and the Kullback-Leibler divergence are reported in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import (
    Basis,
    DensityMatrix,
    HermitianOperator,
    LevelStructure,
    StateVector,
    eigendecompose,
    von_neumann_entropy,
)

POPULATION_FLOOR = 1e-12
COS_THETA_DENOM_FLOOR = 1e-12
QFI_PAIR_FLOOR = 1e-14


@dataclass(frozen=True)
class PopulationRecord:
    """Battery-level occupations and their analytic rates at one instant."""

    t: float
    p: np.ndarray
    p_dot: np.ndarray

    def __post_init__(self):
        if abs(self.p.sum() - 1.0) > 1e-9:
            raise ValidationError(f"populations sum to {self.p.sum()!r}")
        if abs(self.p_dot.sum()) > 1e-8:
            raise ValidationError(f"population rates sum to {self.p_dot.sum()!r}")
        if self.p.min() < -1e-12:
            raise ValidationError(f"negative population {self.p.min():.3e}")


@dataclass(frozen=True)
class ObservableRecord:
    """All scalar observables of one trajectory step."""

    t: float
    energy: float
    power: float
    var_battery: float
    var_charger: float
    fisher_energy: float
    fisher_state: float
    cos_theta: float  # NaN marks an undefined (0/0-guarded) ratio

    def __post_init__(self):
        values = (self.energy, self.power, self.var_battery, self.var_charger,
                  self.fisher_energy, self.fisher_state)
        if not all(np.isfinite(v) for v in values):
            raise ValidationError("non-finite observable value")
        if min(self.var_battery, self.var_charger) < -1e-10:
            raise ValidationError("negative variance")


def expectation(psi: StateVector, op: HermitianOperator) -> float:
    if op.basis != psi.basis:
        raise ValidationError("operator and state bases do not match")
    return float(np.vdot(psi.amplitudes, op.matrix @ psi.amplitudes).real)


def stored_energy(psi: StateVector, battery: HermitianOperator, psi0: StateVector) -> float:
    """Energy of ``psi`` relative to the reference state ``psi0``."""
    return expectation(psi, battery) - expectation(psi0, battery)


def power(psi: StateVector, battery: HermitianOperator, charger: HermitianOperator) -> float:
    """Instantaneous d<H_B>/dt = i<[H_C, H_B]> under the charging dynamics."""
    if battery.basis != psi.basis or charger.basis != psi.basis:
        raise ValidationError("operator and state bases do not match")
    b_psi = battery.matrix @ psi.amplitudes
    c_psi = charger.matrix @ psi.amplitudes
    return float(2.0 * np.vdot(b_psi, c_psi).imag)


def variance(psi: StateVector, op: HermitianOperator, m: int = 1) -> float:
    """Variance of the m-th power of ``op``, via its eigendecomposition."""
    if m < 1:
        raise ValidationError("moment order m must be >= 1")
    op = eigendecompose(op)
    if op.basis != psi.basis:
        raise ValidationError("operator and state bases do not match")
    weights = np.abs(op.eigenvectors.conj().T @ psi.amplitudes) ** 2
    mean_m = float(weights @ op.eigenvalues**m)
    mean_2m = float(weights @ op.eigenvalues ** (2 * m))
    return mean_2m - mean_m**2


def populations_and_rates(
    psi: StateVector, levels: LevelStructure, charger: HermitianOperator, t: float = 0.0
) -> PopulationRecord:
    """Level occupations p_k = <psi|P_k|psi> and analytic rates.

    For unitary dynamics generated by ``charger`` the rate is
    pdot_k = 2 Im <psi|P_k H_C|psi>; no finite differences are involved.
    """
    op = levels.operator
    if op.basis != psi.basis or charger.basis != psi.basis:
        raise ValidationError("levels, charger, and state bases do not match")
    overlaps = op.eigenvectors.conj().T @ psi.amplitudes
    driven = op.eigenvectors.conj().T @ (charger.matrix @ psi.amplitudes)
    p = np.add.reduceat(np.abs(overlaps) ** 2, levels.starts[:-1])
    p_dot = 2.0 * np.add.reduceat((overlaps.conj() * driven).imag, levels.starts[:-1])
    return PopulationRecord(t=t, p=p, p_dot=p_dot)


def fisher_energy(record: PopulationRecord) -> float:
    """sum_k pdot_k^2 / p_k over levels with p_k above the population floor."""
    mask = record.p > POPULATION_FLOOR
    return float((record.p_dot[mask] ** 2 / record.p[mask]).sum())


def qfi(rho: DensityMatrix, drive: HermitianOperator) -> float:
    """State-space Fisher information of a unitary family generated by ``drive``.

    I_Q = 2 sum_{i != j} (p_i - p_j)^2 / (p_i + p_j) |<i|H|j>|^2 over the
    eigenbasis of rho; equals 4 * variance(psi, H) for a pure state.  Pairs
    with p_i + p_j below 1e-14 are skipped.
    """
    if rho.basis != drive.basis:
        raise ValidationError("state and drive bases do not match")
    probs, vecs = np.linalg.eigh(rho.matrix)
    probs = np.clip(probs, 0.0, None)
    h_eig = vecs.conj().T @ drive.matrix @ vecs
    psum = probs[:, None] + probs[None, :]
    pdiff = probs[:, None] - probs[None, :]
    weight = np.zeros_like(psum)
    mask = psum > QFI_PAIR_FLOOR
    weight[mask] = pdiff[mask] ** 2 / psum[mask]
    np.fill_diagonal(weight, 0.0)
    return float(2.0 * (weight * np.abs(h_eig) ** 2).sum())


def bures_angle(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """arccos of the Uhlmann fidelity, in [0, pi/2]."""
    if rho.basis != sigma.basis:
        raise ValidationError("state bases do not match")
    probs, vecs = np.linalg.eigh(rho.matrix)
    sqrt_rho = (vecs * np.sqrt(np.clip(probs, 0.0, None))) @ vecs.conj().T
    inner = sqrt_rho @ sigma.matrix @ sqrt_rho
    vals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    fidelity = np.clip(np.sqrt(vals).sum(), 0.0, 1.0)
    return float(np.arccos(fidelity))


def fubini_study(psi: StateVector, phi: StateVector) -> float:
    """arccos |<phi|psi>| for pure states."""
    if psi.basis != phi.basis:
        raise ValidationError("state bases do not match")
    overlap = min(abs(np.vdot(phi.amplitudes, psi.amplitudes)), 1.0)
    return float(np.arccos(overlap))


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """Relative entropy sum_k p_k log2(p_k / q_k) in bits."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValidationError("distributions must have equal length")
    support = p > 0
    if np.any(q[support] <= 0):
        raise ValidationError("q vanishes on the support of p")
    return float((p[support] * np.log2(p[support] / q[support])).sum())


def trajectory_length(speeds: np.ndarray, dt: float) -> float:
    """Path length: trapezoidal integral of a sampled speed series."""
    speeds = np.asarray(speeds, dtype=float)
    if speeds.size < 2:
        raise ValidationError("need at least two speed samples")
    return float(np.trapezoid(speeds, dx=dt))


def variance_decomposition(
    psi: StateVector, cell_terms: list[np.ndarray]
) -> tuple[float, float]:
    """Split the battery variance into single-cell and cross-cell parts.

    Returns (local, correlation) with local = sum_i (<h_i^2> - <h_i>^2) and
    correlation = sum_{i != j} (<h_i h_j> - <h_i><h_j>); the two add up to
    the full variance of sum_i h_i.
    """
    amp = psi.amplitudes
    driven = np.stack([h @ amp for h in cell_terms])  # (N, dim)
    means = (driven @ amp.conj()).real
    cross = (driven.conj() @ driven.T).real  # <h_i h_j>, real for commuting h_i
    local = float(np.diag(cross).sum() - (means**2).sum())
    off = cross - np.outer(means, means)
    correlation = float(off.sum() - np.diag(off).sum())
    return local, correlation


def cos_theta_power(power_value: float, var_battery: float, fisher: float) -> float:
    """Saturation ratio P / sqrt(var(H_B) * I_E); NaN when the denominator
    falls below the guard floor (emitted as a missing value downstream)."""
    denom_sq = var_battery * fisher
    if denom_sq < COS_THETA_DENOM_FLOOR**2:
        return float("nan")
    return float(power_value / np.sqrt(denom_sq))


def time_average(series: np.ndarray, dt: float) -> float:
    """Trapezoidal mean of a uniformly sampled series."""
    series = np.asarray(series, dtype=float)
    if series.size < 2:
        raise ValidationError("need at least two samples for a time average")
    span = dt * (series.size - 1)
    return float(np.trapezoid(series, dx=dt) / span)


def reduced_battery_state(psi: StateVector) -> DensityMatrix:
    """Battery (collective-spin) reduced state of a spin-Fock pure state."""
    if psi.basis.kind != "spin_fock":
        raise ValidationError(f"expected spin_fock basis, got {psi.basis.kind}")
    n_spin = psi.basis.n_cells + 1
    n_fock = psi.basis.n_max + 1
    block = psi.amplitudes.reshape(n_spin, n_fock)
    return DensityMatrix(block @ block.conj().T, Basis("collective_spin", psi.basis.n_cells))


def battery_entanglement_entropy(psi: StateVector) -> float:
    """Entropy of the battery reduced state, normalized to [0, 1] by log2(N+1)."""
    reduced = reduced_battery_state(psi)
    return von_neumann_entropy(reduced) / np.log2(psi.basis.n_cells + 1)
