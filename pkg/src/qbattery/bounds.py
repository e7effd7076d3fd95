"""Inequalities constraining charging power and energy variance.

The central chain, checked at every trajectory step, is

    P(t)^2 <= var(H_B) * I_E <= (producibility cap) * I_E

together with the Heisenberg comparison P^2 <= 4 var(H_B) var(H_C) and the
dephasing relation I_E <= 4 var(H_C).  Inequality checks use relative
tolerance 1e-8 against the right-hand side with an absolute floor of 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

RELATIVE_TOL = 1e-8
ABSOLUTE_FLOOR = 1e-12
WITNESS_SLACK = 1e-9
WITNESS_PHYSICAL_SLACK = 1e-6


@dataclass(frozen=True)
class BoundReport:
    """One inequality instance: lhs <= rhs up to tolerance."""

    t: float
    lhs: float
    rhs: float
    satisfied: bool
    label: str = ""

    @property
    def ratio(self) -> float:
        if self.rhs < ABSOLUTE_FLOOR:
            return float("nan")
        return self.lhs / self.rhs


def check_inequality(t: float, lhs: float, rhs: float, label: str = "") -> BoundReport:
    ok = lhs <= rhs * (1 + RELATIVE_TOL) + ABSOLUTE_FLOOR
    return BoundReport(t=t, lhs=lhs, rhs=rhs, satisfied=bool(ok), label=label)


def moment_rate_bound(
    t: float,
    level_energies: np.ndarray,
    p: np.ndarray,
    p_dot: np.ndarray,
    m: int,
    population_floor: float = 0.0,
) -> BoundReport:
    """Rate bound for the m-th moment of a levelled observable.

    lhs = (d<O^m>/dt)^2 = (sum_k O_k^m pdot_k)^2, rhs = var(O^m) * I_O with
    var(O^m) = <O^2m> - <O^m>^2 and I_O = sum_k pdot_k^2 / p_k, all evaluated
    on the same level structure.  The Fisher factor keeps every occupied
    level (strict p > floor, default all); truncating it weakens the rhs and
    can break saturated checks.
    """
    if m < 1:
        raise ValidationError("moment order m must be >= 1")
    powers = level_energies**m
    rate = float(powers @ p_dot)
    var_m = float(p @ powers**2 - (p @ powers) ** 2)
    mask = p > population_floor
    fisher = float((p_dot[mask] ** 2 / p[mask]).sum())
    return check_inequality(t, rate**2, var_m * fisher, label=f"moment_rate_m{m}")


def fisher_power_bound(t: float, power_value: float, var_battery: float, fisher: float) -> BoundReport:
    """P^2 <= var(H_B) * I_E."""
    return check_inequality(t, power_value**2, var_battery * fisher, label="fisher_power")


def heisenberg_power_bound(t: float, power_value: float, var_battery: float, var_charger: float) -> BoundReport:
    """P^2 <= 4 var(H_B) var(H_C), from the uncertainty relation."""
    return check_inequality(
        t, power_value**2, 4.0 * var_battery * var_charger, label="heisenberg_power"
    )


def producibility_variance_cap(n_cells: int, k: int) -> float:
    """Largest battery variance a k-producible N-qubit state can reach.

    Equals (r k^2 + (N - r k)^2) / 4 with r = floor(N/k); saturated only by
    products of GHZ blocks of size k (plus one remainder block).
    """
    if not 1 <= k <= n_cells:
        raise ValidationError(f"block size k = {k} outside 1..{n_cells}")
    r = n_cells // k
    return (r * k**2 + (n_cells - r * k) ** 2) / 4.0


def witness_entangled_block_size(var_battery: float, n_cells: int) -> int:
    """Smallest block size k whose producibility cap admits the given variance.

    A state whose variance exceeds the cap for k-1 must contain a k-qubit
    entangled block, so the returned k is a certified lower bound on the
    entanglement block size.
    """
    if var_battery < 0:
        raise ValidationError("variance must be nonnegative")
    top = n_cells**2 / 4.0
    if var_battery > top * (1 + WITNESS_PHYSICAL_SLACK):
        raise ValidationError(
            f"variance {var_battery!r} exceeds the N-qubit maximum {top!r}"
        )
    for k in range(1, n_cells + 1):
        if var_battery <= producibility_variance_cap(n_cells, k) * (1 + WITNESS_SLACK):
            return k
    return n_cells


def entanglement_power_bound(n_cells: int, k: int, fisher: float) -> float:
    """Cap on P^2 for a state with at most k-qubit entanglement.

    Returns producibility cap times I_E; when k divides N this is
    (k N / 4) * I_E.
    """
    return producibility_variance_cap(n_cells, k) * fisher


def entanglement_power_report(
    t: float, power_value: float, n_cells: int, k: int, fisher: float
) -> BoundReport:
    return check_inequality(
        t, power_value**2, entanglement_power_bound(n_cells, k, fisher), label="entanglement_power"
    )


def dephasing_fisher_report(t: float, fisher_energy: float, var_charger: float) -> BoundReport:
    """I_E <= 4 var(H_C): energy-space speed never exceeds state-space speed."""
    return check_inequality(t, fisher_energy, 4.0 * var_charger, label="dephasing_fisher")
