"""Battery and charger Hamiltonians in the smallest faithful basis.

Qubit-chain conventions: local basis index 0 is the cell ground state, so the
single-cell energy is ``diag(-1/2, +1/2)`` and the battery Hamiltonian is
diagonal with eigenvalue ``w - N/2`` on a basis state with ``w`` excited
cells.  The Pauli triple below is the standard algebra written in that
ordering (sigma_z = diag(-1, +1)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import CapacityLimitError, ValidationError
from .linalg import Basis, HermitianOperator, StateVector

MAX_QUBITS_BATTERY = 14
MAX_QUBITS_CHAIN = 12

SIGMA_Z = np.diag([-1.0 + 0j, 1.0 + 0j])
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

PARADIGMATIC_FAMILIES = ("parallel", "global", "hybrid")
FAMILIES = PARADIGMATIC_FAMILIES + ("jw_chain", "lmg", "dicke")


@dataclass(frozen=True)
class ModelSpec:
    """Parameters of one charging scenario.

    lam is the charging frequency (hbar = 1); family-specific fields are the
    hybrid block layout (q blocks of r consecutive cells, q*r = N), the chain
    coupling lists lambdas/gammas indexed by range m = 1..M, the collective
    anisotropy gamma, and the Fock cutoff n_max (None = automatic).
    """

    family: str
    n_cells: int
    lam: float = 1.0
    q: int | None = None
    r: int | None = None
    lambdas: tuple[float, ...] = ()
    gammas: tuple[float, ...] = ()
    momentum_sector: str = "antiperiodic_grid"
    gamma: float = -1.0
    n_max: int | None = None
    normalize_coupling: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown model family {self.family!r}")
        if self.n_cells < 1:
            raise ValidationError("n_cells must be >= 1")
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        object.__setattr__(self, "gammas", tuple(float(x) for x in self.gammas))
        if self.family == "hybrid":
            if self.q is None or self.r is None or self.q < 1 or self.r < 1:
                raise ValidationError("hybrid model needs block counts q, r >= 1")
            if self.q * self.r != self.n_cells:
                raise ValidationError(
                    f"hybrid blocks q*r = {self.q * self.r} != N = {self.n_cells}"
                )
        if self.family == "jw_chain":
            if len(self.lambdas) != len(self.gammas):
                raise ValidationError("lambdas and gammas must have equal length")
            if not self.lambdas:
                raise ValidationError("jw_chain needs at least one coupling")
            if len(self.lambdas) > self.n_cells - 1:
                raise ValidationError("coupling range M must satisfy M <= N-1")
            if self.momentum_sector not in ("antiperiodic_grid", "periodic_grid"):
                raise ValidationError(f"unknown momentum sector {self.momentum_sector!r}")
        if self.family == "dicke" and self.n_max is not None and self.n_max < self.n_cells + 2:
            raise ValidationError(
                f"dicke n_max = {self.n_max} leaves no headroom above the initial "
                f"Fock level; need n_max >= N+2 = {self.n_cells + 2}"
            )


def default_power_law_range(n_cells: int) -> int:
    """Longest coupling range free of double counting on the periodic chain."""
    return max(n_cells // 2 - 1, 1)


def power_law_couplings(n_cells: int, kind: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """gamma_m = m^-2 couplings; "xx" sets lambda_m = gamma_m, "xy" sets lambda_m = 0."""
    m_max = default_power_law_range(n_cells)
    gammas = tuple(float(m) ** -2 for m in range(1, m_max + 1))
    lambdas = gammas if kind == "xx" else tuple(0.0 for _ in gammas)
    return lambdas, gammas


CHAIN_VARIANTS = ("xx_nn", "xy_nn", "xx_pow", "xy_pow")


def chain_spec(variant: str, n_cells: int, momentum_sector: str = "antiperiodic_grid") -> ModelSpec:
    """Named chain coupling choices: nearest-neighbor (gamma_1 = 1) or
    power law (gamma_m = m^-2), each with lambda_m = gamma_m ("xx") or 0 ("xy")."""
    if variant not in CHAIN_VARIANTS:
        raise ValidationError(f"unknown chain variant {variant!r}")
    kind, law = variant.split("_")
    if law == "nn":
        gammas = (1.0,)
        lambdas = (1.0,) if kind == "xx" else (0.0,)
    else:
        lambdas, gammas = power_law_couplings(n_cells, kind)
    return ModelSpec(
        family="jw_chain",
        n_cells=n_cells,
        lam=1.0,
        lambdas=lambdas,
        gammas=gammas,
        momentum_sector=momentum_sector,
    )


def _site_operator(n_cells: int, factors: dict[int, np.ndarray]) -> np.ndarray:
    ops = [factors.get(site, IDENTITY_2) for site in range(n_cells)]
    return reduce(np.kron, ops)


def build_battery(n_cells: int) -> HermitianOperator:
    """Sum of single-cell energies, diagonal with spectrum {w - N/2}."""
    if not 1 <= n_cells <= MAX_QUBITS_BATTERY:
        raise CapacityLimitError(
            f"qubit-chain battery capped at N = {MAX_QUBITS_BATTERY} "
            f"(dense dim 2^N = {2**MAX_QUBITS_BATTERY}); got N = {n_cells}"
        )
    basis = Basis("qubit_chain", n_cells)
    diag = excitation_counts(n_cells) - n_cells / 2
    return HermitianOperator(np.diag(diag.astype(complex)), basis)


def excitation_counts(n_cells: int) -> np.ndarray:
    """Number of excited cells for each computational basis index."""
    idx = np.arange(2**n_cells, dtype=np.uint64)
    counts = np.zeros(2**n_cells, dtype=float)
    for bit in range(n_cells):
        counts += (idx >> np.uint64(bit)) & np.uint64(1)
    return counts


def battery_cell_terms(n_cells: int) -> list[np.ndarray]:
    """The N single-cell terms of the battery Hamiltonian as full-dim matrices."""
    return [0.5 * _site_operator(n_cells, {j: SIGMA_Z}) for j in range(n_cells)]


def build_charger_paradigmatic(spec: ModelSpec) -> HermitianOperator:
    """Parallel, global, or hybrid product-of-sigma_x charger."""
    if spec.family not in PARADIGMATIC_FAMILIES:
        raise ValidationError(f"{spec.family!r} is not a paradigmatic family")
    n = spec.n_cells
    if not 1 <= n <= MAX_QUBITS_BATTERY:
        raise CapacityLimitError(
            f"qubit-chain charger capped at N = {MAX_QUBITS_BATTERY}; got N = {n}"
        )
    basis = Basis("qubit_chain", n)
    if spec.family == "parallel":
        mat = sum(_site_operator(n, {j: SIGMA_X}) for j in range(n))
    elif spec.family == "global":
        mat = _site_operator(n, {j: SIGMA_X for j in range(n)})
    else:
        mat = sum(
            _site_operator(n, {block * spec.r + i: SIGMA_X for i in range(spec.r)})
            for block in range(spec.q)
        )
    return HermitianOperator(spec.lam * mat, basis)


def build_jw_chain(spec: ModelSpec) -> HermitianOperator:
    """Periodic chain of string-coupled cells, dense form.

    H = H_B + (1/2) sum_{j, m} [(lambda_m + gamma_m) X_j Z...Z X_{j+m}
                               + (lambda_m - gamma_m) Y_j Z...Z Y_{j+m}]
    with site indices mod N.
    """
    if spec.family != "jw_chain":
        raise ValidationError("build_jw_chain needs a jw_chain spec")
    n = spec.n_cells
    if not 2 <= n <= MAX_QUBITS_CHAIN:
        raise CapacityLimitError(
            f"dense chain diagonalization capped at N = {MAX_QUBITS_CHAIN}; got N = {n}"
        )
    if len(spec.lambdas) >= n:
        raise ValidationError("coupling range m must stay below N")
    mat = build_battery(n).matrix.copy()
    for m, (lam_m, gam_m) in enumerate(zip(spec.lambdas, spec.gammas), start=1):
        if lam_m == 0.0 and gam_m == 0.0:
            continue
        for j in range(n):
            string = {(j + step) % n: SIGMA_Z for step in range(1, m)}
            xx = {**string, j: SIGMA_X, (j + m) % n: SIGMA_X}
            yy = {**string, j: SIGMA_Y, (j + m) % n: SIGMA_Y}
            mat = mat + 0.5 * (lam_m + gam_m) * _site_operator(n, xx)
            mat = mat + 0.5 * (lam_m - gam_m) * _site_operator(n, yy)
    return HermitianOperator(mat, Basis("qubit_chain", n))


def cyclic_shift(n_cells: int) -> np.ndarray:
    """Permutation matrix of the one-site translation j -> j+1 (mod N)."""
    dim = 2**n_cells
    perm = np.zeros((dim, dim))
    for idx in range(dim):
        bits = [(idx >> (n_cells - 1 - s)) & 1 for s in range(n_cells)]
        shifted = [bits[-1]] + bits[:-1]
        new = sum(b << (n_cells - 1 - s) for s, b in enumerate(shifted))
        perm[new, idx] = 1.0
    return perm


def collective_spin_operators(n_cells: int) -> dict[str, np.ndarray]:
    """J_z, J_+, J_- in the maximal-spin sector basis |j, m>, m = -j..j."""
    j = n_cells / 2
    m = np.arange(-j, j + 1)
    jz = np.diag(m.astype(complex))
    jp = np.zeros((n_cells + 1, n_cells + 1), dtype=complex)
    raising = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jp[np.arange(1, n_cells + 1), np.arange(n_cells)] = raising
    return {"jz": jz, "jp": jp, "jm": jp.conj().T}


def build_lmg(spec: ModelSpec) -> tuple[HermitianOperator, HermitianOperator]:
    """Infinite-range collective charger and its battery observable J_z.

    H = (lam / 2N) [(1+gamma)(J+J- + J-J+ - N) + (1-gamma)(J+^2 + J-^2)] + J_z
    in the (N+1)-dimensional maximal-spin sector (the initial state lives
    there and total spin is conserved).
    """
    if spec.family != "lmg":
        raise ValidationError("build_lmg needs an lmg spec")
    n = spec.n_cells
    ops = collective_spin_operators(n)
    jz, jp, jm = ops["jz"], ops["jp"], ops["jm"]
    eye = np.eye(n + 1)
    mixing = jp @ jm + jm @ jp - n * eye
    pairing = jp @ jp + jm @ jm
    mat = spec.lam / (2 * n) * ((1 + spec.gamma) * mixing + (1 - spec.gamma) * pairing) + jz
    basis = Basis("collective_spin", n)
    return HermitianOperator(mat, basis), HermitianOperator(jz, basis)


def fock_annihilation(n_max: int) -> np.ndarray:
    a = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    n = np.arange(1, n_max + 1)
    a[n - 1, n] = np.sqrt(n)
    return a


def build_dicke(spec: ModelSpec, n_max: int | None = None) -> tuple[HermitianOperator, HermitianOperator]:
    """Collective spin coupled to one truncated cavity mode, and J_z x I.

    H = J_z + a^dag a + (2 lam / sqrt(N)) J_x (a^dag + a); with
    normalize_coupling False the 1/sqrt(N) factor is dropped.  The photon
    space is truncated at n_max (a^dag |n_max> = 0).
    """
    if spec.family != "dicke":
        raise ValidationError("build_dicke needs a dicke spec")
    n = spec.n_cells
    n_max = n_max if n_max is not None else spec.n_max
    if n_max is None:
        n_max = 2 * n + 8
    if n_max < n + 2:
        raise ValidationError(
            f"dicke n_max = {n_max} leaves no headroom above the initial "
            f"Fock level; need n_max >= N+2 = {n + 2}"
        )
    ops = collective_spin_operators(n)
    jx = (ops["jp"] + ops["jm"]) / 2
    a = fock_annihilation(n_max)
    number = a.conj().T @ a
    eye_spin = np.eye(n + 1)
    eye_fock = np.eye(n_max + 1)
    coupling = 2 * spec.lam / np.sqrt(n) if spec.normalize_coupling else 2 * spec.lam
    mat = (
        np.kron(ops["jz"], eye_fock)
        + np.kron(eye_spin, number)
        + coupling * np.kron(jx, a + a.conj().T)
    )
    basis = Basis("spin_fock", n, n_max)
    return HermitianOperator(mat, basis), HermitianOperator(np.kron(ops["jz"], eye_fock), basis)


def build_battery_for(spec: ModelSpec, n_max: int | None = None) -> HermitianOperator:
    """The battery observable of a model family in its own basis."""
    if spec.family in PARADIGMATIC_FAMILIES or spec.family == "jw_chain":
        return build_battery(spec.n_cells)
    if spec.family == "lmg":
        return build_lmg(spec)[1]
    return build_dicke(spec, n_max)[1]


def build_charger_for(spec: ModelSpec, n_max: int | None = None) -> HermitianOperator:
    """The charging Hamiltonian of a model family in its own basis."""
    if spec.family in PARADIGMATIC_FAMILIES:
        return build_charger_paradigmatic(spec)
    if spec.family == "jw_chain":
        return build_jw_chain(spec)
    if spec.family == "lmg":
        return build_lmg(spec)[0]
    return build_dicke(spec, n_max)[0]


def initial_state(spec: ModelSpec, n_max: int | None = None) -> StateVector:
    """Battery ground state; for the cavity model, spins down with N photons."""
    n = spec.n_cells
    if spec.family in PARADIGMATIC_FAMILIES or spec.family == "jw_chain":
        basis = Basis("qubit_chain", n)
        index = 0
    elif spec.family == "lmg":
        basis = Basis("collective_spin", n)
        index = 0
    else:
        n_max = n_max if n_max is not None else (spec.n_max if spec.n_max is not None else 2 * n + 8)
        basis = Basis("spin_fock", n, n_max)
        index = n  # spin index 0 (m = -j), photon number N
    amp = np.zeros(basis.dim, dtype=complex)
    amp[index] = 1.0
    return StateVector(amp, basis)


def ghz_state(n_cells: int, blocks: list[int] | None = None) -> StateVector:
    """Product of GHZ blocks covering the chain; default one N-cell block."""
    blocks = blocks or [n_cells]
    if sum(blocks) != n_cells:
        raise ValidationError(f"block sizes {blocks} do not cover N = {n_cells}")
    amp = np.array([1.0], dtype=complex)
    for size in blocks:
        block = np.zeros(2**size, dtype=complex)
        block[0] = block[-1] = 1 / np.sqrt(2)
        amp = np.kron(amp, block)
    return StateVector(amp, Basis("qubit_chain", n_cells))
