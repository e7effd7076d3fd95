"""JSON scenario configuration.

Configs are plain JSON with a fixed schema (documented in the README);
unknown keys are rejected with the offending path so typos fail loudly
instead of silently falling back to defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .models import CHAIN_VARIANTS, FAMILIES, ModelSpec, chain_spec
from .trajectory import DEFAULT_STEPS


@dataclass(frozen=True)
class SweepConfig:
    parameter: str  # "N" or "gamma"
    values: tuple
    quantity: str
    path: str = "auto"


@dataclass(frozen=True)
class ScenarioConfig:
    spec: ModelSpec
    lam_t_max: float | None = None
    steps: int = DEFAULT_STEPS
    output_dir: str = "out"
    series: tuple[str, ...] = ()
    seed: int = 0
    level_rel_tol: float = 1e-9
    sweep: SweepConfig | None = None

    def __post_init__(self):
        if self.steps < 2:
            raise ConfigError("time.steps must be >= 2")


@dataclass(frozen=True)
class CapacityConfig:
    spec: ModelSpec
    beta_max_abs: float = 20.0
    points_per_branch: int = 200
    entropy_targets_bits: tuple[float, ...] = ()
    output_dir: str = "out"


def _require(mapping: dict, path: str, required: dict, optional: dict) -> dict:
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(mapping) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(mapping)
    if missing:
        raise ConfigError(f"{path}: missing required keys {sorted(missing)}")
    out = dict(optional)
    out.update(mapping)
    return out


def _typed(value, types, path: str):
    if not isinstance(value, types):
        names = types.__name__ if isinstance(types, type) else "/".join(t.__name__ for t in types)
        raise ConfigError(f"{path}: expected {names}, got {type(value).__name__}")
    return value


def parse_model(raw: dict, path: str = "model") -> ModelSpec:
    raw = _require(
        raw,
        path,
        required={"family": None, "N": None},
        optional={
            "lam": 1.0,
            "q": None,
            "r": None,
            "variant": None,
            "lambdas": None,
            "gammas": None,
            "momentum_sector": "antiperiodic_grid",
            "gamma": -1.0,
            "n_max": None,
            "normalize_coupling": True,
        },
    )
    family = _typed(raw["family"], str, f"{path}.family")
    if family not in FAMILIES:
        raise ConfigError(f"{path}.family: unknown family {family!r} (expected one of {FAMILIES})")
    n = _typed(raw["N"], int, f"{path}.N")
    lam = float(_typed(raw["lam"], (int, float), f"{path}.lam"))
    try:
        if family == "jw_chain":
            if raw["variant"] is not None:
                variant = _typed(raw["variant"], str, f"{path}.variant")
                if variant not in CHAIN_VARIANTS:
                    raise ConfigError(
                        f"{path}.variant: unknown variant {variant!r} (expected one of {CHAIN_VARIANTS})"
                    )
                if raw["lambdas"] is not None or raw["gammas"] is not None:
                    raise ConfigError(f"{path}: give either variant or explicit couplings, not both")
                spec = chain_spec(variant, n, raw["momentum_sector"])
                return spec if lam == 1.0 else ModelSpec(
                    family="jw_chain", n_cells=n, lam=lam, lambdas=spec.lambdas,
                    gammas=spec.gammas, momentum_sector=spec.momentum_sector,
                )
            if raw["lambdas"] is None or raw["gammas"] is None:
                raise ConfigError(f"{path}: jw_chain needs a variant or lambdas+gammas lists")
            return ModelSpec(
                family="jw_chain",
                n_cells=n,
                lam=lam,
                lambdas=tuple(raw["lambdas"]),
                gammas=tuple(raw["gammas"]),
                momentum_sector=raw["momentum_sector"],
            )
        if family == "hybrid":
            return ModelSpec(family="hybrid", n_cells=n, lam=lam, q=raw["q"], r=raw["r"])
        if family == "lmg":
            return ModelSpec(family="lmg", n_cells=n, lam=lam, gamma=float(raw["gamma"]))
        if family == "dicke":
            return ModelSpec(
                family="dicke",
                n_cells=n,
                lam=lam,
                n_max=raw["n_max"],
                normalize_coupling=bool(raw["normalize_coupling"]),
            )
        return ModelSpec(family=family, n_cells=n, lam=lam)
    except ConfigError:
        raise
    except Exception as exc:  # model invariant violations carry the config path
        raise ConfigError(f"{path}: {exc}") from exc


def parse_scenario(raw: dict) -> ScenarioConfig:
    raw = _require(
        raw,
        "config",
        required={"model": None},
        optional={
            "time": {},
            "sweep": None,
            "outputs": {},
            "seed": 0,
            "tolerances": {},
        },
    )
    spec = parse_model(raw["model"])
    time_cfg = _require(
        raw["time"], "time", required={}, optional={"lam_t_max": None, "steps": DEFAULT_STEPS}
    )
    outputs = _require(
        raw["outputs"], "outputs", required={}, optional={"directory": "out", "series": []}
    )
    tolerances = _require(
        raw["tolerances"], "tolerances", required={}, optional={"level_rel_tol": 1e-9}
    )
    sweep = None
    if raw["sweep"] is not None:
        sweep_raw = _require(
            raw["sweep"],
            "sweep",
            required={"values": None, "quantity": None},
            optional={"parameter": "N", "path": "auto"},
        )
        values = tuple(sweep_raw["values"])
        if sweep_raw["parameter"] == "N":
            if list(values) != sorted(set(int(v) for v in values)):
                raise ConfigError("sweep.values: N list must be strictly increasing")
        elif sweep_raw["parameter"] != "gamma":
            raise ConfigError(f"sweep.parameter: expected 'N' or 'gamma', got {sweep_raw['parameter']!r}")
        sweep = SweepConfig(
            parameter=sweep_raw["parameter"],
            values=values,
            quantity=sweep_raw["quantity"],
            path=sweep_raw["path"],
        )
    lam_t_max = time_cfg["lam_t_max"]
    if lam_t_max is not None:
        lam_t_max = float(_typed(lam_t_max, (int, float), "time.lam_t_max"))
    return ScenarioConfig(
        spec=spec,
        lam_t_max=lam_t_max,
        steps=_typed(time_cfg["steps"], int, "time.steps"),
        output_dir=_typed(outputs["directory"], str, "outputs.directory"),
        series=tuple(outputs["series"]),
        seed=_typed(raw["seed"], int, "seed"),
        level_rel_tol=float(_typed(tolerances["level_rel_tol"], (int, float), "tolerances.level_rel_tol")),
        sweep=sweep,
    )


def parse_capacity(raw: dict) -> CapacityConfig:
    raw = _require(
        raw,
        "config",
        required={"model": None},
        optional={"beta": {}, "entropy_targets_bits": [], "outputs": {}},
    )
    spec = parse_model(raw["model"])
    beta = _require(
        raw["beta"], "beta", required={}, optional={"max_abs": 20.0, "points_per_branch": 200}
    )
    outputs = _require(raw["outputs"], "outputs", required={}, optional={"directory": "out"})
    return CapacityConfig(
        spec=spec,
        beta_max_abs=float(_typed(beta["max_abs"], (int, float), "beta.max_abs")),
        points_per_branch=_typed(beta["points_per_branch"], int, "beta.points_per_branch"),
        entropy_targets_bits=tuple(float(s) for s in raw["entropy_targets_bits"]),
        output_dir=_typed(outputs["directory"], str, "outputs.directory"),
    )


def load_json(path: str | Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def load_scenario(path: str | Path) -> ScenarioConfig:
    return parse_scenario(load_json(path))


def load_capacity(path: str | Path) -> CapacityConfig:
    return parse_capacity(load_json(path))
