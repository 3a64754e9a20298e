"""Experiment configuration: JSON ingestion, defaults and eager validation."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .. import initial, kinetic
from ..errors import ConfigurationError
from ..measures import GridDensity, integer_ratio

__all__ = ["ExperimentConfig", "load_config", "config_from_dict", "REQUIRED_KEYS"]

REQUIRED_KEYS = ("ic_name", "grid_step", "t_end")

_DEFAULTS = {
    "name": "experiment",
    "custom_ic_path": None,
    "delta_list": [],
    "n_list": [],
    "replicas": 1,
    "master_seed": 0,
    "snap_count": 32,
    "eps_list": [],
    "n2_floor": None,
    "output_dir": "results",
    "kinetic_tol": 1e-10,
    "record_timing": False,
}


@dataclass(frozen=True)
class ExperimentConfig:
    ic_name: str
    grid_step: float
    t_end: float
    name: str = "experiment"
    custom_ic_path: str | None = None
    delta_list: tuple[float, ...] = ()
    n_list: tuple[int, ...] = ()
    replicas: int = 1
    master_seed: int = 0
    snap_count: int = 32
    eps_list: tuple[float, ...] = ()
    n2_floor: float | None = None
    output_dir: str = "results"
    kinetic_tol: float = 1e-10
    record_timing: bool = False
    config_hash: str = field(default="", compare=False)

    @cached_property
    def densities(self) -> tuple[GridDensity, GridDensity]:
        return initial.build(self.ic_name, self.grid_step, self.custom_ic_path)

    @cached_property
    def kinetic(self) -> kinetic.KineticSolution:
        f1, f2 = self.densities
        return kinetic.solve(f1, f2, tol=self.kinetic_tol, n2_floor=self.n2_floor)

    @property
    def support_bound(self) -> float:
        return max(f.support_bound for f in self.densities)

    def snapshot_times(self) -> np.ndarray:
        """``snap_count`` equal intervals on ``[0, t_end]`` (``snap_count + 1`` times)."""
        return self.t_end * np.arange(self.snap_count + 1) / self.snap_count

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("config_hash")
        for key in ("delta_list", "n_list", "eps_list"):
            d[key] = list(d[key])
        return d

    def replace(self, **changes) -> "ExperimentConfig":
        d = self.to_dict()
        d.update(changes)
        return config_from_dict(d)


def _hash(d: dict) -> str:
    blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def config_from_dict(raw: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Fill defaults, coerce types and check every invariant."""
    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigurationError(f"missing required config key(s): {', '.join(missing)}")
    unknown = set(raw) - set(REQUIRED_KEYS) - set(_DEFAULTS)
    if unknown:
        raise ConfigurationError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    d = {**_DEFAULTS, **raw}

    def num(key, kind=float):
        try:
            return kind(d[key])
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"{key}: expected {kind.__name__}, got {d[key]!r}") from exc

    def seq(key, kind=float):
        try:
            return tuple(kind(v) for v in d[key])
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"{key}: expected a list of {kind.__name__}") from exc

    if d["ic_name"] not in initial.IC_NAMES:
        raise ConfigurationError(f"ic_name: unknown initial condition {d['ic_name']!r}")
    path = d["custom_ic_path"]
    if path is not None and base_dir is not None and not Path(path).is_absolute():
        path = str(base_dir / path)

    cfg = ExperimentConfig(
        ic_name=d["ic_name"],
        grid_step=num("grid_step"),
        t_end=num("t_end"),
        name=str(d["name"]),
        custom_ic_path=path,
        delta_list=seq("delta_list"),
        n_list=seq("n_list", int),
        replicas=num("replicas", int),
        master_seed=num("master_seed", int),
        snap_count=num("snap_count", int),
        eps_list=seq("eps_list"),
        n2_floor=None if d["n2_floor"] is None else num("n2_floor"),
        output_dir=str(d["output_dir"]),
        kinetic_tol=num("kinetic_tol"),
        record_timing=bool(d["record_timing"]),
    )
    _validate(cfg)
    object.__setattr__(cfg, "config_hash", _hash(cfg.to_dict()))
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.grid_step <= 0:
        raise ConfigurationError("grid_step: must be positive")
    if cfg.t_end <= 0:
        raise ConfigurationError("t_end: must be positive")
    if cfg.replicas < 1:
        raise ConfigurationError("replicas: must be at least 1")
    if cfg.snap_count < 1:
        raise ConfigurationError("snap_count: must be at least 1")
    if any(n < 2 for n in cfg.n_list):
        raise ConfigurationError("n_list: every particle count must be at least 2")
    if any(e <= 0 for e in cfg.eps_list):
        raise ConfigurationError("eps_list: thresholds must be positive")
    if cfg.n2_floor is not None and cfg.n2_floor < 0:
        raise ConfigurationError("n2_floor: must be nonnegative")

    f1, f2 = cfg.densities
    if abs(f1.total_mass + f2.total_mass - 1.0) > 1e-8:
        raise ConfigurationError("initial condition: masses must sum to 1")
    if f2.total_mass <= 0:
        raise ConfigurationError("initial condition: species 2 must have positive mass")
    if cfg.n2_floor is None:
        object.__setattr__(cfg, "n2_floor", kinetic.DEFAULT_FLOOR_FRACTION * f2.total_mass)
    M = cfg.support_bound
    for delta in cfg.delta_list:
        if delta <= 0 or integer_ratio(delta, cfg.grid_step) is None:
            raise ConfigurationError(f"delta_list: {delta} is not a multiple of grid_step {cfg.grid_step}")
        if integer_ratio(M, delta) is None:
            raise ConfigurationError(f"delta_list: {delta} does not divide the support bound M={M}")

    horizon = cfg.kinetic.horizon
    if cfg.t_end >= horizon:
        raise ConfigurationError(
            f"t_end: {cfg.t_end} is not below the blow-up horizon {horizon:.6g} "
            f"(N2 reaches the floor {cfg.kinetic.n2_floor:.3g})"
        )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: top level must be a JSON object")
    return config_from_dict(raw, base_dir=path.parent)
