"""Initial density pairs used by the tests, demos and the harness."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .measures import GridDensity, integer_ratio

__all__ = ["uniform_halves", "tent", "two_particle", "from_csv", "build", "IC_NAMES"]

IC_NAMES = ("uniform_halves", "tent", "two_particle", "custom_file")


def _nodes(step: float, support_bound: float) -> np.ndarray:
    n = integer_ratio(support_bound, step)
    if n is None:
        raise ConfigurationError(f"support bound {support_bound} is not a multiple of step {step}")
    return np.arange(n + 1) * support_bound / n


def uniform_halves(step: float) -> tuple[GridDensity, GridDensity]:
    """``f1bar = f2bar = 1/2`` on ``[0, 1]``."""
    x = _nodes(step, 1.0)
    half = np.full(x.size, 0.5)
    return GridDensity(step, half), GridDensity(step, half)


def tent(step: float) -> tuple[GridDensity, GridDensity]:
    """``f1bar = f2bar`` = tent of slope +-2 on ``[0, 1]`` (mass 1/2 each)."""
    x = _nodes(step, 1.0)
    vals = np.clip(2.0 * np.minimum(x, 1.0 - x), 0.0, None)
    return GridDensity(step, vals), GridDensity(step, vals)


def two_particle(step: float = 0.1) -> tuple[GridDensity, GridDensity]:
    """Narrow tents whose two-particle quantile placement is (0.5 | 0.3).

    ``f1bar`` is a tent on ``[0.3, 0.5]`` and ``f2bar`` a tent on
    ``[0.1, 0.3]``, each of mass 1/2. With ``n = 2`` the single particle of
    each species sits at the right edge of its tent.
    """
    per = integer_ratio(0.1, step)
    if per is None:
        raise ConfigurationError("two_particle needs a step dividing 0.1")
    idx = np.arange(10 * per + 1)

    def bump(lo_tenth: int):
        centre = (lo_tenth + 1) * per
        return np.clip(5.0 * (1.0 - np.abs(idx - centre) / per), 0.0, None)

    return GridDensity(step, bump(3)), GridDensity(step, bump(1))


def from_csv(path: str | Path) -> tuple[GridDensity, GridDensity]:
    """Read ``x,f1,f2`` rows on a uniform grid starting at 0."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigurationError(f"cannot read initial condition file {path}: {exc}") from exc
    if len(rows) < 2 or not {"x", "f1", "f2"} <= set(rows[0]):
        raise ConfigurationError(f"{path}: expected columns x,f1,f2 and at least two rows")
    try:
        x, f1, f2 = (np.array([float(r[c]) for r in rows]) for c in ("x", "f1", "f2"))
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{path}: non-numeric entry ({exc})") from exc
    step = x[1] - x[0]
    if x[0] != 0.0 or not np.allclose(np.diff(x), step, rtol=1e-9, atol=0):
        raise ConfigurationError(f"{path}: x must be a uniform grid starting at 0")
    return GridDensity(step, f1), GridDensity(step, f2)


def build(name: str, step: float, path: str | Path | None = None) -> tuple[GridDensity, GridDensity]:
    if name == "uniform_halves":
        return uniform_halves(step)
    if name == "tent":
        return tent(step)
    if name == "two_particle":
        return two_particle(step)
    if name == "custom_file":
        if path is None:
            raise ConfigurationError("custom_file requires custom_ic_path")
        return from_csv(path)
    raise ConfigurationError(f"unknown initial condition {name!r}; choose from {IC_NAMES}")
