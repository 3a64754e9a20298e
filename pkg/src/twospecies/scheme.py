"""Deterministic delta-discretization of the kinetic equations.

Space and time share the step ``delta``. Each step removes the first
species-1 bin (the incremental loss), shifts species 1 one bin toward the
origin, and moves the same amount of mass from species 2 to species 1 in
proportion to the current species-2 bins.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, HorizonError
from .measures import BinMeasure, GridDensity, bin_from_density, integer_ratio

__all__ = ["SchemeState", "scheme_init", "scheme_step", "scheme_run", "snapshot_at", "snapshots_csv"]


@dataclass(frozen=True, eq=False)
class SchemeState:
    delta: float
    k: int
    mu1: BinMeasure
    mu2: BinMeasure
    n2: float
    n1: float
    loss_history: tuple[float, ...]
    mu2_initial: BinMeasure
    mu2_scale: float = 1.0

    @property
    def time(self) -> float:
        return self.k * self.delta

    @property
    def n2_initial(self) -> float:
        return self.mu2_initial.total_mass

    def pair(self) -> tuple[BinMeasure, BinMeasure]:
        return self.mu1, self.mu2


def scheme_init(f1bar: GridDensity, f2bar: GridDensity, delta: float) -> SchemeState:
    """Bin both initial densities on the ``delta`` grid."""
    total = f1bar.total_mass + f2bar.total_mass
    if abs(total - 1.0) > 1e-8:
        raise ConfigurationError(f"initial masses must sum to 1, got {total!r}")
    if f2bar.total_mass <= 0:
        raise DegenerateInputError("species 2 must have positive initial mass")
    for f in (f1bar, f2bar):
        if integer_ratio(f.support_bound, delta) is None:
            raise ConfigurationError(f"delta={delta} does not divide the support bound {f.support_bound}")
    mu1 = bin_from_density(f1bar, delta)
    mu2 = bin_from_density(f2bar, delta)
    nb = max(mu1.masses.size, mu2.masses.size)
    mu1 = BinMeasure(delta, np.pad(mu1.masses, (0, nb - mu1.masses.size)))
    mu2 = BinMeasure(delta, np.pad(mu2.masses, (0, nb - mu2.masses.size)))
    return SchemeState(delta, 0, mu1, mu2, mu2.total_mass, mu1.total_mass, (), mu2)


def scheme_step(s: SchemeState) -> SchemeState:
    """Advance one step of length ``delta``; the input state is left untouched."""
    loss = float(s.mu1.masses[0])
    n2_new = s.n2 - loss
    if n2_new <= 0:
        raise HorizonError(
            f"species 2 exhausted at step {s.k + 1} (N2={s.n2!r}, loss={loss!r})"
        )
    frac = loss / s.n2
    shifted = np.zeros_like(s.mu1.masses)
    shifted[:-1] = s.mu1.masses[1:]
    mu1 = BinMeasure(s.delta, shifted + frac * s.mu2.masses)
    scale = s.mu2_scale * (1.0 - frac)
    mu2 = BinMeasure(s.delta, s.mu2_initial.masses * scale)
    return SchemeState(
        s.delta, s.k + 1, mu1, mu2, n2_new, s.n1, s.loss_history + (loss,), s.mu2_initial, scale
    )


def scheme_run(s0: SchemeState, t_end: float) -> list[SchemeState]:
    """All states with ``t_k <= t_end``, starting from ``s0``."""
    steps = int(math.floor((t_end - s0.time) / s0.delta + 1e-9))
    states = [s0]
    for _ in range(max(steps, 0)):
        states.append(scheme_step(states[-1]))
    return states


def snapshot_at(states: list[SchemeState], t: float) -> SchemeState:
    """State in force at time ``t`` (piecewise constant on ``[t_k, t_{k+1})``)."""
    delta = states[0].delta
    k = int(math.floor(t / delta + 1e-9)) - states[0].k
    if k < 0 or k >= len(states):
        raise HorizonError(f"t={t} is outside the computed run")
    return states[k]


def snapshots_csv(states: list[SchemeState]) -> str:
    """Rows ``t_k, bin, mu1, mu2, n2`` for every state and bin."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "bin", "mu1", "mu2", "n2"])
    for s in states:
        for l, (m1, m2) in enumerate(zip(s.mu1.masses, s.mu2.masses), start=1):
            w.writerow([repr(s.time), l, repr(float(m1)), repr(float(m2)), repr(s.n2)])
    return buf.getvalue()
