"""Event-driven simulation of the n-particle two-species process.

Species-1 particles drift to the origin at unit speed. Drift is never
applied to stored positions: each species-1 particle is kept in a min-heap
under the key ``position + time_of_insertion``, so its position at time
``t`` is ``key - t`` and the next removal happens at time ``heap[0]``.
Species 2 is an unordered list with swap-with-last deletion.
"""
from __future__ import annotations

import bisect
import csv
import heapq
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .measures import EmpiricalMeasure, GridDensity, quantile

__all__ = [
    "ParticleState",
    "Snapshot",
    "pdmp_init",
    "next_event",
    "apply_event",
    "pdmp_run",
    "loss_count",
    "replica_seed",
]


def replica_seed(master_seed: int, replica: int) -> int:
    """Independent 64-bit seed for replica ``replica`` of an experiment."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(replica,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Snapshot:
    t: float
    mu1: EmpiricalMeasure
    mu2: EmpiricalMeasure
    cemetery: bool

    def pair(self) -> tuple[EmpiricalMeasure, EmpiricalMeasure]:
        return self.mu1, self.mu2


class ParticleState:
    """Mutable process state; confine an instance to one thread at a time."""

    def __init__(self, s1_positions, s2_positions, n: int, seed=None):
        s1 = [float(x) for x in s1_positions]
        s2 = [float(x) for x in s2_positions]
        if n < 1 or len(s1) + len(s2) > n:
            raise ConfigurationError("particle counts exceed n")
        if any(x < 0 for x in s1) or any(x < 0 for x in s2):
            raise DomainError("particle positions must be nonnegative")
        heapq.heapify(s1)
        self.time = 0.0
        self.n_initial = int(n)
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.cemetery = False
        self._heap = s1
        self._s2 = s2
        # one entry per removal: (time, position of the mutated particle or nan)
        self.events: list[tuple[float, float]] = []
        self._removal_times: list[float] = []

    @property
    def n1(self) -> int:
        return len(self._heap)

    @property
    def n2(self) -> int:
        return len(self._s2)

    @property
    def removals(self) -> int:
        return len(self._removal_times)

    @property
    def mutation_log(self) -> list[tuple[float, float]]:
        return [(t, x) for t, x in self.events if not math.isnan(x)]

    def s1_positions(self, t: float | None = None) -> np.ndarray:
        t = self.time if t is None else t
        return np.fromiter(self._heap, dtype=float, count=len(self._heap)) - t

    def s2_positions(self) -> np.ndarray:
        return np.array(self._s2, dtype=float)

    def next_event_time(self) -> float:
        """Absolute time of the next removal, ``inf`` if none is possible."""
        if self.cemetery or not self._heap:
            return math.inf
        return self._heap[0]

    def apply_event(self) -> bool:
        """Process every removal due at the next event time; ``False`` if none."""
        if self.cemetery or not self._heap:
            return False
        heap, s2 = self._heap, self._s2
        t = heap[0]
        self.time = t
        integers = self.rng.integers
        while heap and heap[0] == t:
            heapq.heappop(heap)
            self._removal_times.append(t)
            if not s2:
                self.cemetery = True
                self.events.append((t, math.nan))
                continue
            j = int(integers(len(s2)))
            pos = s2[j]
            s2[j] = s2[-1]
            s2.pop()
            heapq.heappush(heap, pos + t)
            self.events.append((t, pos))
        return True

    def advance_to(self, t: float) -> None:
        """Apply every event at or before ``t`` (cadlag convention)."""
        while True:
            t_next = self.next_event_time()
            if math.isinf(t_next) or t_next > t:
                break
            self.apply_event()
        if not self.cemetery and not math.isinf(t):
            self.time = max(self.time, t)

    def snapshot(self, t: float | None = None) -> Snapshot:
        if t is None or self.cemetery:
            t_pos = self.time
        else:
            if self.next_event_time() < t:
                raise DomainError("events before the snapshot time have not been applied")
            t_pos = t
        w = 1.0 / self.n_initial
        mu1 = EmpiricalMeasure(np.maximum(self.s1_positions(t_pos), 0.0), w)
        mu2 = EmpiricalMeasure(self.s2_positions(), w)
        return Snapshot(self.time if t is None else t, mu1, mu2, self.cemetery)

    def loss_count(self, t: float) -> float:
        """Normalized number of removals up to and including ``t``."""
        return bisect.bisect_right(self._removal_times, t) / self.n_initial

    def event_log_csv(self) -> str:
        """One row per removal: event index, time, mutated position (blank at cemetery)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["event", "time", "position"])
        for i, (t, x) in enumerate(self.events):
            w.writerow([i, repr(t), "" if math.isnan(x) else repr(x)])
        return buf.getvalue()


def pdmp_init(f1bar: GridDensity, f2bar: GridDensity, n: int, seed=None) -> ParticleState:
    """Place ``n`` particles deterministically at quantiles of the initial data.

    Species 1 gets ``floor(n N1(0))`` particles at mass levels ``i/n``;
    species 2 gets the rest at levels ``1/n, 2/n, ...`` of its own cumulative.
    """
    if n < 2:
        raise ConfigurationError("need at least two particles")
    n1_mass, n2_mass = f1bar.total_mass, f2bar.total_mass
    if n2_mass <= 0:
        raise ConfigurationError("species 2 must have positive initial mass")
    k1 = int(math.floor(n * n1_mass + 1e-9))
    k2 = n - k1
    if k2 < 1:
        raise ConfigurationError(f"n={n} leaves no species-2 particle")
    s1 = quantile(f1bar, np.arange(1, k1 + 1) / n) if k1 else np.empty(0)
    s2 = quantile(f2bar, np.minimum(np.arange(1, k2 + 1) / n, n2_mass))
    return ParticleState(np.atleast_1d(s1), np.atleast_1d(s2), n, seed)


def next_event(s: ParticleState) -> float | None:
    """Time until the next removal, or ``None`` once the process has ended."""
    t = s.next_event_time()
    return None if math.isinf(t) else t - s.time


def apply_event(s: ParticleState) -> ParticleState:
    s.apply_event()
    return s


def pdmp_run(s0: ParticleState, t_end: float, snap_times) -> list[Snapshot]:
    """Run ``s0`` in place to ``t_end``, recording empirical measures at ``snap_times``."""
    snap_times = np.asarray(snap_times, dtype=float)
    if np.any(np.diff(snap_times) < 0) or (snap_times.size and snap_times[-1] > t_end):
        raise DomainError("snapshot times must be sorted and not exceed t_end")
    out = []
    for t in snap_times:
        s0.advance_to(t)
        snap = s0.snapshot(t)
        out.append(snap)
    s0.advance_to(t_end)
    return out


def loss_count(s: ParticleState, t: float) -> float:
    return s.loss_count(t)
