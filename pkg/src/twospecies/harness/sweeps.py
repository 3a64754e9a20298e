"""Convergence sweeps: scheme vs. kinetic solution over delta, particles vs.
kinetic solution over n and replicas."""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import pdmp, scheme
from ..kinetic import KineticSolution
from ..measures import GridDensity, ks_distance
from .config import ExperimentConfig

__all__ = [
    "ResultRecord",
    "KineticCache",
    "run_scheme_sweep",
    "run_pdmp_sweep",
    "aggregate_pdmp",
    "loglog_slope",
]


@dataclass(frozen=True)
class ResultRecord:
    experiment: str
    param_kind: str
    param_value: float
    replica: int
    seed: int
    sup_distance: float
    times: tuple[float, ...]
    d1: tuple[float, ...]
    d2: tuple[float, ...]
    runtime_ms: float
    cemetery: bool

    @property
    def distances(self) -> tuple[float, ...]:
        return tuple(a + b for a, b in zip(self.d1, self.d2))


class KineticCache:
    """Memoized ``(f1(., t), f2(., t))`` lookups keyed by time."""

    def __init__(self, sol: KineticSolution):
        self.sol = sol
        self._pairs: dict[float, tuple[GridDensity, GridDensity]] = {}

    def pair(self, t: float) -> tuple[GridDensity, GridDensity]:
        key = float(t)
        if key not in self._pairs:
            self._pairs[key] = self.sol.pair_at(key)
        return self._pairs[key]


def _record(experiment, kind, value, replica, seed, evals, runtime, cemetery) -> ResultRecord:
    times = tuple(float(t) for t, _, _ in evals)
    d1 = tuple(float(a) for _, a, _ in evals)
    d2 = tuple(float(b) for _, _, b in evals)
    sup = max(a + b for a, b in zip(d1, d2))
    return ResultRecord(experiment, kind, float(value), replica, seed, sup, times, d1, d2, runtime, cemetery)


def _scheme_eval_points(states: list[scheme.SchemeState], snap_times: np.ndarray, t_end: float):
    """(time, state index) pairs covering both ends of every constant stretch."""
    delta = states[0].delta
    pts = set()
    for idx, s in enumerate(states):
        pts.add((s.time, idx))
        pts.add((min(s.time + delta, t_end), idx))
    for t in snap_times:
        pts.add((float(t), int(math.floor(t / delta + 1e-9))))
    return sorted(pts)


def run_scheme_sweep(cfg: ExperimentConfig, cache: KineticCache | None = None) -> list[ResultRecord]:
    """Sup over time of the pair distance between scheme and kinetic solution, per delta.

    Because the scheme is constant on ``[t_k, t_{k+1})`` while the kinetic
    solution keeps moving, each state is compared with the kinetic solution
    at both ends of its stretch, in addition to the regular snapshot times.
    """
    cache = cache or KineticCache(cfg.kinetic)
    f1, f2 = cfg.densities
    records = []
    for delta in cfg.delta_list:
        start = time.perf_counter()
        states = scheme.scheme_run(scheme.scheme_init(f1, f2, delta), cfg.t_end)
        evals = []
        for t, idx in _scheme_eval_points(states, cfg.snapshot_times(), cfg.t_end):
            k1, k2 = cache.pair(t)
            s = states[idx]
            evals.append((t, ks_distance(s.mu1, k1), ks_distance(s.mu2, k2)))
        runtime = 1e3 * (time.perf_counter() - start)
        records.append(_record(f"{cfg.name}-scheme", "delta", delta, 0, cfg.master_seed, evals, runtime, False))
    return records


# Per-process state for replica workers, installed once by the pool initializer.
_WORKER: dict = {}


def _init_worker(f1, f2, snap_times, pairs, experiment):
    _WORKER.update(f1=f1, f2=f2, snap_times=snap_times, pairs=pairs, experiment=experiment)


def _run_replica(task: tuple[int, int, int]) -> ResultRecord:
    n, replica, seed = task
    w = _WORKER
    start = time.perf_counter()
    state = pdmp.pdmp_init(w["f1"], w["f2"], n, seed)
    snaps = pdmp.pdmp_run(state, w["snap_times"][-1], w["snap_times"])
    evals = [
        (snap.t, ks_distance(snap.mu1, k1), ks_distance(snap.mu2, k2))
        for snap, (k1, k2) in zip(snaps, w["pairs"])
    ]
    runtime = 1e3 * (time.perf_counter() - start)
    cemetery = any(s.cemetery for s in snaps)
    return _record(w["experiment"], "n", n, replica, seed, evals, runtime, cemetery)


def run_pdmp_sweep(cfg: ExperimentConfig, workers: int = 1, cache: KineticCache | None = None) -> list[ResultRecord]:
    """Simulate every (n, replica) pair and record sup-over-snapshot distances.

    Records come back ordered by ``n_list`` then replica index regardless of
    ``workers``.
    """
    cache = cache or KineticCache(cfg.kinetic)
    snap_times = cfg.snapshot_times()
    pairs = [cache.pair(t) for t in snap_times]
    f1, f2 = cfg.densities
    seeds = [pdmp.replica_seed(cfg.master_seed, r) for r in range(cfg.replicas)]
    tasks = [(n, r, seeds[r]) for n in cfg.n_list for r in range(cfg.replicas)]
    init_args = (f1, f2, snap_times, pairs, f"{cfg.name}-pdmp")

    if workers <= 1:
        _init_worker(*init_args)
        return [_run_replica(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=init_args) as pool:
        return list(pool.map(_run_replica, tasks))


def aggregate_pdmp(records: list[ResultRecord], eps_list) -> list[dict]:
    """Per-n median, mean and tail fractions ``#{sup >= eps} / R``.

    Replicas that hit the cemetery state are counted but left out of the
    statistics.
    """
    out = []
    for n in sorted({r.param_value for r in records}):
        group = [r for r in records if r.param_value == n]
        ok = np.array([r.sup_distance for r in group if not r.cemetery])
        row = {
            "n": int(n),
            "replicas": len(group),
            "cemetery": len(group) - ok.size,
            "median": float(np.median(ok)) if ok.size else math.nan,
            "mean": float(np.mean(ok)) if ok.size else math.nan,
        }
        for eps in eps_list:
            row[f"tail_{eps!r}"] = float(np.mean(ok >= eps)) if ok.size else math.nan
        out.append(row)
    return out


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])
