"""Invariant suite run by ``twospecies validate``.

Each check returns a :class:`CheckResult`; :func:`run_all` runs them in a
fixed order. The whole suite is sized to finish well under a minute.
"""
from __future__ import annotations

import functools
import operator
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import initial, kinetic, pdmp, scheme
from .measures import (
    BinMeasure,
    EmpiricalMeasure,
    GridDensity,
    ks_distance,
    modulus_of_continuity,
)

EPS = np.finfo(float).eps

# Scheme-vs-kinetic constant in sup d <= C (delta + omega(delta, 0)); fitted
# on the tent initial data (observed ~0.25) and frozen with headroom.
SCHEME_RATE_CONSTANT = 0.5


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _tent_run(delta=0.0125, t_end=0.4, step=1.25e-4):
    f1, f2 = initial.tent(step)
    return f1, f2, scheme.scheme_run(scheme.scheme_init(f1, f2, delta), t_end)


def check_scheme_n1_conservation() -> CheckResult:
    _, _, states = _tent_run()
    n1 = states[0].n1
    worst = max(abs(s.mu1.total_mass - n1) for s in states)
    step_worst = max(
        abs(b.mu1.total_mass - a.mu1.total_mass) for a, b in zip(states, states[1:])
    )
    ok = step_worst <= 10 * EPS and worst <= 10 * EPS * len(states)
    return CheckResult("scheme N1 conservation", ok,
                       f"max step change {step_worst:.2e}, max drift {worst:.2e} over {len(states)} steps")


def check_pdmp_n1_conservation(n=2000, seed=11) -> CheckResult:
    f1, f2 = initial.tent(1e-3)
    s = pdmp.pdmp_init(f1, f2, n, seed)
    n1 = s.n1
    events = bad = 0
    while not s.cemetery and s.next_event_time() <= 0.6:
        s.apply_event()
        events += 1
        bad += (s.n1 != n1) and not s.cemetery
        bad += s.n1 + s.n2 != n - s.removals
    return CheckResult("particle N1 conservation", bad == 0 and events > 0,
                       f"{events} events, {bad} violations")


def check_scheme_n2_ledger() -> CheckResult:
    _, _, states = _tent_run()
    n2_0 = states[0].n2
    exact = all(s.n2 == functools.reduce(operator.sub, s.loss_history, n2_0) for s in states)
    mass_match = max(abs(s.mu2.total_mass - s.n2) for s in states)
    ok = exact and mass_match <= 100 * EPS
    return CheckResult("scheme N2 = N2(0) - sum dL", ok,
                       f"sequential ledger exact={exact}, |mass(mu2) - N2| <= {mass_match:.2e}")


def check_species2_shape() -> CheckResult:
    f1, f2, states = _tent_run()
    base = states[0].mu2.masses
    nz = base > 0
    spread = 0.0
    for s in states:
        ratio = s.mu2.masses[nz] / base[nz]
        spread = max(spread, float((ratio.max() - ratio.min()) / ratio.mean()))

    sol = kinetic.solve(f1, f2, t_max=0.75)
    omega = modulus_of_continuity(f1, f2, states[0].delta)
    bound = SCHEME_RATE_CONSTANT * (states[0].delta + omega)
    cross = 0.0
    for s in states:
        g = kinetic.f2_eval(sol, s.time)
        scalar = np.allclose(g.values, f2.values * (sol.n2_at(s.time) / sol.n2_zero), rtol=0, atol=0)
        if not scalar:
            return CheckResult("species-2 shape preservation", False, f"kinetic f2 not a multiple of f2bar at t={s.time}")
        cross = max(cross, ks_distance(s.mu2, g))
    ok = spread <= 100 * EPS and cross <= bound
    return CheckResult("species-2 shape preservation", ok,
                       f"bin ratio spread {spread:.2e}; KS(scheme, kinetic) {cross:.3e} <= {bound:.3e}")


def _random_measure(rng: np.random.Generator):
    kind = rng.integers(3)
    if kind == 0:
        n = int(rng.integers(1, 6))
        return EmpiricalMeasure(np.round(rng.uniform(0, 1, n), 2), 1.0 / n)
    if kind == 1:
        m = rng.uniform(0, 1, int(rng.integers(1, 6)))
        return BinMeasure(1.0 / m.size, m / m.sum())
    v = rng.uniform(0, 1, int(rng.integers(2, 7)))
    g = GridDensity(1.0 / (v.size - 1), v)
    return g.scaled(1.0 / g.total_mass)


def check_ks_axioms(trials=300, seed=5) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_sym = worst_tri = worst_id = 0.0
    for _ in range(trials):
        a, b, c = (_random_measure(rng) for _ in range(3))
        ab, ba = ks_distance(a, b), ks_distance(b, a)
        worst_sym = max(worst_sym, abs(ab - ba))
        worst_id = max(worst_id, ks_distance(a, a))
        worst_tri = max(worst_tri, ab - ks_distance(a, c) - ks_distance(c, b))
    ok = worst_sym <= 1e-15 and worst_id == 0.0 and worst_tri <= 1e-12
    return CheckResult("KS metric axioms", ok,
                       f"asymmetry {worst_sym:.1e}, d(a,a) {worst_id:.1e}, triangle excess {worst_tri:.1e}")


def check_pdmp_determinism(n=5000, seed=123) -> CheckResult:
    f1, f2 = initial.tent(1e-3)
    logs = []
    for _ in range(2):
        s = pdmp.pdmp_init(f1, f2, n, seed)
        s.advance_to(0.6)
        logs.append(s.event_log_csv())
    return CheckResult("particle determinism", logs[0] == logs[1] and len(logs[0]) > 100,
                       f"{logs[0].count(chr(10)) - 1} events, identical={logs[0] == logs[1]}")


def check_parallel_serial() -> CheckResult:
    from .harness import config_from_dict, run_pdmp_sweep

    cfg = config_from_dict(dict(ic_name="tent", grid_step=2.5e-3, t_end=0.3, n_list=[200, 400],
                                replicas=3, master_seed=99, snap_count=6))
    serial = run_pdmp_sweep(cfg, workers=1)
    parallel = run_pdmp_sweep(cfg, workers=2)
    strip = lambda rs: [r.__dict__ | {"runtime_ms": 0.0} for r in rs]  # noqa: E731
    same = strip(serial) == strip(parallel)
    return CheckResult("parallel/serial record equality", same, f"{len(serial)} records compared")


def check_uniform_mutation(seeds=10_000) -> CheckResult:
    atoms = (0.2, 0.5, 0.9)
    counts = dict.fromkeys(atoms, 0)
    for seed in range(seeds):
        s = pdmp.ParticleState([0.1], atoms, 4, seed)
        s.apply_event()
        counts[s.events[0][1]] += 1
    p = 1 / 3
    sigma = np.sqrt(seeds * p * (1 - p))
    z = max(abs(c - seeds * p) / sigma for c in counts.values())
    chi2 = sum((c - seeds * p) ** 2 / (seeds * p) for c in counts.values())
    return CheckResult("uniform mutation choice", z <= 3.0,
                       f"counts {list(counts.values())}, max |z| {z:.2f}, chi2 {chi2:.2f}")


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_scheme_n1_conservation,
    check_pdmp_n1_conservation,
    check_scheme_n2_ledger,
    check_species2_shape,
    check_ks_axioms,
    check_pdmp_determinism,
    check_parallel_serial,
    check_uniform_mutation,
)


def run_all(verbose: bool = False) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        try:
            res = check()
        except Exception as exc:  # report, don't abort the suite
            res = CheckResult(check.__name__, False, f"raised {type(exc).__name__}: {exc}")
        if verbose:
            print(res.line(), flush=True)
        results.append(res)
    return results
