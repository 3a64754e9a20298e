"""Command line entry point.

Exit codes: 0 success, 1 validation failure, 2 configuration or usage error.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

from . import initial, kinetic, pdmp, scheme
from .errors import ConfigurationError, DegenerateInputError, DomainError, HorizonError
from .harness import (
    KineticCache,
    aggregate_pdmp,
    load_config,
    run_pdmp_sweep,
    run_scheme_sweep,
    write_results,
)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twospecies", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", type=Path, required=config_required, help="JSON experiment config")
        sp.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
        sp.add_argument("--seed", type=int, help="override master_seed")
        sp.add_argument("--workers", type=int, default=1, help="worker processes for replicas")

    sp = sub.add_parser("solve", help="dump the kinetic solution a(t), L(t), N2(t)")
    common(sp)
    sp.add_argument("--at", type=float, action="append", default=[], help="print values at this time")

    sp = sub.add_parser("scheme", help="dump discretization snapshots")
    common(sp)
    sp.add_argument("--delta", type=float, help="step (default: first entry of delta_list)")

    sp = sub.add_parser("simulate", help="single particle-system run with event log")
    common(sp, config_required=False)
    sp.add_argument("--ic", default=None, choices=[n for n in initial.IC_NAMES if n != "custom_file"])
    sp.add_argument("--grid-step", type=float, default=None)
    sp.add_argument("--n", type=int, default=None, help="particle count")
    sp.add_argument("--t-end", type=float, default=None, help="stop time (default: run to the end)")

    for name in ("sweep-scheme", "sweep-pdmp"):
        common(sub.add_parser(name, help=f"{name.split('-')[1]} convergence sweep"))

    sub.add_parser("validate", help="run the invariant suite")
    return p


def _load(args):
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if changes:
        cfg = cfg.replace(**changes)
    out = args.out if args.out is not None else Path(cfg.output_dir)
    return cfg, out


def _cmd_solve(args) -> int:
    cfg, out = _load(args)
    sol = cfg.kinetic
    out.mkdir(parents=True, exist_ok=True)
    path = out / "kinetic.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "a", "L", "N2"])
        for t, a, L, n2 in zip(sol.times, sol.a.values, sol.loss.values, sol.n2):
            w.writerow([repr(float(t)), repr(float(a)), repr(float(L)), repr(float(n2))])
    print(f"blow-up time (N2 = 0): {kinetic.blowup_time(sol, 0.0):.6f}")
    print(f"horizon (N2 = {sol.n2_floor:.3g}): {sol.horizon:.6f}")
    for t in args.at:
        a = float(kinetic.f1_eval(sol, t).values[0])
        print(f"a({t:g}) = {a:.5f}  L({t:g}) = {float(sol.loss(t)):.5f}  N2({t:g}) = {sol.n2_at(t):.5f}")
    print(f"wrote {path}")
    return 0


def _cmd_scheme(args) -> int:
    cfg, out = _load(args)
    delta = args.delta if args.delta is not None else (cfg.delta_list[0] if cfg.delta_list else None)
    if delta is None:
        raise ConfigurationError("delta_list: empty and no --delta given")
    f1, f2 = cfg.densities
    states = scheme.scheme_run(scheme.scheme_init(f1, f2, delta), cfg.t_end)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"scheme_delta_{delta!r}.csv"
    path.write_text(scheme.snapshots_csv(states))
    last = states[-1]
    print(f"{len(states)} snapshots, t_k up to {last.time:g}; N1 = {last.n1:.6f}, N2 = {last.n2:.6f}")
    print(f"wrote {path}")
    return 0


def _cmd_simulate(args) -> int:
    if args.config is not None:
        cfg, out = _load(args)
        f1, f2 = cfg.densities
        n = args.n if args.n is not None else (cfg.n_list[0] if cfg.n_list else None)
        seed = pdmp.replica_seed(cfg.master_seed, 0) if args.seed is None else args.seed
        t_end = args.t_end if args.t_end is not None else cfg.t_end
    else:
        ic = args.ic or "two_particle"
        step = args.grid_step or (0.1 if ic == "two_particle" else 1e-3)
        f1, f2 = initial.build(ic, step)
        n, seed, out = args.n, args.seed if args.seed is not None else 0, args.out
        t_end = args.t_end if args.t_end is not None else math.inf
    if n is None:
        raise ConfigurationError("particle count: pass --n or set n_list")
    state = pdmp.pdmp_init(f1, f2, n, seed)
    state.advance_to(t_end)
    log = state.event_log_csv()
    sys.stdout.write(log)
    status = "cemetery" if state.cemetery else "running"
    print(f"# {state.removals} removals, N1={state.n1}, N2={state.n2}, state={status}, t={state.time!r}")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"events_n{n}_seed{seed}.csv").write_text(log)
    return 0


def _cmd_sweep(args, kind: str) -> int:
    cfg, out = _load(args)
    cache = KineticCache(cfg.kinetic)
    if kind == "scheme":
        if not cfg.delta_list:
            raise ConfigurationError("delta_list: empty")
        records = run_scheme_sweep(cfg, cache)
        summary = None
        for r in records:
            print(f"delta={r.param_value:g}  sup d = {r.sup_distance:.6e}")
    else:
        if not cfg.n_list:
            raise ConfigurationError("n_list: empty")
        records = run_pdmp_sweep(cfg, workers=args.workers, cache=cache)
        summary = aggregate_pdmp(records, cfg.eps_list)
        for row in summary:
            print("  ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
    for p in write_results(records, cfg, out, summary=summary):
        print(f"wrote {p}")
    return 0


def _cmd_validate(args) -> int:
    from .validate import run_all

    results = run_all(verbose=True)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "scheme": _cmd_scheme,
        "simulate": _cmd_simulate,
        "sweep-scheme": lambda a: _cmd_sweep(a, "scheme"),
        "sweep-pdmp": lambda a: _cmd_sweep(a, "pdmp"),
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except (ConfigurationError, DegenerateInputError, DomainError, HorizonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
