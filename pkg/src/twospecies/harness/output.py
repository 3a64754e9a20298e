"""CSV and manifest writers. Floats are written with ``repr`` so equal inputs
give byte-identical files."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .config import ExperimentConfig
from .sweeps import ResultRecord

__all__ = ["RECORD_COLUMNS", "SNAPSHOT_COLUMNS", "write_results", "read_records"]

RECORD_COLUMNS = (
    "experiment", "param_kind", "param_value", "replica", "seed",
    "sup_distance", "cemetery", "runtime_ms",
)
SNAPSHOT_COLUMNS = ("experiment", "param_value", "replica", "t", "d1", "d2", "d")


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"failed to write {path}: {exc}") from exc


def write_results(
    records: list[ResultRecord],
    cfg: ExperimentConfig,
    out_dir=None,
    experiment: str | None = None,
    summary: list[dict] | None = None,
) -> list[Path]:
    """Write ``<experiment>.csv``, ``<experiment>_snapshots.csv``, optional
    ``<experiment>_summary.csv`` and ``manifest.json`` into ``out_dir``.

    ``runtime_ms`` is left blank unless ``cfg.record_timing`` is set.
    """
    from .. import __version__

    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    if experiment is None:
        experiment = records[0].experiment if records else cfg.name

    main_rows, snap_rows = [], []
    for r in records:
        runtime = round(r.runtime_ms, 3) if cfg.record_timing else ""
        main_rows.append((r.experiment, r.param_kind, r.param_value, r.replica, r.seed,
                          r.sup_distance, r.cemetery, runtime))
        for t, a, b in zip(r.times, r.d1, r.d2):
            snap_rows.append((r.experiment, r.param_value, r.replica, t, a, b, a + b))

    written = [out / f"{experiment}.csv", out / f"{experiment}_snapshots.csv"]
    _write_csv(written[0], RECORD_COLUMNS, main_rows)
    _write_csv(written[1], SNAPSHOT_COLUMNS, snap_rows)
    if summary:
        keys = list(summary[0])
        written.append(out / f"{experiment}_summary.csv")
        _write_csv(written[-1], keys, ([row[k] for k in keys] for row in summary))

    manifest_path = out / "manifest.json"
    manifest = {}
    if manifest_path.exists():
        try:
            manifest = json.loads(manifest_path.read_text())
        except json.JSONDecodeError:
            manifest = {}
    experiments = manifest.get("experiments", {})
    experiments[experiment] = sorted(p.name for p in written)
    manifest = {
        "config_hash": cfg.config_hash,
        "code_version": __version__,
        "master_seed": cfg.master_seed,
        "config": cfg.to_dict(),
        "experiments": experiments,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return written + [manifest_path]


def read_records(path) -> list[dict]:
    """Rows of a results CSV as dicts with numeric fields converted."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["param_value"] = float(row["param_value"])
        row["replica"] = int(row["replica"])
        row["sup_distance"] = float(row["sup_distance"])
        row["cemetery"] = bool(int(row["cemetery"]))
    return rows
