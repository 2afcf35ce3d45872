"""CSV / JSON serialization of reports and time series.

JSON is written with sorted keys and no timestamps so identical runs give
identical bytes. Non-finite floats become ``null``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .evolution import CSV_COLUMNS, TimeSeries
from .spectral import Field, Grid


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if isinstance(obj, Field):
            return field_snapshot(obj)
        if isinstance(obj, Grid):
            return grid_metadata(obj)
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(obj, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def grid_metadata(grid: Grid) -> dict:
    return {"L": grid.L, "n": grid.n, "dx": grid.dx, "k_max": grid.k_max}


def field_snapshot(f: Field) -> dict:
    return {
        "grid": grid_metadata(f.grid),
        "real": f.values.real.tolist(),
        "imag": f.values.imag.tolist(),
    }


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_timeseries_csv(series: TimeSeries, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in series.rows:
            writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return path


def read_timeseries_csv(path: Path) -> dict[str, np.ndarray]:
    with Path(path).open() as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        header = reader.fieldnames
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    return {c: np.array([float(r[c]) for r in rows]) for c in CSV_COLUMNS}


def timeseries_sidecar(series: TimeSeries) -> dict:
    return {
        "config": series.config.echo(),
        "metadata": series.metadata,
        "drift": series.drift(),
        "final_snapshot": field_snapshot(series.final),
    }


def write_timeseries(series: TimeSeries, directory: Path, stem: str = "timeseries") -> list[Path]:
    directory = Path(directory)
    return [
        write_timeseries_csv(series, directory / f"{stem}.csv"),
        write_json(timeseries_sidecar(series), directory / f"{stem}.json"),
    ]


def manifest(command: str, files: list[str], grid: Grid | None = None, seed: int | None = None, extra: dict | None = None) -> dict:
    out = {
        "tool": "dnls-lab",
        "version": __version__,
        "command": command,
        "files": sorted(files),
    }
    if grid is not None:
        out["grid"] = grid_metadata(grid)
    if seed is not None:
        out["seed"] = seed
    if extra:
        out.update(extra)
    return out
