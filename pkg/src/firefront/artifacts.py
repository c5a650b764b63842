"""Run directories: front rasters, contour polylines, optimizer trace, report.

Layout::

    out/
      fronts/index.csv        snapshot,time,file
      fronts/front_000.asc    +1 burnt, -1 unburnt
      contours/contour_000.csv  polyline,x,y
      trace.csv
      report.json

Floats are written with ``repr`` so files are byte-stable for fixed inputs.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .asciigrid import read_asc, write_asc
from .grid import extract_zero_contour
from .solver import FrontSeries
from .spread import ParamVector

INDEX = "index.csv"


def _fmt(v):
    return repr(float(v))


def write_fronts(directory, series):
    """Sign rasters for every snapshot plus an index of their times."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for k, (t, burnt) in enumerate(zip(series.times, series.burnt())):
        name = f"front_{k:03d}.asc"
        write_asc(directory / name, np.where(burnt, 1, -1), series.grid, fmt="%d")
        rows.append((k, _fmt(t), name))
    with open(directory / INDEX, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("snapshot", "time", "file"))
        w.writerows(rows)
    return directory


def read_fronts(directory):
    """Read measured fronts from a fronts directory or a run directory holding one.

    Cells with a positive value are burnt, so both sign rasters and 0/1
    masks are accepted.
    """
    directory = Path(directory)
    if not (directory / INDEX).exists() and (directory / "fronts" / INDEX).exists():
        directory = directory / "fronts"
    index = directory / INDEX
    if not index.exists():
        raise ValueError(f"{directory}: no {INDEX} listing the snapshot rasters")
    with open(index, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"time", "file"} <= set(rows[0]):
        raise ValueError(f"{index}: expected columns time,file")
    times, masks, grid = [], [], None
    for lineno, row in enumerate(rows, start=2):
        try:
            t = float(row["time"])
        except ValueError:
            raise ValueError(f"{index}:{lineno}: bad time {row['time']!r}") from None
        values, g, _ = read_asc(directory / row["file"])
        if grid is not None and g != grid:
            raise ValueError(f"{index}:{lineno}: {row['file']} is on a different grid")
        grid = g
        times.append(t)
        masks.append(values > 0)
    order = np.argsort(times)
    return FrontSeries.from_masks(grid, np.asarray(times)[order], np.asarray(masks)[order])


def write_contours(directory, series):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for k, phi in enumerate(series.fields):
        with open(directory / f"contour_{k:03d}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("polyline", "x", "y"))
            for pid, line in enumerate(extract_zero_contour(phi, series.grid)):
                w.writerows((pid, _fmt(x), _fmt(y)) for x, y in line.points)
    return directory


def write_trace(path, trace):
    """One row per accepted iterate: iteration, nfev, J, mesh, then the parameters."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("iteration", "nfev", "J", "mesh", *ParamVector.names()))
        for r in trace:
            J = "inf" if math.isinf(r.fun) else _fmt(r.fun)
            w.writerow((r.iteration, r.nfev, J, _fmt(r.mesh), *map(_fmt, r.x)))
    return Path(path)


def read_trace(path):
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def dumps_report(report):
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(path, report):
    Path(path).write_text(dumps_report(report))
    return Path(path)


def read_report(path):
    return json.loads(Path(path).read_text())


def write_run(out_dir, series=None, report=None, trace=None):
    """Write whichever parts of a run are given into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if series is not None:
        write_fronts(out / "fronts", series)
        write_contours(out / "contours", series)
    if trace is not None:
        write_trace(out / "trace.csv", trace)
    if report is not None:
        write_report(out / "report.json", report)
    return out
