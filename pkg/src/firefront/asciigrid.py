"""ESRI ASCII grid rasters (``*.asc``).

Files store rows north to south; arrays in this package run south to north,
so rows are flipped on the way in and out.
"""
from __future__ import annotations

import numpy as np

from .grid import GridSpec

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "xllcenter", "yllcenter",
                "cellsize", "dx", "dy", "nodata_value")


def read_asc(path):
    """Read a raster, returning ``(values, grid, nodata)``.

    ``values`` has shape ``(nrows, ncols)`` with row 0 the southernmost.
    """
    header = {}
    with open(path) as fh:
        lines = fh.readlines()
    body_start = 0
    for lineno, line in enumerate(lines):
        parts = line.split()
        if not parts:
            continue
        key = parts[0].lower()
        if key not in _HEADER_KEYS:
            body_start = lineno
            break
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno + 1}: malformed header line {line.strip()!r}")
        header[key] = float(parts[1])
    else:
        raise ValueError(f"{path}: no raster values after header")

    try:
        ncols, nrows = int(header["ncols"]), int(header["nrows"])
    except KeyError as exc:
        raise ValueError(f"{path}: header missing {exc.args[0]}") from None
    if "cellsize" in header:
        dx = dy = header["cellsize"]
    elif "dx" in header and "dy" in header:
        dx, dy = header["dx"], header["dy"]
    else:
        raise ValueError(f"{path}: header needs cellsize (or dx and dy)")
    if "xllcorner" in header:
        x0, y0 = header["xllcorner"], header["yllcorner"]
    elif "xllcenter" in header:
        x0, y0 = header["xllcenter"] - 0.5 * dx, header["yllcenter"] - 0.5 * dy
    else:
        raise ValueError(f"{path}: header needs xllcorner/yllcorner")

    values = np.array(" ".join(lines[body_start:]).split(), dtype=float)
    if values.size != ncols * nrows:
        raise ValueError(f"{path}: expected {ncols * nrows} values, found {values.size}")
    values = values.reshape(nrows, ncols)[::-1]
    nodata = header.get("nodata_value")
    return values, GridSpec(ncols, nrows, x0, y0, dx, dy), nodata


def write_asc(path, values, grid, nodata=-9999, fmt=None):
    values = grid.check(np.asarray(values), "raster")
    if fmt is None:
        fmt = "%d" if np.issubdtype(values.dtype, np.integer) else "%.10g"
    lines = [f"ncols {grid.nx}", f"nrows {grid.ny}",
             f"xllcorner {grid.x0!r}", f"yllcorner {grid.y0!r}"]
    if grid.dx == grid.dy:
        lines.append(f"cellsize {grid.dx!r}")
    else:
        lines += [f"dx {grid.dx!r}", f"dy {grid.dy!r}"]
    lines.append(f"nodata_value {nodata}")
    for row in values[::-1]:
        lines.append(" ".join(fmt % v for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def resample_nearest(values, src, dst):
    """Nearest-neighbour resampling from grid ``src`` onto grid ``dst``.

    Target cells outside the source raster take the nearest edge cell.
    """
    i = np.floor((dst.x - src.x0) / src.dx).astype(int).clip(0, src.nx - 1)
    j = np.floor((dst.y - src.y0) / src.dy).astype(int).clip(0, src.ny - 1)
    return np.asarray(values)[np.ix_(j, i)]
