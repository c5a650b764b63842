"""Scenario inputs: the numerical ``Scenario`` and its TOML file format.

A scenario file has the sections ``[grid]``, ``[elevation]``, ``[fuel]``,
``[wind]``, ``[front]``, ``[time]`` and optionally ``[truth]``, ``[bounds]``,
``[optimizer]`` and ``[solver]``. See the bundled files under
``firefront/scenarios`` for complete examples.
"""
from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from .asciigrid import read_asc, resample_nearest
from .grid import (FUEL_A, FUEL_B, GridSpec, Wind, fuel_labels,
                   signed_distance_from_circle, signed_distance_from_mask)
from .patternsearch import SearchConfig
from .solver import SolverConfig
from .spread import ParamVector

MPH = 0.44704

BUNDLED = ("nowind_flat", "wind_flat", "hill_nowind", "valley_nowind",
           "valley_estimation", "hill_estimation", "troy_template")


class ScenarioError(ValueError):
    """Invalid scenario document; carries the offending key and line."""

    def __init__(self, message, key=None, line=None, source=None):
        where = f"{source or '<scenario>'}:{line}: " if line else f"{source or '<scenario>'}: "
        super().__init__(where + (f"[{key}] " if key else "") + message)
        self.key = key
        self.line = line


@dataclass
class Scenario:
    grid: GridSpec
    elevation: np.ndarray
    fuel: np.ndarray
    wind: Wind
    phi0: np.ndarray
    t0: float
    tf: float
    times: tuple
    name: str = ""

    def __post_init__(self):
        g = self.grid
        self.elevation = np.asarray(g.check(self.elevation, "elevation"), dtype=float)
        self.fuel = fuel_labels(g, self.fuel)
        self.phi0 = np.asarray(g.check(self.phi0, "initial front"), dtype=float)
        if not (self.phi0.max() >= 0 and self.phi0.min() < 0):
            raise ValueError("initial front: phi0 must contain burnt and unburnt cells")
        if not self.t0 < self.tf:
            raise ValueError(f"need t0 < tf, got t0={self.t0}, tf={self.tf}")
        self.times = tuple(float(t) for t in self.times)
        t = np.asarray(self.times)
        if abs(t[0] - self.t0) > 1e-9 or np.any(np.diff(t) <= 0) or t[-1] > self.tf + 1e-9:
            raise ValueError("snapshot times must start at t0, increase strictly and end by tf")

    def restart(self, burnt_mask, t0, times):
        """Same terrain, fuel and wind, started from a burnt mask at ``t0``."""
        phi0 = signed_distance_from_mask(self.grid, burnt_mask)
        times = [t0] + [float(t) for t in times if t > t0 + 1e-12]
        return replace(self, phi0=phi0, t0=float(t0), tf=max(times), times=tuple(times))


def gaussian_surface(grid, center, height, width):
    """``height * exp(-|x - center|^2 / width^2)``; negative height digs a valley."""
    X, Y = grid.mesh()
    return height * np.exp(-((X - center[0]) ** 2 + (Y - center[1]) ** 2) / width ** 2)


def split_fuel(grid, point, normal):
    """Fuel B on the side of the line the normal points to, fuel A elsewhere."""
    X, Y = grid.mesh()
    side = (X - point[0]) * normal[0] + (Y - point[1]) * normal[1]
    return np.where(side > 0, FUEL_B, FUEL_A).astype(np.int8)


def sample_times(t0, tf, dt):
    k = round((tf - t0) / dt)
    if k < 1 or abs(k * dt - (tf - t0)) > 1e-9:
        raise ValueError(f"dt={dt} does not divide [{t0}, {tf}]")
    return tuple(round(t0 + i * dt, 12) for i in range(k + 1))


# --- document schema -------------------------------------------------------

_SECTIONS = {
    "grid": {"nx", "ny", "x0", "y0", "dx", "dy", "extent"},
    "elevation": {"kind", "center", "height", "width", "path"},
    "fuel": {"kind", "label", "point", "normal", "path"},
    "wind": {"ux", "uy", "speed", "bearing_deg", "units"},
    "front": {"kind", "center", "radius", "path"},
    "time": {"t0", "tf", "dt", "times"},
    "truth": {"p"},
    "bounds": {"p_min", "p_max"},
    "optimizer": {"mesh_init", "expand", "contract", "tol", "max_iter", "max_evals",
                  "budget_seconds", "seed", "x0", "parallel_poll"},
    "solver": {"cfl", "reinit_period"},
}
_REQUIRED = ("grid", "elevation", "fuel", "wind", "front", "time")
_TOP_LEVEL = {"name", "description"}


def _locate(text, section, key=None):
    """1-based line of ``key`` inside ``[section]`` (or of the header)."""
    current = None
    header_line = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"^\[([^\]]+)\]", stripped)
        if m:
            current = m.group(1).strip()
            if current == section:
                header_line = lineno
            continue
        if current == section and key and re.match(rf"^{re.escape(key)}\s*=", stripped):
            return lineno
    return header_line


class _Checker:
    def __init__(self, text, source):
        self.text = text
        self.source = source

    def fail(self, section, key, message):
        raise ScenarioError(message, key=f"{section}.{key}" if key else section,
                            line=_locate(self.text, section, key), source=self.source)

    def number(self, sec, name, values, *, positive=False, integer=False, minimum=None,
               default=None, required=True):
        if name not in values:
            if default is not None or not required:
                return default
            self.fail(sec, name, "missing required key")
        v = values[name]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(sec, name, f"expected a number, got {v!r}")
        if integer and not isinstance(v, int):
            self.fail(sec, name, f"expected an integer, got {v!r}")
        if positive and v <= 0:
            self.fail(sec, name, f"must be positive, got {v!r}")
        if minimum is not None and v < minimum:
            self.fail(sec, name, f"must be at least {minimum}, got {v!r}")
        return v

    def vector(self, sec, name, values, length):
        v = values.get(name)
        if (not isinstance(v, list) or len(v) != length
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
            self.fail(sec, name, f"expected a list of {length} numbers, got {v!r}")
        return [float(c) for c in v]

    def choice(self, sec, name, values, options, default=None):
        v = values.get(name, default)
        if v not in options:
            self.fail(sec, name, f"must be one of {sorted(options)}, got {v!r}")
        return v

    def path(self, sec, values):
        v = values.get("path")
        if not isinstance(v, str) or not v:
            self.fail(sec, "path", "expected a file path")
        return v


def _validate(doc, text, source):
    ck = _Checker(text, source)
    for key, value in doc.items():
        if isinstance(value, dict):
            if key not in _SECTIONS:
                ck.fail(key, None, "unknown section")
            unknown = set(value) - _SECTIONS[key]
            if unknown:
                ck.fail(key, sorted(unknown)[0], "unknown key")
        elif key not in _TOP_LEVEL:
            raise ScenarioError(f"unknown top-level key {key!r}", key=key,
                                line=_locate(text, None, key), source=source)
    for sec in _REQUIRED:
        if sec not in doc:
            raise ScenarioError("missing section", key=sec, source=source)

    g = doc["grid"]
    ck.number("grid", "nx", g, integer=True, minimum=3)
    ck.number("grid", "ny", g, integer=True, minimum=3)
    if "extent" in g:
        xmin, xmax, ymin, ymax = ck.vector("grid", "extent", g, 4)
        if not (xmin < xmax and ymin < ymax):
            ck.fail("grid", "extent", "expected [xmin, xmax, ymin, ymax] with min < max")
    else:
        ck.number("grid", "x0", g)
        ck.number("grid", "y0", g)
        ck.number("grid", "dx", g, positive=True)
        ck.number("grid", "dy", g, positive=True)

    e = doc["elevation"]
    kind = ck.choice("elevation", "kind", e, {"flat", "hill", "valley", "file"})
    if kind in ("hill", "valley"):
        ck.vector("elevation", "center", e, 2)
        ck.number("elevation", "height", e, positive=True)
        ck.number("elevation", "width", e, positive=True)
    elif kind == "file":
        ck.path("elevation", e)

    f = doc["fuel"]
    kind = ck.choice("fuel", "kind", f, {"uniform", "split", "file"})
    if kind == "uniform":
        f.setdefault("label", FUEL_A)
        ck.choice("fuel", "label", f, {FUEL_A, FUEL_B})
    elif kind == "split":
        ck.vector("fuel", "point", f, 2)
        if not any(ck.vector("fuel", "normal", f, 2)):
            ck.fail("fuel", "normal", "normal must be non-zero")
    else:
        ck.path("fuel", f)

    w = doc["wind"]
    w.setdefault("units", "native")
    ck.choice("wind", "units", w, {"native", "mph", "m/s"})
    if "speed" in w or "bearing_deg" in w:
        if "ux" in w or "uy" in w:
            ck.fail("wind", "speed", "give either ux/uy or speed/bearing_deg, not both")
        ck.number("wind", "speed", w, minimum=0)
        ck.number("wind", "bearing_deg", w)
    else:
        ck.number("wind", "ux", w)
        ck.number("wind", "uy", w)

    fr = doc["front"]
    kind = ck.choice("front", "kind", fr, {"circle", "mask"})
    if kind == "circle":
        ck.vector("front", "center", fr, 2)
        ck.number("front", "radius", fr, positive=True)
    else:
        ck.path("front", fr)

    t = doc["time"]
    t.setdefault("t0", 0.0)
    t0 = ck.number("time", "t0", t)
    tf = ck.number("time", "tf", t)
    if tf <= t0:
        ck.fail("time", "tf", f"tf must exceed t0={t0}, got {tf}")
    if "times" in t:
        if "dt" in t:
            ck.fail("time", "dt", "give either dt or times, not both")
        times = t["times"]
        if (not isinstance(times, list) or not times
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in times)
                or any(b <= a for a, b in zip([t0] + times, times)) or times[-1] > tf):
            ck.fail("time", "times", "expected increasing snapshot times in (t0, tf]")
    else:
        dt = ck.number("time", "dt", t, positive=True)
        try:
            sample_times(t0, tf, dt)
        except ValueError as exc:
            ck.fail("time", "dt", str(exc))

    if "truth" in doc:
        p = ck.vector("truth", "p", doc["truth"], 8)
        try:
            ParamVector.from_array(p)
        except ValueError as exc:
            ck.fail("truth", "p", str(exc))
    if "bounds" in doc:
        lo = ck.vector("bounds", "p_min", doc["bounds"], 8)
        hi = ck.vector("bounds", "p_max", doc["bounds"], 8)
        if not all(a < b for a, b in zip(lo, hi)):
            ck.fail("bounds", "p_min", "p_min must be strictly below p_max componentwise")
    opt = doc.get("optimizer", {})
    for name in ("mesh_init", "tol", "budget_seconds"):
        ck.number("optimizer", name, opt, positive=True, required=False)
    for name in ("max_iter", "max_evals", "seed"):
        ck.number("optimizer", name, opt, integer=True, minimum=0, required=False)
    if "expand" in opt and ck.number("optimizer", "expand", opt) <= 1:
        ck.fail("optimizer", "expand", "must exceed 1")
    if "contract" in opt and not 0 < ck.number("optimizer", "contract", opt) < 1:
        ck.fail("optimizer", "contract", "must lie in (0, 1)")
    if "x0" in opt:
        ck.vector("optimizer", "x0", opt, 8)
    if "parallel_poll" in opt and not isinstance(opt["parallel_poll"], bool):
        ck.fail("optimizer", "parallel_poll", "expected true or false")
    sol = doc.get("solver", {})
    if "cfl" in sol and not 0 < ck.number("solver", "cfl", sol) <= 1:
        ck.fail("solver", "cfl", "must lie in (0, 1]")
    ck.number("solver", "reinit_period", sol, integer=True, minimum=1, required=False)
    return doc


@dataclass
class ScenarioFile:
    """A validated scenario document plus the directory its paths are relative to."""

    doc: dict
    base_dir: Path = field(default_factory=Path.cwd)
    source: str = "<scenario>"

    @property
    def name(self):
        return self.doc.get("name", Path(self.source).stem)

    def dumps(self):
        return tomli_w.dumps(self.doc)

    def __eq__(self, other):
        return isinstance(other, ScenarioFile) and self.doc == other.doc

    # -- builders ----------------------------------------------------------

    def grid(self):
        g = self.doc["grid"]
        if "extent" in g:
            return GridSpec.from_extent(g["nx"], g["ny"], *g["extent"])
        return GridSpec(g["nx"], g["ny"], float(g["x0"]), float(g["y0"]),
                        float(g["dx"]), float(g["dy"]))

    def _raster(self, section, grid):
        path = self.base_dir / self.doc[section]["path"]
        try:
            values, src, nodata = read_asc(path)
        except OSError as exc:
            raise ScenarioError(f"cannot read raster: {exc}", key=f"{section}.path",
                                source=self.source) from None
        if nodata is not None and np.any(values == nodata):
            raise ScenarioError(f"{path} contains nodata cells", key=f"{section}.path",
                                source=self.source)
        if src != grid:
            values = resample_nearest(values, src, grid)
        return values

    def wind(self):
        w = self.doc["wind"]
        scale = MPH if w["units"] == "mph" else 1.0
        if "speed" in w:
            return Wind.from_bearing(w["speed"] * scale, w["bearing_deg"])
        return Wind(w["ux"] * scale, w["uy"] * scale)

    def times(self):
        t = self.doc["time"]
        if "times" in t:
            return (float(t["t0"]),) + tuple(float(v) for v in t["times"])
        return sample_times(float(t["t0"]), float(t["tf"]), float(t["dt"]))

    def build(self):
        grid = self.grid()
        e = self.doc["elevation"]
        if e["kind"] == "flat":
            z = np.zeros(grid.shape)
        elif e["kind"] == "file":
            z = self._raster("elevation", grid)
        else:
            sign = 1.0 if e["kind"] == "hill" else -1.0
            z = gaussian_surface(grid, e["center"], sign * e["height"], e["width"])

        f = self.doc["fuel"]
        if f["kind"] == "uniform":
            fuel = np.full(grid.shape, f["label"], dtype=np.int8)
        elif f["kind"] == "split":
            fuel = split_fuel(grid, f["point"], f["normal"])
        else:
            fuel = np.rint(self._raster("fuel", grid)).astype(np.int8)

        fr = self.doc["front"]
        if fr["kind"] == "circle":
            phi0 = signed_distance_from_circle(grid, fr["center"], fr["radius"])
        else:
            phi0 = signed_distance_from_mask(grid, self._raster("front", grid) > 0)

        t = self.doc["time"]
        try:
            return Scenario(grid, z, fuel, self.wind(), phi0, float(t["t0"]), float(t["tf"]),
                            self.times(), name=self.name)
        except ValueError as exc:
            raise ScenarioError(str(exc), source=self.source) from None

    def truth(self):
        if "truth" not in self.doc:
            return None
        return ParamVector.from_array(self.doc["truth"]["p"])

    def search_config(self, **overrides):
        if "bounds" not in self.doc:
            raise ScenarioError("estimation needs a [bounds] section", key="bounds",
                                source=self.source)
        opts = dict(self.doc.get("optimizer", {}))
        if "x0" in opts:
            opts["x0"] = tuple(opts["x0"])
        opts.update({k: v for k, v in overrides.items() if v is not None})
        return SearchConfig(tuple(self.doc["bounds"]["p_min"]),
                            tuple(self.doc["bounds"]["p_max"]), **opts)

    def solver_config(self, **overrides):
        opts = dict(self.doc.get("solver", {}))
        opts.update({k: v for k, v in overrides.items() if v is not None})
        return SolverConfig(**opts)


def parse_scenario(text, base_dir=".", source="<scenario>"):
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ScenarioError(f"malformed TOML: {exc}", line=int(m.group(1)) if m else None,
                            source=source) from None
    doc = _validate(copy.deepcopy(doc), text, source)
    return ScenarioFile(doc, Path(base_dir), source)


def load_scenario(path):
    """Load a scenario file, or a bundled scenario by name."""
    path = Path(path)
    if not path.exists() and path.suffix == "" and str(path) in BUNDLED:
        path = bundled_path(str(path))
    text = path.read_text()
    return parse_scenario(text, base_dir=path.parent, source=str(path))


def bundled_path(name):
    if name not in BUNDLED:
        raise KeyError(f"no bundled scenario {name!r}; choose from {', '.join(BUNDLED)}")
    return Path(str(resources.files("firefront") / "scenarios" / f"{name}.toml"))
