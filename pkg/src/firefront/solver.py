"""Level-set front propagation under the normal-flow equation.

Space derivatives use third-order ENO reconstructions, the Hamiltonian is
upwinded with the Godunov flux, and time is advanced with two-stage SSP
Runge-Kutta (Heun). With phi positive inside, a front moving outward at
speed ``F >= 0`` satisfies ``phi_t = F |grad phi|``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .grid import signed_distance_from_mask
from .spread import SpreadField

logger = logging.getLogger(__name__)

SPEED_FLOOR = 1e-12


class NumericalError(RuntimeError):
    """The level-set field stopped being finite."""


class CFLError(ValueError):
    def __init__(self, dt, dt_max):
        super().__init__(f"time step {dt:g} violates the CFL bound; largest admissible is {dt_max:g}")
        self.dt = dt
        self.dt_max = dt_max


@dataclass(frozen=True)
class SolverConfig:
    cfl: float = 0.5
    snapshot_times: tuple | None = None
    reinit_period: int | None = None

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.snapshot_times is not None:
            t = np.asarray(self.snapshot_times, dtype=float)
            if t.size == 0 or np.any(np.diff(t) <= 0):
                raise ValueError("snapshot_times must be non-empty and strictly increasing")
        if self.reinit_period is not None and self.reinit_period < 1:
            raise ValueError("reinit_period must be a positive number of snapshots")


@dataclass
class FrontSeries:
    """Time-stamped level-set snapshots sharing one grid.

    ``fields[k]`` is phi at ``times[k]``; for measured data it holds +1 on
    burnt cells and -1 elsewhere.
    """

    grid: object
    times: np.ndarray
    fields: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.fields = np.asarray(self.fields, dtype=float)
        if self.fields.shape != (len(self.times),) + self.grid.shape:
            raise ValueError(f"fields shape {self.fields.shape} does not match "
                             f"{len(self.times)} snapshots on a {self.grid.shape} grid")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("snapshot times must be strictly increasing")

    @classmethod
    def from_masks(cls, grid, times, masks):
        masks = np.asarray(masks, dtype=bool)
        return cls(grid, times, np.where(masks, 1.0, -1.0))

    def __len__(self):
        return len(self.times)

    def burnt(self):
        """Heaviside of each snapshot: cells with phi >= 0 count as burnt."""
        return self.fields >= 0

    def select(self, idx):
        idx = np.atleast_1d(idx)
        return FrontSeries(self.grid, self.times[idx], self.fields[idx])

    def at_times(self, times, atol=1e-9):
        idx = []
        for t in np.atleast_1d(times):
            hit = np.flatnonzero(np.abs(self.times - t) <= atol)
            if hit.size == 0:
                raise KeyError(f"no snapshot at t={t}")
            idx.append(hit[0])
        return self.select(idx)


def _eno3_axis(u, h):
    """ENO3 one-sided derivatives along the last axis of ``u``."""
    n = u.shape[-1]
    lo, hi = u[..., :1], u[..., -1:]
    left = lo + (lo - u[..., 1:2]) * np.array([3.0, 2.0, 1.0])
    right = hi + (hi - u[..., -2:-1]) * np.array([1.0, 2.0, 3.0])
    p = np.concatenate([left, u, right], axis=-1)
    # padded index I = i + 3; d1[j] sits at j+1/2, d2[j] at j+1, d3[j] at j+3/2
    d1 = np.diff(p, axis=-1) / h
    d2 = np.diff(d1, axis=-1) / (2.0 * h)
    d3 = np.diff(d2, axis=-1) / (3.0 * h)
    d2a, d2b, d2c = d2[..., 1:n + 1], d2[..., 2:n + 2], d2[..., 3:n + 3]
    d3a, d3b, d3c, d3d = d3[..., 0:n], d3[..., 1:n + 1], d3[..., 2:n + 2], d3[..., 3:n + 3]
    h2 = h * h

    # backward: base interval (I-1, I)
    left = np.abs(d2a) <= np.abs(d2b)
    q2 = np.where(left, d2a, d2b) * h
    q3 = np.where(left,
                  2.0 * np.where(np.abs(d3a) <= np.abs(d3b), d3a, d3b),
                  -1.0 * np.where(np.abs(d3b) <= np.abs(d3c), d3b, d3c)) * h2
    minus = d1[..., 2:n + 2] + q2 + q3

    # forward: base interval (I, I+1)
    left = np.abs(d2b) <= np.abs(d2c)
    q2 = -np.where(left, d2b, d2c) * h
    q3 = np.where(left,
                  -1.0 * np.where(np.abs(d3b) <= np.abs(d3c), d3b, d3c),
                  2.0 * np.where(np.abs(d3c) <= np.abs(d3d), d3c, d3d)) * h2
    plus = d1[..., 3:n + 3] + q2 + q3
    return minus, plus


def eno3_derivatives(phi, grid):
    """Backward and forward ENO3 derivatives ``(dx-, dx+, dy-, dy+)``.

    Ghost cells come from linear extrapolation, so boundary cells fall back
    to lower-order one-sided stencils.
    """
    phi = np.asarray(phi, dtype=float)
    dxm, dxp = _eno3_axis(phi, grid.dx)
    dym, dyp = _eno3_axis(phi.T, grid.dy)
    return dxm, dxp, dym.T, dyp.T


def godunov_normal_speed_term(F, dxm, dxp, dym, dyp):
    """Upwinded ``F |grad phi|``, the rate of change of phi.

    For ``F >= 0`` the front moves toward decreasing phi, so information
    comes from the inside: the Godunov choice is
    ``max(min(D-, 0)^2, max(D+, 0)^2)`` per axis. ``F < 0`` swaps the roles.
    """
    F = np.asarray(F, dtype=float)
    zero = 0.0
    out_x = np.maximum(np.minimum(dxm, zero) ** 2, np.maximum(dxp, zero) ** 2)
    out_y = np.maximum(np.minimum(dym, zero) ** 2, np.maximum(dyp, zero) ** 2)
    grad = out_x + out_y
    if np.any(F < 0):
        in_x = np.maximum(np.maximum(dxm, zero) ** 2, np.minimum(dxp, zero) ** 2)
        in_y = np.maximum(np.maximum(dym, zero) ** 2, np.minimum(dyp, zero) ** 2)
        grad = np.where(F >= 0, grad, in_x + in_y)
    return F * np.sqrt(grad)


def _rhs(phi, speed, grid):
    F = speed(phi)
    return godunov_normal_speed_term(F, *eno3_derivatives(phi, grid)), F


def _heun(phi, speed, grid, dt, rate=None):
    if rate is None:
        rate, _ = _rhs(phi, speed, grid)
    phi1 = phi + dt * rate
    rate1, _ = _rhs(phi1, speed, grid)
    return 0.5 * (phi + phi1 + dt * rate1)


def max_stable_dt(F, grid, cfl):
    return cfl * min(grid.dx, grid.dy) / max(float(np.max(np.abs(F))), SPEED_FLOOR)


def step(phi, z, fuel, wind, p, dt, grid, cfl=0.5):
    """Advance phi by one Heun step of size ``dt``."""
    phi = grid.check(np.asarray(phi, dtype=float), "phi")
    if dt <= 0:
        raise ValueError("dt must be positive")
    speed = SpreadField(grid, z, fuel, wind, p)
    rate, F = _rhs(phi, speed, grid)
    dt_max = max_stable_dt(F, grid, cfl)
    if dt > dt_max * (1 + 1e-12):
        raise CFLError(dt, dt_max)
    return _heun(phi, speed, grid, dt, rate)


def reinitialize(phi, grid):
    burnt = phi >= 0
    if burnt.all() or not burnt.any():
        return phi
    return signed_distance_from_mask(grid, burnt)


def simulate(scenario, p, config=None):
    """Integrate the scenario's initial front with parameters ``p``.

    Returns a :class:`FrontSeries` holding phi at ``t0`` and at every
    snapshot time; time steps are truncated to land on them exactly.
    """
    config = config or SolverConfig()
    grid = scenario.grid
    t0 = scenario.t0
    times = scenario.times if config.snapshot_times is None else config.snapshot_times
    times = [float(t) for t in times if t > t0 + 1e-12]
    if times and (times[-1] > scenario.tf + 1e-9):
        raise ValueError(f"snapshot time {times[-1]} lies beyond tf={scenario.tf}")

    speed = SpreadField(grid, scenario.elevation, scenario.fuel, scenario.wind, p)
    phi = np.array(scenario.phi0, dtype=float)
    out = [phi.copy()]
    t = t0
    nsteps = 0
    for k, t_next in enumerate(times, start=1):
        while t < t_next:
            rate, F = _rhs(phi, speed, grid)
            dt = max_stable_dt(F, grid, config.cfl)
            landing = t + dt >= t_next - 1e-12 * max(1.0, abs(t_next))
            if landing:
                dt = t_next - t
            phi = _heun(phi, speed, grid, dt, rate)
            t = t_next if landing else t + dt
            nsteps += 1
            if not np.isfinite(phi).all():
                raise NumericalError(f"phi became non-finite at t={t:g} after {nsteps} steps")
        if config.reinit_period and k % config.reinit_period == 0:
            phi = reinitialize(phi, grid)
        out.append(phi.copy())
    logger.debug("simulate: %d snapshots, %d steps", len(out), nsteps)
    return FrontSeries(grid, [t0] + times, np.array(out))
