"""Empirical rate of spread and its extension to every level set of phi."""
from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from .grid import FUEL_A, elevation_gradient

SLOPE_COEF = 5.275
SLOPE_EXP = -0.3
GRAD_EPS = 1e-9


@dataclass(frozen=True)
class ParamVector:
    """The eight spread parameters, in estimation order."""

    n: float
    eps_a: float
    eps_b: float
    a_a: float
    a_b: float
    alpha: float
    beta_a: float
    beta_b: float

    def __post_init__(self):
        v = self.to_array()
        if not np.isfinite(v).all():
            raise ValueError(f"non-finite parameter in {v}")
        if min(self.n, self.eps_a, self.eps_b, self.a_a, self.a_b) < 0:
            raise ValueError("n, eps and a must be non-negative")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.beta_a <= 0 or self.beta_b <= 0:
            raise ValueError("packing ratios beta must be strictly positive")

    @classmethod
    def names(cls):
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_array(cls, values):
        values = [float(v) for v in np.asarray(values, dtype=float).ravel()]
        if len(values) != 8:
            raise ValueError(f"expected 8 parameters, got {len(values)}")
        return cls(*values)

    def to_array(self):
        return np.array(astuple(self), dtype=float)

    def for_fuel(self, fuel):
        """Per-cell ``(eps, a, beta)`` arrays for a fuel label raster."""
        is_a = np.asarray(fuel) == FUEL_A
        return (np.where(is_a, self.eps_a, self.eps_b),
                np.where(is_a, self.a_a, self.a_b),
                np.where(is_a, self.beta_a, self.beta_b))


def slope_factor(beta, tan_chi):
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise ValueError("beta must be strictly positive")
    out = SLOPE_COEF * beta ** SLOPE_EXP * np.square(tan_chi)
    return out if out.ndim else float(out)


def _spread_from_cosines(U, cos_theta, eps, a, n, alpha, slope_term):
    cos_theta = np.asarray(cos_theta, dtype=float)
    head = cos_theta >= 0.0
    c = np.clip(cos_theta, 0.0, 1.0)
    sin_theta = np.sqrt(np.clip(1.0 - cos_theta ** 2, 0.0, 1.0))
    F = np.where(head,
                 eps + a * np.sqrt(U * c ** n),
                 eps * (alpha + (1.0 - alpha) * sin_theta))
    return np.maximum(F + slope_term, 0.0)


def rate_of_spread(U, theta, gamma=0.0, tan_chi=0.0, *, n, eps, a, alpha, beta):
    """Front rate of spread for wind speed ``U`` and the angles ``theta``
    (normal vs. wind) and ``gamma`` (normal vs. elevation gradient).

    Broadcasts over array arguments. Negative values, possible on steep
    descents, are floored at zero.
    """
    if np.any(np.asarray(U) < 0):
        raise ValueError("wind speed must be non-negative")
    slope = eps * slope_factor(beta, tan_chi) * np.cos(gamma)
    F = _spread_from_cosines(U, np.cos(theta), eps, a, n, alpha, slope)
    return F if F.ndim else float(F)


class SpreadField:
    """Rate of spread on a grid for fixed terrain, fuel, wind and parameters.

    Everything that does not depend on phi is computed once here, so calling
    the instance on a phi field only costs a gradient and a few array ops.
    """

    def __init__(self, grid, z, fuel, wind, p):
        self.grid = grid
        self.p = p
        eps, a, beta = p.for_fuel(grid.check(fuel, "fuel map"))
        self.eps, self.a = eps, a
        self.U = wind.speed
        self.wind_dir = (wind.ux / self.U, wind.uy / self.U) if self.U > 0 else None

        dzdx, dzdy = elevation_gradient(z, grid)
        tan_chi = np.hypot(dzdx, dzdy)
        flat = tan_chi < GRAD_EPS
        inv = np.where(flat, 0.0, 1.0 / np.where(flat, 1.0, tan_chi))
        # eps * psi * cos(gamma) == slope_x * n_x + slope_y * n_y
        amp = eps * slope_factor(beta, tan_chi) * inv
        self.slope_x = amp * dzdx
        self.slope_y = amp * dzdy
        self.slope_max = eps * slope_factor(beta, tan_chi)

    def __call__(self, phi):
        g = self.grid
        dphi_dy, dphi_dx = np.gradient(phi, g.dy, g.dx, edge_order=1)
        norm = np.hypot(dphi_dx, dphi_dy)
        degenerate = norm * min(g.dx, g.dy) < GRAD_EPS
        inv = 1.0 / np.where(degenerate, 1.0, norm)
        # outward normal under the positive-inside convention
        nx = -dphi_dx * inv
        ny = -dphi_dy * inv
        slope = np.where(degenerate, self.slope_max, self.slope_x * nx + self.slope_y * ny)
        if self.wind_dir is None:
            cos_theta = 1.0
        else:
            cos_theta = np.where(degenerate, 1.0,
                                 nx * self.wind_dir[0] + ny * self.wind_dir[1])
        return _spread_from_cosines(self.U, cos_theta, self.eps, self.a,
                                    self.p.n, self.p.alpha, slope)


def speed_field(phi, z, fuel, wind, p, grid):
    """Rate of spread at every cell, using the angle each level set of
    ``phi`` makes with the wind and the terrain gradient."""
    return SpreadField(grid, z, fuel, wind, p)(grid.check(phi, "phi"))
