"""Uniform cell-centred rasters: grid geometry, terrain gradients, signed
distances and zero-contour extraction.

Fields are plain ``numpy`` arrays of shape ``(ny, nx)``. Row ``j`` runs
south to north and column ``i`` west to east, so ``field[j, i]`` is the value
at ``(x0 + (i + 0.5) dx, y0 + (j + 0.5) dy)``. The level-set sign convention
is fixed: ``phi > 0`` is burnt (inside the front), ``phi < 0`` unburnt.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage import measure

FUEL_A = 0
FUEL_B = 1


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    x0: float
    y0: float
    dx: float
    dy: float

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs at least 3x3 cells, got {self.nx}x{self.ny}")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError(f"cell spacings must be positive, got dx={self.dx}, dy={self.dy}")

    @classmethod
    def from_extent(cls, nx, ny, xmin, xmax, ymin, ymax):
        """Grid of ``nx`` x ``ny`` cells exactly covering the rectangle."""
        return cls(nx, ny, float(xmin), float(ymin),
                   (xmax - xmin) / nx, (ymax - ymin) / ny)

    @property
    def shape(self):
        return (self.ny, self.nx)

    @property
    def size(self):
        return self.nx * self.ny

    @property
    def x(self):
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y(self):
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dy

    def mesh(self):
        """Cell-centre coordinates ``(X, Y)``, each of shape ``(ny, nx)``."""
        return np.meshgrid(self.x, self.y)

    def check(self, field, name="field"):
        field = np.asarray(field)
        if field.shape != self.shape:
            raise ValueError(f"{name} has shape {field.shape}, grid expects {self.shape}")
        return field


@dataclass(frozen=True)
class Wind:
    ux: float = 0.0
    uy: float = 0.0

    @property
    def speed(self):
        return float(np.hypot(self.ux, self.uy))

    @classmethod
    def from_bearing(cls, speed, bearing_deg):
        """Wind blowing *toward* a compass bearing (0 = North, 90 = East)."""
        b = np.deg2rad(bearing_deg)
        return cls(float(speed * np.sin(b)), float(speed * np.cos(b)))


@dataclass(frozen=True)
class FrontPolyline:
    points: np.ndarray  # (m, 2) array of (x, y)
    closed: bool


def fuel_labels(grid, labels):
    """Validate a fuel raster: integer labels restricted to fuel A / fuel B."""
    labels = grid.check(np.asarray(labels), "fuel map")
    if not np.isin(labels, (FUEL_A, FUEL_B)).all():
        raise ValueError("fuel labels must be 0 (fuel A) or 1 (fuel B)")
    return labels.astype(np.int8)


def elevation_gradient(z, grid):
    """Central differences inside, first-order one-sided on the boundary.

    Returns ``(dz_dx, dz_dy)`` on the same grid as ``z``.
    """
    z = grid.check(np.asarray(z, dtype=float), "elevation")
    dz_dy, dz_dx = np.gradient(z, grid.dy, grid.dx, edge_order=1)
    return dz_dx, dz_dy


def signed_distance_from_circle(grid, center, radius):
    if radius <= 0:
        raise ValueError("radius must be positive")
    X, Y = grid.mesh()
    return radius - np.hypot(X - center[0], Y - center[1])


def signed_distance_from_mask(grid, inside):
    """Exact Euclidean signed distance to the boundary of a burnt mask.

    The front sits half a cell from the boundary cells, i.e. at the
    midpoint between opposite-sign neighbours along the grid axes.
    """
    inside = grid.check(np.asarray(inside, dtype=bool), "mask")
    if inside.all() or not inside.any():
        raise ValueError("mask must contain both burnt and unburnt cells")
    sampling = (grid.dy, grid.dx)
    half = 0.5 * min(grid.dx, grid.dy)
    d_in = ndimage.distance_transform_edt(inside, sampling=sampling)
    d_out = ndimage.distance_transform_edt(~inside, sampling=sampling)
    return np.where(inside, d_in - half, half - d_out)


def extract_zero_contour(phi, grid):
    """Marching-squares zero level set of ``phi`` as a list of polylines.

    Returns an empty list when ``phi`` does not change sign.
    """
    phi = grid.check(np.asarray(phi, dtype=float), "phi")
    if phi.min() > 0 or phi.max() < 0:
        return []
    fronts = []
    for rc in measure.find_contours(phi, 0.0):
        pts = np.column_stack([grid.x0 + (rc[:, 1] + 0.5) * grid.dx,
                               grid.y0 + (rc[:, 0] + 0.5) * grid.dy])
        closed = len(pts) > 3 and np.allclose(pts[0], pts[-1])
        if closed:
            pts = pts[:-1]
        fronts.append(FrontPolyline(pts, closed))
    return fronts
