import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from matplotlib.path import Path

from firefront.asciigrid import read_asc, resample_nearest, write_asc
from firefront.grid import (GridSpec, Wind, elevation_gradient, extract_zero_contour,
                            fuel_labels, signed_distance_from_circle,
                            signed_distance_from_mask)


def brute_force_signed_distance(grid, inside):
    """All-pairs oracle: distance to the nearest opposite cell, shifted half a cell."""
    X, Y = grid.mesh()
    pts = np.column_stack([X.ravel(), Y.ravel()])
    flat = inside.ravel()
    out = np.empty(flat.size)
    half = 0.5 * min(grid.dx, grid.dy)
    for k, (p, inn) in enumerate(zip(pts, flat)):
        other = pts[flat != inn]
        d = np.sqrt(((other - p) ** 2).sum(axis=1)).min()
        out[k] = d - half if inn else half - d
    return out.reshape(inside.shape)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(2, 5, 0, 0, 1, 1)
    with pytest.raises(ValueError):
        GridSpec(5, 5, 0, 0, 0.0, 1)
    g = GridSpec.from_extent(101, 101, -1, 1, -1, 1)
    assert g.size == 10201
    assert g.x[0] == pytest.approx(-1 + 1 / 101)
    assert g.x[-1] == pytest.approx(1 - 1 / 101)


def test_wind_bearing():
    w = Wind.from_bearing(2.0, 90.0)
    assert w.ux == pytest.approx(2.0)
    assert w.uy == pytest.approx(0.0, abs=1e-12)
    assert Wind(3.0, 4.0).speed == 5.0


def test_fuel_labels_rejects_third_label():
    g = GridSpec(3, 3, 0, 0, 1, 1)
    with pytest.raises(ValueError):
        fuel_labels(g, np.full((3, 3), 2))


@pytest.mark.parametrize("shape", [(5, 7), (9, 4)])
def test_gradient_linear_field_exact(shape):
    ny, nx = shape
    g = GridSpec(nx, ny, -0.3, 1.2, 0.1, 0.25)
    X, Y = g.mesh()
    dzdx, dzdy = elevation_gradient(2 * X, g)
    np.testing.assert_allclose(dzdx, 2.0, rtol=0, atol=1e-12)
    np.testing.assert_allclose(dzdy, 0.0, atol=1e-12)
    dzdx, dzdy = elevation_gradient(-0.7 * X + 3.0 * Y + 1, g)
    np.testing.assert_allclose(dzdx, -0.7, atol=1e-12)
    np.testing.assert_allclose(dzdy, 3.0, atol=1e-12)


def test_gradient_constant_and_quadratic():
    g = GridSpec(5, 4, -0.125, 0.0, 0.25, 0.25)  # cell centres at x = 0, .25, ..., 1
    dzdx, dzdy = elevation_gradient(np.full(g.shape, 4.2), g)
    assert not dzdx.any() and not dzdy.any()
    X, _ = g.mesh()
    dzdx, _ = elevation_gradient(X ** 2, g)
    assert dzdx[1, 2] == pytest.approx(1.0, abs=1e-14)  # x = 0.5, central
    assert dzdx[1, 0] == pytest.approx(0.25, abs=1e-14)  # x = 0, one-sided


def test_gradient_rejects_small_grid():
    with pytest.raises(ValueError):
        elevation_gradient(np.zeros((2, 5)), GridSpec(5, 3, 0, 0, 1, 1))


def test_signed_distance_circle():
    g = GridSpec.from_extent(21, 21, -1.05, 1.05, -1.05, 1.05)  # centres on multiples of 0.1
    phi = signed_distance_from_circle(g, (0.0, 0.0), 0.2)
    X, Y = g.mesh()
    assert phi[10, 10] == pytest.approx(0.2)
    assert phi[np.isclose(X, 0.2) & np.isclose(Y, 0.0)][0] == pytest.approx(0.0, abs=1e-12)
    assert phi[np.isclose(X, 0.5) & np.isclose(Y, 0.0)][0] == pytest.approx(-0.3)
    with pytest.raises(ValueError):
        signed_distance_from_circle(g, (0, 0), 0.0)


def test_signed_distance_single_cell_matches_oracle():
    g = GridSpec(9, 9, 0.0, 0.0, 0.1, 0.1)
    inside = np.zeros(g.shape, bool)
    inside[4, 4] = True
    phi = signed_distance_from_mask(g, inside)
    np.testing.assert_allclose(phi, brute_force_signed_distance(g, inside), atol=1e-12)
    assert (phi > 0).sum() == 1 and phi[4, 4] > 0
    for j, i in [(3, 4), (5, 4), (4, 3), (4, 5)]:
        assert phi[j, i] == pytest.approx(-0.05)


def test_signed_distance_half_plane_is_linear():
    g = GridSpec(12, 9, 0.0, 0.0, 0.1, 0.1)
    X, _ = g.mesh()
    inside = X < 0.6
    phi = signed_distance_from_mask(g, inside)
    np.testing.assert_allclose(phi, brute_force_signed_distance(g, inside), atol=1e-12)
    np.testing.assert_allclose(phi, 0.6 - X, atol=1e-12)
    np.testing.assert_allclose(signed_distance_from_mask(g, ~inside), -phi, atol=1e-12)


def test_signed_distance_rejects_degenerate_mask():
    g = GridSpec(5, 5, 0, 0, 1, 1)
    with pytest.raises(ValueError):
        signed_distance_from_mask(g, np.ones(g.shape, bool))
    with pytest.raises(ValueError):
        signed_distance_from_mask(g, np.zeros(g.shape, bool))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([(0.1, 0.1), (0.1, 0.2), (0.3, 0.15)]))
def test_signed_distance_random_masks(seed, spacing):
    rng = np.random.default_rng(seed)
    g = GridSpec(11, 8, 0.0, 0.0, *spacing)
    inside = rng.random(g.shape) < 0.4
    if inside.all() or not inside.any():
        inside[0, 0] = not inside[0, 0]
    phi = signed_distance_from_mask(g, inside)
    np.testing.assert_allclose(phi, brute_force_signed_distance(g, inside), atol=1e-12)
    assert np.array_equal(phi > 0, inside)


def test_signed_distance_eikonal_property():
    g = GridSpec.from_extent(81, 81, -1, 1, -1, 1)
    X, Y = g.mesh()
    inside = (X / 0.6) ** 2 + (Y / 0.4) ** 2 < 1
    phi = signed_distance_from_mask(g, inside)
    gy, gx = np.gradient(phi, g.dy, g.dx)
    norm = np.hypot(gx, gy)
    # away from the front, the skeleton inside and the domain edge
    band = (np.abs(phi) > 3 * g.dx) & (phi < -0.0) & (np.abs(X) < 0.9) & (np.abs(Y) < 0.9)
    assert band.sum() > 100
    assert np.all((norm[band] > 0.9) & (norm[band] < 1.1))


def test_contour_circle_radius():
    g = GridSpec.from_extent(201, 201, -1, 1, -1, 1)
    phi = signed_distance_from_circle(g, (0.1, -0.05), 0.2)
    fronts = extract_zero_contour(phi, g)
    assert len(fronts) == 1 and fronts[0].closed
    r = np.hypot(fronts[0].points[:, 0] - 0.1, fronts[0].points[:, 1] + 0.05)
    assert np.max(np.abs(r - 0.2)) <= g.dx


def test_contour_empty_and_two_disks():
    g = GridSpec.from_extent(101, 101, -1, 1, -1, 1)
    assert extract_zero_contour(np.ones(g.shape), g) == []
    phi = np.maximum(signed_distance_from_circle(g, (-0.5, 0), 0.2),
                     signed_distance_from_circle(g, (0.5, 0), 0.2))
    fronts = extract_zero_contour(phi, g)
    assert len(fronts) == 2 and all(f.closed for f in fronts)


def test_contour_rasterization_reproduces_sign():
    g = GridSpec.from_extent(101, 101, -1, 1, -1, 1)
    X, Y = g.mesh()
    phi = 0.35 - np.hypot(X / 1.3, Y) + 0.05 * np.sin(4 * X)
    fronts = extract_zero_contour(phi, g)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    inside = np.zeros(pts.shape[0], bool)
    for f in fronts:
        inside ^= Path(f.points).contains_points(pts)
    agree = np.mean(inside.reshape(g.shape) == (phi > 0))
    assert agree >= 0.99


def test_contour_consecutive_points_adjacent():
    g = GridSpec.from_extent(101, 101, -1, 1, -1, 1)
    fronts = extract_zero_contour(signed_distance_from_circle(g, (0, 0), 0.5), g)
    steps = np.abs(np.diff(fronts[0].points, axis=0))
    assert np.all(steps <= g.dx + 1e-12)


def test_ascii_roundtrip(tmp_path):
    g = GridSpec(4, 3, 10.0, 20.0, 5.0, 5.0)
    values = np.arange(12, dtype=float).reshape(3, 4) / 7
    write_asc(tmp_path / "a.asc", values, g)
    back, g2, nodata = read_asc(tmp_path / "a.asc")
    assert g2 == g and nodata == -9999
    np.testing.assert_allclose(back, values, rtol=1e-9)
    lines = (tmp_path / "a.asc").read_text().splitlines()
    assert lines[0] == "ncols 4" and lines[5].startswith("nodata_value")
    # first data row is the northernmost
    assert float(lines[6].split()[0]) == pytest.approx(values[-1, 0])


def test_ascii_reads_standard_header(tmp_path):
    (tmp_path / "b.asc").write_text(
        "NCOLS 3\nNROWS 3\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 2\nNODATA_VALUE -1\n"
        "1 2 3\n4 5 6\n7 8 9\n")
    values, g, nodata = read_asc(tmp_path / "b.asc")
    assert g == GridSpec(3, 3, 0.0, 0.0, 2.0, 2.0) and nodata == -1
    np.testing.assert_array_equal(values, [[7, 8, 9], [4, 5, 6], [1, 2, 3]])


def test_ascii_rejects_bad_count(tmp_path):
    (tmp_path / "c.asc").write_text(
        "ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nnodata_value -1\n1 2 3\n")
    with pytest.raises(ValueError, match="expected 6"):
        read_asc(tmp_path / "c.asc")


def test_resample_nearest_categorical():
    src = GridSpec(3, 3, 0.0, 0.0, 1.0, 1.0)
    labels = np.array([[0, 1, 0], [1, 0, 1], [1, 1, 0]])
    dst = GridSpec(6, 6, 0.0, 0.0, 0.5, 0.5)
    out = resample_nearest(labels, src, dst)
    np.testing.assert_array_equal(out, np.kron(labels, np.ones((2, 2), int)))
