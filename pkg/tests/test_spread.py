import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firefront.grid import GridSpec, Wind, signed_distance_from_circle
from firefront.spread import ParamVector, rate_of_spread, slope_factor, speed_field

LOCAL = dict(n=3.0, eps=0.4, a=0.5, alpha=0.5, beta=0.02)

admissible = st.fixed_dictionaries({
    "n": st.floats(2.0, 6.0),
    "eps": st.floats(0.0, 3.0),
    "a": st.floats(0.0, 3.0),
    "alpha": st.floats(0.0, 1.0),
    "beta": st.floats(1e-3, 0.5),
})


def test_slope_factor_values():
    # 5.275 * 0.02**-0.3 * 0.1**2 evaluated with math.pow
    assert slope_factor(0.02, 0.1) == pytest.approx(5.275 * math.pow(0.02, -0.3) * 0.01, rel=1e-14)
    assert slope_factor(0.02, 0.1) == pytest.approx(0.1705742, abs=1e-7)
    assert slope_factor(0.07, 0.0) == 0.0
    assert slope_factor(1.0, 1.0) == pytest.approx(5.275)
    with pytest.raises(ValueError):
        slope_factor(0.0, 0.1)


def test_rate_of_spread_examples():
    assert rate_of_spread(1.0, 0.0, **LOCAL) == pytest.approx(0.9)
    assert rate_of_spread(1.0, math.pi, **LOCAL) == pytest.approx(0.2)
    assert rate_of_spread(1.0, math.pi / 2, **LOCAL) == pytest.approx(0.4)
    assert rate_of_spread(1.0, math.pi / 2 + 1e-15, **LOCAL) == pytest.approx(0.4)
    assert rate_of_spread(0.0, 0.0, **LOCAL) == pytest.approx(0.4)


def test_rate_of_spread_rejects_negative_wind():
    with pytest.raises(ValueError):
        rate_of_spread(-1.0, 0.0, **LOCAL)


def test_rate_of_spread_broadcasts():
    theta = np.linspace(0, math.pi, 7)
    F = rate_of_spread(2.0, theta, **LOCAL)
    assert F.shape == (7,)
    assert F[0] == pytest.approx(0.4 + 0.5 * math.sqrt(2.0))


def test_steep_descent_is_clamped():
    F = rate_of_spread(0.0, 0.0, math.pi, 1.0, **LOCAL)
    assert F == 0.0


@settings(max_examples=200, deadline=None)
@given(admissible, st.floats(0.0, 10.0), st.floats(0.0, 0.5), st.floats(0.0, math.pi))
def test_continuity_at_right_angle(p, U, tan_chi, gamma):
    below = rate_of_spread(U, math.pi / 2 - 1e-9, gamma, tan_chi, **p)
    above = rate_of_spread(U, math.pi / 2 + 1e-9, gamma, tan_chi, **p)
    assert below == pytest.approx(above, abs=1e-6 * (1 + p["a"] * math.sqrt(U)) + 1e-9)


@settings(max_examples=200, deadline=None)
@given(admissible, st.floats(0.0, 10.0))
def test_head_non_increasing_in_theta(p, U):
    theta = np.linspace(0.0, math.pi / 2, 50)
    F = rate_of_spread(U, theta, **p)
    assert np.all(np.diff(F) <= 1e-12)


@settings(max_examples=200, deadline=None)
@given(admissible, st.floats(0.0, 10.0), st.floats(0.0, 10.0), st.floats(0.0, 3.0))
def test_wind_and_coupling_monotonicity(p, U1, U2, a2):
    lo, hi = sorted((U1, U2))
    assert rate_of_spread(lo, 0.0, **p) <= rate_of_spread(hi, 0.0, **p) + 1e-12
    q = dict(p, a=max(p["a"], a2))
    assert rate_of_spread(U1, 0.0, **p) <= rate_of_spread(U1, 0.0, **q) + 1e-12
    rear = rate_of_spread(U1, math.pi, **p)
    assert rear == pytest.approx(rate_of_spread(U2, math.pi, **q))
    assert rear == pytest.approx(p["eps"] * p["alpha"])


@settings(max_examples=200, deadline=None)
@given(admissible, st.floats(0.0, 10.0), st.floats(0.0, math.pi), st.floats(0.0, math.pi),
       st.floats(0.0, 2.0))
def test_nonnegative_and_no_clamp_on_flat(p, U, theta, gamma, tan_chi):
    assert rate_of_spread(U, theta, gamma, tan_chi, **p) >= 0.0
    flat = rate_of_spread(U, theta, gamma, 0.0, **p)
    head = theta <= math.pi / 2
    raw = (p["eps"] + p["a"] * math.sqrt(U * max(math.cos(theta), 0.0) ** p["n"]) if head
           else p["eps"] * (p["alpha"] + (1 - p["alpha"]) * abs(math.sin(theta))))
    assert flat == pytest.approx(raw, rel=1e-12, abs=1e-15)


def test_param_vector_roundtrip_and_validation():
    p = ParamVector(3, 0.8, 0.4, 0.7, 0.4, 0.5, 0.03, 0.08)
    assert ParamVector.from_array(p.to_array()) == p
    assert ParamVector.names()[0] == "n" and len(ParamVector.names()) == 8
    with pytest.raises(ValueError):
        ParamVector(3, 0.8, 0.4, 0.7, 0.4, 0.5, 0.0, 0.08)
    with pytest.raises(ValueError):
        ParamVector(3, 0.8, 0.4, 0.7, 0.4, 1.5, 0.03, 0.08)
    with pytest.raises(ValueError):
        ParamVector.from_array([1, 2, 3])


@pytest.fixture
def grid():
    return GridSpec.from_extent(101, 101, -1, 1, -1, 1)


def test_speed_field_isotropic(grid):
    phi = signed_distance_from_circle(grid, (0.0, 0.0), 0.3)
    X, _ = grid.mesh()
    fuel = (X > 0).astype(np.int8)
    p = ParamVector(3, 0.8, 0.4, 0.7, 0.4, 0.5, 0.03, 0.08)
    F = speed_field(phi, np.zeros(grid.shape), fuel, Wind(), p, grid)
    np.testing.assert_allclose(F, np.where(fuel == 0, 0.8, 0.4))
    uniform = speed_field(phi, np.zeros(grid.shape), np.zeros(grid.shape, int), Wind(), p, grid)
    assert np.ptp(uniform) == 0.0


def test_speed_field_wind_geometry(grid):
    phi = signed_distance_from_circle(grid, (0.0, 0.0), 0.3)
    X, Y = grid.mesh()
    p = ParamVector(3, 0.4, 0.4, 0.5, 0.5, 0.5, 0.02, 0.02)
    F = speed_field(phi, np.zeros(grid.shape), np.zeros(grid.shape, int), Wind(1.0, 0.0), p, grid)
    east = (np.abs(Y) < 1e-9) & np.isclose(X, 8 * grid.dx + grid.x[50])
    west = (np.abs(Y) < 1e-9) & np.isclose(X, -8 * grid.dx + grid.x[50])
    north = (np.abs(X) < 1e-9) & np.isclose(Y, 8 * grid.dy + grid.y[50])
    assert F[east][0] == pytest.approx(0.4 + 0.5)  # theta = 0
    assert F[west][0] == pytest.approx(0.4 * 0.5)  # theta = pi
    assert F[north][0] == pytest.approx(0.4)  # theta = pi / 2


def test_speed_field_uphill_minus_downhill(grid):
    X, _ = grid.mesh()
    z = 0.1 * X
    fuel = np.zeros(grid.shape, int)
    p = ParamVector(3, 0.4, 0.4, 0.5, 0.5, 0.5, 0.02, 0.02)
    up = speed_field(0.1 - X, z, fuel, Wind(), p, grid)  # burnt to the west, spreading east
    down = speed_field(X - 0.1, z, fuel, Wind(), p, grid)
    psi = 5.275 * 0.02 ** -0.3 * 0.1 ** 2
    np.testing.assert_allclose(up - down, 2 * 0.4 * psi, rtol=1e-12)
    np.testing.assert_allclose(up, 0.4 + 0.4 * psi, rtol=1e-12)


def test_speed_field_degenerate_gradient(grid):
    p = ParamVector(3, 0.4, 0.4, 0.5, 0.5, 0.5, 0.02, 0.02)
    F = speed_field(np.ones(grid.shape), np.zeros(grid.shape), np.zeros(grid.shape, int),
                    Wind(1.0, 1.0), p, grid)
    assert np.all(np.isfinite(F))
    np.testing.assert_allclose(F, 0.4 + 0.5 * 2 ** 0.25)
