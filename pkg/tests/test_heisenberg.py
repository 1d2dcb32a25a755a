import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from geoctrl.heisenberg import (
    GeodesicParam,
    HPoint,
    conjugate_time,
    distance,
    exp_jacobian,
    exp_map,
    geodesic,
    jacobian_factor,
    maxwell_time,
    mu,
    solve_geodesic,
)

TWO_PI = 2 * math.pi


def close(p: HPoint, q, tol):
    return max(abs(a - b) for a, b in zip(p.as_tuple(), q)) <= tol


def test_exp_map_fixtures():
    assert close(exp_map(GeodesicParam(0, 1, TWO_PI)), (0, 0, TWO_PI), 1e-10)
    assert close(exp_map(GeodesicParam(0.3, 0, 2)), (2 * math.cos(0.3), 2 * math.sin(0.3), 0), 1e-15)
    assert close(exp_map(GeodesicParam(-math.pi / 2, 2, math.pi / 2)), (1, 0, math.pi / 4), 1e-14)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        GeodesicParam(0, 1, -1)


def _exp_by_ode(g: GeodesicParam):
    # direct integration of x' = cos(th0 + h3 t), y' = sin(...), z' = x y' - y x'
    # (z is twice the swept area in the closed-form convention)
    def rhs(t, q):
        c, s = math.cos(g.theta0 + g.h3 * t), math.sin(g.theta0 + g.h3 * t)
        return [c, s, q[0] * s - q[1] * c]

    sol = scipy.integrate.solve_ivp(rhs, (0, g.t), [0, 0, 0], rtol=1e-12, atol=1e-14)
    return sol.y[:, -1]


@pytest.mark.parametrize("g", [GeodesicParam(0.4, 1.3, 2.0), GeodesicParam(-2.0, -0.7, 5.0),
                               GeodesicParam(1.0, 3e-5, 2.0), GeodesicParam(3.0, 4.0, 1.5)])
def test_exp_map_matches_ode(g):
    assert close(exp_map(g), _exp_by_ode(g), 1e-9)


def test_series_branch_is_continuous():
    for h3 in (1e-4 * (1 - 1e-9), 1e-4 * (1 + 1e-9)):
        g = GeodesicParam(0.7, h3, 1.0)
        assert close(exp_map(g), _exp_by_ode(g), 1e-12)


def test_geodesic_unit_speed_and_area():
    g = GeodesicParam(0.3, 1.1, 4.0)
    pts = geodesic(g, 4001)
    seg = np.hypot(*np.diff(pts[:, :2], axis=0).T)
    assert seg.sum() == pytest.approx(g.t, rel=1e-6)
    # z equals twice the signed area swept by the planar projection
    x, y = pts[:, 0], pts[:, 1]
    area = 0.5 * scipy.integrate.trapezoid(x * np.gradient(y) - y * np.gradient(x))
    assert 2 * area == pytest.approx(pts[-1, 2], rel=1e-6)
    with pytest.raises(ValueError):
        geodesic(g, 1)


def test_mu_monotone_and_small_p():
    p = np.linspace(1e-6, math.pi - 1e-3, 10_000)
    vals = np.array([mu(v) for v in p])
    assert np.all(np.diff(vals) > 0)
    assert mu(1e-4) == pytest.approx(1e-4 / 3, rel=1e-8)
    assert mu(0.0) == 0.0


def test_jacobian_factor_nonvanishing():
    p = np.linspace(1e-3, math.pi - 1e-3, 10_000)
    assert np.all(np.abs(np.sin(p) * jacobian_factor(p)) > 0)
    assert np.all(jacobian_factor(p) < 0)


@pytest.mark.parametrize("theta0,h3,t", [(0.4, 1.3, 2.0), (-1.0, -0.5, 3.0), (2.0, 2.0, 1.0)])
def test_exp_jacobian_matches_finite_differences(theta0, h3, t):
    # coordinates (tau, p, h3) with tau = theta0 + h3 t / 2 and p = h3 t / 2
    def F(v):
        tau, p, h = v
        return np.array(exp_map(GeodesicParam(tau - p, h, 2 * p / h)).as_tuple())

    v0 = np.array([theta0 + h3 * t / 2, h3 * t / 2, h3])
    eps = 1e-6
    J = np.column_stack([(F(v0 + eps * e) - F(v0 - eps * e)) / (2 * eps) for e in np.eye(3)])
    assert np.linalg.det(J) == pytest.approx(exp_jacobian(v0[1], h3), rel=1e-5)


def test_conjugate_equals_maxwell():
    rng = np.random.default_rng(0)
    for h3 in rng.uniform(-10, 10, 100):
        assert conjugate_time(h3) == maxwell_time(h3) == pytest.approx(TWO_PI / abs(h3))
    assert conjugate_time(0.0) == maxwell_time(0.0) == math.inf


@pytest.mark.parametrize("q,d", [((3, 4, 0), 5.0), ((0, 0, TWO_PI), TWO_PI), ((1, 0, math.pi / 4), math.pi / 2),
                                 ((0, 0, 0), 0.0)])
def test_distance_fixtures(q, d):
    assert distance(*q) == pytest.approx(d, abs=1e-9)


def test_z_axis_family():
    res = solve_geodesic(HPoint(0, 0, -3.0))
    assert res.family
    g = res.minimizers[0]
    assert close(exp_map(g), (0, 0, -3.0), 1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(0.05, 5), st.floats(0.01, 0.99), st.booleans())
def test_round_trip(theta0, h3_abs, frac, neg):
    h3 = -h3_abs if neg else h3_abs
    g = GeodesicParam(theta0, h3, frac * TWO_PI / h3_abs)
    res = solve_geodesic(exp_map(g))
    assert res.distance == pytest.approx(g.t, abs=1e-8)
    m = res.minimizers[0]
    assert abs(math.remainder(m.theta0 - g.theta0, TWO_PI)) <= 1e-6
    assert m.h3 == pytest.approx(h3, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_minimizer_reaches_target(x, y, z):
    res = solve_geodesic(HPoint(x, y, z))
    if res.minimizers:
        assert res.minimizers[0].t == res.distance
        assert close(exp_map(res.minimizers[0]), (x, y, z), 1e-8 * max(1, res.distance**2))
    assert res.distance >= math.hypot(x, y) - 1e-12


@pytest.mark.parametrize("r", [1e-3, 1e-8, 1e-45, 1e-200])
def test_near_z_axis(r):
    res = solve_geodesic(HPoint(0.0, r, 1.0))
    # d0 is Lipschitz across the axis: the offset from sqrt(2 pi |z|) is O(r)
    assert abs(res.distance - math.sqrt(2 * math.pi)) <= 2 * r + 1e-13
    assert close(exp_map(res.minimizers[0]), (0.0, r, 1.0), 1e-8)


def test_distance_scaling():
    rng = np.random.default_rng(2)
    for x, y, z in rng.uniform(-2, 2, (20, 3)):
        for lam in (0.5, 3.0):
            assert distance(lam * x, lam * y, lam * lam * z) == pytest.approx(lam * distance(x, y, z), rel=1e-10)


@pytest.mark.parametrize("base", [(1.0, 0.5, 0.0), (0.0, 0.0, 1.0)], ids=["plane", "z-axis"])
def test_continuity_across_case_boundaries(base):
    d0 = distance(*base)
    rng = np.random.default_rng(3)
    dirs = rng.normal(size=(8, 3))
    errs = []
    for k in range(4):
        delta = 10.0 ** (-2 - 2 * k)
        errs.append(max(abs(distance(*(np.array(base) + delta * u)) - d0) for u in dirs))
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-3
