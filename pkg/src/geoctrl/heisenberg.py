"""Sub-Riemannian geodesics and distance on the Heisenberg group.

Start at the origin. The closed forms use coordinates in which z is twice
the signed area swept by the planar projection, z' = x y' - y x' (frame
d/dx - y d/dz, d/dy + x d/dz). Unit-speed normal geodesics are parameterized
by the initial covector angle theta0, the vertical covector component h3 and
the time t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from ._numeric import TWO_PI, wrap_angle, x_minus_sin

SERIES_SWITCH = 1e-4
P_XTOL = 1e-14
NEAR_AXIS = 1e-8


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float
    z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class GeodesicParam:
    theta0: float
    h3: float
    t: float

    def __post_init__(self):
        object.__setattr__(self, "theta0", wrap_angle(float(self.theta0)))
        if self.t < 0:
            raise ValueError("t must be nonnegative")

    @property
    def p(self) -> float:
        return 0.5 * self.h3 * self.t

    @property
    def tau(self) -> float:
        return self.theta0 + 0.5 * self.h3 * self.t


@dataclass(frozen=True)
class DistanceResult:
    """Distance from the origin and its minimizers.

    On the z-axis the minimizers form a circle of initial angles; one
    representative is stored and ``family`` is set.
    """

    distance: float
    minimizers: tuple[GeodesicParam, ...] = field(default_factory=tuple)
    family: bool = False


def exp_map(g: GeodesicParam) -> HPoint:
    """Endpoint of the unit-speed normal geodesic with parameters g."""
    th, h3, t = g.theta0, g.h3, g.t
    eps = h3 * t
    c, s = math.cos(th), math.sin(th)
    if h3 == 0.0:
        return HPoint(t * c, t * s, 0.0)
    if abs(eps) < SERIES_SWITCH:
        e2 = eps * eps
        x = t * (c * (1.0 - e2 / 6.0) + s * (-eps / 2.0 + eps * e2 / 24.0))
        y = t * (s * (1.0 - e2 / 6.0) + c * (eps / 2.0 - eps * e2 / 24.0))
        z = t * t * (eps / 6.0 - eps * e2 / 120.0)
        return HPoint(x, y, z)
    half = 0.5 * eps
    k = 2.0 * math.sin(half) / h3
    return HPoint(k * math.cos(th + half), k * math.sin(th + half), x_minus_sin(eps) / (h3 * h3))


def geodesic(g: GeodesicParam, n: int) -> np.ndarray:
    """n points (rows x, y, z) along the geodesic for times in [0, g.t]."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return np.array([exp_map(GeodesicParam(g.theta0, g.h3, float(s))).as_tuple()
                     for s in np.linspace(0.0, g.t, n)])


def jacobian_factor(p):
    """phi(p) = (2p - sin 2p) cos p - (1 - cos 2p) sin p."""
    p = np.asarray(p, dtype=float)
    out = (2 * p - np.sin(2 * p)) * np.cos(p) - (1 - np.cos(2 * p)) * np.sin(p)
    return float(out) if out.ndim == 0 else out


def exp_jacobian(p: float, h3: float) -> float:
    """det d(x, y, z)/d(tau, p, h3) = 8 sin(p) phi(p) / h3^5."""
    return 8.0 * math.sin(p) * jacobian_factor(p) / h3**5


def conjugate_time(h3: float) -> float:
    """First conjugate time 2*pi/|h3|; infinite for the straight lines h3 = 0."""
    if h3 == 0.0:
        return math.inf
    return TWO_PI / abs(h3)


def maxwell_time(h3: float) -> float:
    """First Maxwell time from the rotational symmetry about the z-axis."""
    if h3 == 0.0:
        return math.inf
    return TWO_PI / abs(h3)


def mu(p: float) -> float:
    """(2p - sin 2p) / (4 sin^2 p), increasing from 0 to +inf on [0, pi)."""
    if p == 0.0:
        return 0.0
    s = math.sin(p)
    return x_minus_sin(2.0 * p) / (4.0 * s * s)


def _solve_p(r: float, az: float) -> tuple[float, float]:
    """Root p of mu(p) = az / r^2 in [0, pi), returned with sin(p) / r.

    Past p = pi/2 the unknown is d = pi - p, so that sin p = sin d keeps full
    relative accuracy as the point approaches the z-axis.
    """
    u = r / math.sqrt(az)  # mu(p) = 1/u^2
    if u * u >= 4.0 / math.pi:
        p = bisect(lambda p: mu(p) - az / (r * r), 0.0, 0.5 * math.pi, xtol=P_XTOL, maxiter=500)
        return p, math.sin(p) / r
    if u < NEAR_AXIS:
        # d = u sqrt(pi/2) (1 + O(u^2)); avoids dividing through subnormals
        k = math.sqrt(0.5 * math.pi)
        return math.pi - u * k, k / math.sqrt(az)

    # sqrt(2p - sin 2p) u - 2 sin p, in terms of d: decreasing on (0, pi/2]
    def g(d):
        return math.sqrt(2.0 * (math.pi - d) + math.sin(2.0 * d)) * u - 2.0 * math.sin(d)

    d = bisect(g, 0.0, 0.5 * math.pi, xtol=P_XTOL * u, maxiter=500)
    return math.pi - d, math.sin(d) / r


def solve_geodesic(q: HPoint) -> DistanceResult:
    """Sub-Riemannian distance from the origin to q and the minimizing geodesics."""
    x, y, z = float(q.x), float(q.y), float(q.z)
    r = math.hypot(x, y)
    if r == 0.0 and z == 0.0:
        return DistanceResult(0.0)
    if z == 0.0:
        return DistanceResult(r, (GeodesicParam(math.atan2(y, x), 0.0, r),))
    sz = 1.0 if z > 0 else -1.0
    if r == 0.0:
        d = math.sqrt(TWO_PI * abs(z))
        return DistanceResult(d, (GeodesicParam(0.0, sz * TWO_PI / d, d),), family=True)
    # z < 0 by the reflection (x, y, z) -> (x, -y, -z), theta0 -> -theta0, h3 -> -h3
    p, k = _solve_p(r, abs(z))
    d = r if p == 0.0 else p / k
    h3 = sz * 2.0 * k
    theta0 = math.atan2(y, x) - sz * p
    return DistanceResult(d, (GeodesicParam(theta0, h3, d),))


def distance(x: float, y: float, z: float) -> float:
    return solve_geodesic(HPoint(x, y, z)).distance
