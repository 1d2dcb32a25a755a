"""Time-optimal synthesis for the double integrator x1' = x2, x2' = u, |u| <= 1.

The switching curve Gamma is the union of the half-parabolas
x1 = x2^2/2 (x2 <= 0) and x1 = -x2^2/2 (x2 >= 0). Below Gamma the optimal
control is +1, above it -1; on Gamma the control that rides the curve
into the origin. Every optimal trajectory switches at most once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ON_CURVE_RTOL = 1e-12
ORIGIN_TOL = 1e-12


@dataclass(frozen=True)
class DIState:
    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError("state must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2])


@dataclass(frozen=True)
class DIPlan:
    """Bang with u_first on [0, t_switch], then -u_first until t_total."""

    u_first: int
    t_switch: float
    t_total: float

    def __post_init__(self):
        if self.u_first not in (-1, 0, 1):
            raise ValueError("u_first must be -1, 0 or +1")
        if not 0.0 <= self.t_switch <= self.t_total:
            raise ValueError("need 0 <= t_switch <= t_total")

    def control(self, t: float) -> int:
        return self.u_first if t <= self.t_switch else -self.u_first


def switching_function(s: DIState) -> float:
    """x1 + x2|x2|/2: zero on Gamma, positive above, negative below."""
    return s.x1 + 0.5 * s.x2 * abs(s.x2)


def _at_origin(s: DIState) -> bool:
    return abs(s.x1) <= ORIGIN_TOL and abs(s.x2) <= ORIGIN_TOL


def _on_curve(s: DIState, sigma: float) -> bool:
    return abs(sigma) <= ON_CURVE_RTOL * max(1.0, s.x2 * s.x2)


def feedback(s: DIState) -> int:
    """Optimal control at state s; 0 only at the target."""
    if _at_origin(s):
        return 0
    sigma = switching_function(s)
    if _on_curve(s, sigma):
        # on x1 = x2^2/2, x2 <= 0 ride in with +1; on the other branch with -1
        return 1 if s.x2 < 0 or (s.x2 == 0 and s.x1 > 0) else -1
    return -1 if sigma > 0 else 1


def min_time(s: DIState) -> DIPlan:
    """Closed-form optimal plan and minimum time from s to the origin."""
    if _at_origin(s):
        return DIPlan(0, 0.0, 0.0)
    x1, x2 = s.x1, s.x2
    sigma = switching_function(s)
    if _on_curve(s, sigma):
        T = abs(x2)
        return DIPlan(feedback(s), T, T)
    if sigma > 0:
        # u = -1 until meeting x1 = x2^2/2, x2 <= 0
        root = math.sqrt(x1 + 0.5 * x2 * x2)
        return DIPlan(-1, x2 + root, x2 + 2.0 * root)
    root = math.sqrt(-x1 + 0.5 * x2 * x2)
    return DIPlan(1, -x2 + root, -x2 + 2.0 * root)


def _arc(x1, x2, u, t):
    return x1 + x2 * t + 0.5 * u * t * t, x2 + u * t


def state_at(s: DIState, plan: DIPlan, t: float) -> DIState:
    """Closed-form state after following the plan for time t (clamped to t_total)."""
    t = min(max(t, 0.0), plan.t_total)
    if t <= plan.t_switch:
        return DIState(*_arc(s.x1, s.x2, plan.u_first, t))
    y1, y2 = _arc(s.x1, s.x2, plan.u_first, plan.t_switch)
    return DIState(*_arc(y1, y2, -plan.u_first, t - plan.t_switch))


def simulate(s: DIState, plan: DIPlan, n_samples: int) -> list[DIState]:
    """States at n_samples uniform times on [0, t_total]."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    times = np.linspace(0.0, plan.t_total, n_samples)
    return [state_at(s, plan, float(t)) for t in times]
