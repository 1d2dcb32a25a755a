"""Euler elastica extremals.

Normal extremals reduce to the pendulum beta' = h2, h2' = -r sin(beta) with
energy E = h2^2/2 - r cos(beta); the curve follows x' = cos(theta),
y' = sin(theta), theta' = h2, so theta = beta - beta0 + theta0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dubins import PlanarPose

REGIME_TOL = 1e-12
DEFAULT_STEP = 1e-3


class ElasticaRegime(enum.Enum):
    LINE = "Line"
    INFLECTIONAL = "Inflectional"
    CRITICAL_SEPARATRIX = "CriticalSeparatrix"
    NON_INFLECTIONAL = "NonInflectional"
    CIRCLE_OR_LINE = "CircleOrLine"


@dataclass(frozen=True)
class PendulumState:
    beta: float
    h2: float


@dataclass(frozen=True)
class ElasticaParams:
    r: float
    beta0: float
    h2_0: float
    length: float = 1.0
    theta0: float = 0.0  # rigid rotation of the output; the normal form uses 0

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError("r must be nonnegative")
        if not self.length > 0:
            raise ValueError("length must be positive")

    @property
    def energy(self) -> float:
        return pendulum_energy(self.r, self.beta0, self.h2_0)


def pendulum_energy(r, beta, h2):
    return 0.5 * np.square(h2) - r * np.cos(beta)


def classify(p: ElasticaParams) -> ElasticaRegime:
    r, E = p.r, p.energy
    if r <= REGIME_TOL:
        return ElasticaRegime.CIRCLE_OR_LINE
    if abs(E + r) <= REGIME_TOL:
        return ElasticaRegime.LINE
    if abs(E - r) <= REGIME_TOL:
        return ElasticaRegime.CRITICAL_SEPARATRIX
    if E > r:
        return ElasticaRegime.NON_INFLECTIONAL
    return ElasticaRegime.INFLECTIONAL


@dataclass(frozen=True)
class ElasticaCurve:
    """Uniform samples of an extremal; arrays share the arclength grid t."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    beta: np.ndarray
    h2: np.ndarray
    r: float = 0.0

    def __len__(self) -> int:
        return self.t.shape[0]

    def samples(self) -> list[tuple[PlanarPose, PendulumState]]:
        return [(PlanarPose(float(x), float(y), float(th)), PendulumState(float(b), float(h)))
                for x, y, th, b, h in zip(self.x, self.y, self.theta, self.beta, self.h2)]

    def poses(self) -> list[PlanarPose]:
        return [PlanarPose(float(x), float(y), float(th))
                for x, y, th in zip(self.x, self.y, self.theta)]

    def energy(self) -> np.ndarray:
        return pendulum_energy(self.r, self.beta, self.h2)


def _rhs(state: np.ndarray, r: float) -> np.ndarray:
    _, _, th, beta, h2 = state
    return np.array([math.cos(th), math.sin(th), h2, h2, -r * math.sin(beta)])


def default_steps(length: float, step: float = DEFAULT_STEP) -> int:
    return max(1, int(math.ceil(length / step)))


def integrate_extremal(p: ElasticaParams, n_steps: int | None = None) -> ElasticaCurve:
    """RK4 on (x, y, theta, beta, h2) from the origin with fixed step length/n_steps."""
    if n_steps is None:
        n_steps = default_steps(p.length)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    h = p.length / n_steps
    r = p.r
    out = np.empty((n_steps + 1, 5))
    s = np.array([0.0, 0.0, p.theta0, p.beta0, p.h2_0])
    out[0] = s
    for i in range(1, n_steps + 1):
        k1 = _rhs(s, r)
        k2 = _rhs(s + 0.5 * h * k1, r)
        k3 = _rhs(s + 0.5 * h * k2, r)
        k4 = _rhs(s + h * k3, r)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i] = s
    t = np.linspace(0.0, p.length, n_steps + 1)
    return ElasticaCurve(t, *out.T, r=r)


def abnormal_extremal(length: float, n_samples: int = 101) -> ElasticaCurve:
    """The abnormal extremal: u = 0, the segment (t, 0) with heading 0."""
    if not length > 0:
        raise ValueError("length must be positive")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    t = np.linspace(0.0, length, n_samples)
    z = np.zeros_like(t)
    return ElasticaCurve(t, t.copy(), z, z.copy(), z.copy(), z.copy(), r=0.0)


def elastic_energy(curve: ElasticaCurve) -> float:
    """J = 1/2 int u^2 dt with u = h2, by the trapezoidal rule."""
    return float(np.trapezoid(0.5 * curve.h2**2, curve.t))


def unit_speed_residual(curve: ElasticaCurve) -> float:
    """max | x'^2 + y'^2 - 1 | at the samples, velocities from the vector field."""
    return float(np.max(np.abs(np.cos(curve.theta) ** 2 + np.sin(curve.theta) ** 2 - 1.0)))


def pendulum_period(curve: ElasticaCurve) -> float:
    """Mean period from upward zero crossings of h2 (linear interpolation)."""
    h = curve.h2
    idx = np.nonzero((h[:-1] < 0) & (h[1:] >= 0))[0]
    if idx.size < 2:
        raise ValueError("fewer than two full oscillations in the sample")
    tc = curve.t[idx] - h[idx] * (curve.t[idx + 1] - curve.t[idx]) / (h[idx + 1] - h[idx])
    return float(np.mean(np.diff(tc)))
