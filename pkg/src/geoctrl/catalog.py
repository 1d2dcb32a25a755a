"""Built-in control systems: driftless frames for bracket/rank work and
nonlinear systems with controls for linearization."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import jax.numpy as jnp
import numpy as np
from scipy.spatial.transform import Rotation

from .vf_calculus import VectorField


@dataclass(frozen=True)
class FieldSystem:
    name: str
    fields: tuple[VectorField, ...]
    coords: tuple[str, ...]
    default_point: tuple[float, ...]
    sampler: Callable[[np.random.Generator], np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def field_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.fields)


def _vf(dim, fn, name):
    return VectorField(dim, fn, traceable=True, name=name)


def _box(lo, hi):
    def sample(rng):
        return rng.uniform(lo, hi)
    return sample


def heisenberg() -> FieldSystem:
    f1 = _vf(3, lambda q: jnp.array([1.0, 0.0, -q[1] / 2.0]), "f1")
    f2 = _vf(3, lambda q: jnp.array([0.0, 1.0, q[0] / 2.0]), "f2")
    return FieldSystem("heisenberg", (f1, f2), ("x", "y", "z"), (0.0, 0.0, 0.0),
                       _box([-2.0] * 3, [2.0] * 3))


def _car_fields():
    forward = _vf(3, lambda q: jnp.array([jnp.cos(q[2]), jnp.sin(q[2]), 0.0 * q[2]]), "f0")
    turn = _vf(3, lambda q: jnp.array([0.0, 0.0, 1.0]) + 0.0 * q, "f1")
    return forward, turn


def _car_sampler(rng):
    return np.array([rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-np.pi, np.pi)])


def dubins() -> FieldSystem:
    # drift f0 (unit speed forward) and steering f1
    f0, f1 = _car_fields()
    return FieldSystem("dubins", (f0, f1), ("x", "y", "theta"), (0.0, 0.0, 0.0), _car_sampler)


def reeds_shepp() -> FieldSystem:
    V, W = _car_fields()
    V = _vf(3, V.eval, "V")
    W = _vf(3, W.eval, "W")
    return FieldSystem("reeds-shepp", (V, W), ("x", "y", "theta"), (0.0, 0.0, 0.0), _car_sampler)


def se2() -> FieldSystem:
    f1, f2 = _car_fields()
    f1 = _vf(3, f1.eval, "f1")
    f2 = _vf(3, f2.eval, "f2")
    return FieldSystem("se2", (f1, f2), ("x", "y", "theta"), (0.0, 0.0, 0.0), _car_sampler)


def engel() -> FieldSystem:
    f1 = _vf(4, lambda q: jnp.array([1.0, 0.0, -q[1] / 2.0, -(q[0] ** 2 + q[1] ** 2) / 2.0]), "f1")
    f2 = _vf(4, lambda q: jnp.array([0.0, 1.0, q[0] / 2.0, 0.0 * q[0]]), "f2")
    return FieldSystem("engel", (f1, f2), ("x", "y", "z", "v"), (0.0,) * 4,
                       _box([-2.0] * 4, [2.0] * 4))


# R' = R (u E1 + v E2) for the sphere rolling without slipping or twisting
_E1 = np.array([[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
_E2 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


def _sphere_field(planar, gen, name):
    planar = jnp.asarray(planar)
    gen = jnp.asarray(gen)

    def ev(q):
        R = q[2:].reshape(3, 3)
        return jnp.concatenate([planar + 0.0 * q[:2], (R @ gen).reshape(-1)])

    return _vf(11, ev, name)


def _sphere_sampler(rng):
    R = Rotation.random(random_state=rng).as_matrix()
    return np.concatenate([rng.uniform(-2, 2, 2), R.reshape(-1)])


def rolling_sphere() -> FieldSystem:
    """(x, y, R) in R^2 x SO(3), embedded in R^11 as (x, y, row-major R)."""
    X1 = _sphere_field([1.0, 0.0], _E1, "X1")
    X2 = _sphere_field([0.0, 1.0], _E2, "X2")
    coords = ("x", "y") + tuple(f"R{i}{j}" for i in range(1, 4) for j in range(1, 4))
    point = (0.0, 0.0) + tuple(np.eye(3).reshape(-1))
    return FieldSystem("rolling-sphere", (X1, X2), coords, point, _sphere_sampler)


FIELD_SYSTEMS: dict[str, Callable[[], FieldSystem]] = {
    "heisenberg": heisenberg,
    "dubins": dubins,
    "reeds-shepp": reeds_shepp,
    "se2": se2,
    "engel": engel,
    "rolling-sphere": rolling_sphere,
}


def field_system(name: str) -> FieldSystem:
    try:
        return FIELD_SYSTEMS[name]()
    except KeyError:
        raise KeyError(f"unknown system {name!r}; choose from {sorted(FIELD_SYSTEMS)}") from None


# Nonlinear systems x' = f(x, u) for linearization.

def pendulum(x, u):
    return np.array([x[1], -np.sin(x[0]) + u[0]])


def train(x, u):
    return np.array([x[1], u[0]])


def oscillator(x, u):
    return np.array([x[1], -x[0] + u[0]])


CONTROL_SYSTEMS: dict[str, Callable] = {
    "pendulum": pendulum,
    "train": train,
    "oscillator": oscillator,
}
