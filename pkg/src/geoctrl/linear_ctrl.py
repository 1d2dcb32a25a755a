"""Linear control systems x' = A x + B u.

Matrix exponential, exact propagation under piecewise-constant controls,
the Kalman rank test, a controllability-Gramian cross-check and
finite-difference linearization at an equilibrium.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._numeric import EPS, numeric_rank

# Pade(13) numerator coefficients and the 1-norm bound for which it is
# accurate to unit roundoff without scaling (Higham 2005).
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152

GRAMIAN_PANELS = 1024
EQUILIBRIUM_TOL = 1e-8


class DimensionError(ValueError):
    pass


class EquilibriumError(ValueError):
    """Raised when linearize() is asked to work away from an equilibrium."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(
            f"(x0, u0) is not an equilibrium: ||f(x0, u0)||_inf = {residual:.3e} "
            f"> {EQUILIBRIUM_TOL:g}"
        )


def _as_matrix(M, name: str) -> np.ndarray:
    arr = np.array(M, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LinearSystem:
    """x' = A x + B u with A n-by-n and B n-by-k."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        B = _as_matrix(self.B, "B")
        if A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise DimensionError(f"A must be square, got {A.shape}")
        if B.shape[0] != A.shape[0] or B.shape[1] < 1:
            raise DimensionError(f"B must have {A.shape[0]} rows, got {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def k(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class ControllabilityReport:
    rank: int
    controllable: bool
    singular_values: tuple[float, ...]


@dataclass(frozen=True)
class PiecewiseConstant:
    """Control signal holding values[i] for durations[i], pieces back to back."""

    durations: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]

    def __init__(self, durations: Sequence[float], values: Sequence[Sequence[float]]):
        durations = tuple(float(d) for d in durations)
        vals = tuple(tuple(float(v) for v in np.atleast_1d(val)) for val in values)
        if len(durations) != len(vals):
            raise DimensionError("durations and values must have equal length")
        if any(d < 0 or not math.isfinite(d) for d in durations):
            raise ValueError("piece durations must be finite and nonnegative")
        if any(not all(math.isfinite(v) for v in val) for val in vals):
            raise ValueError("control values must be finite")
        object.__setattr__(self, "durations", durations)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: Sequence[float] | float, T: float) -> "PiecewiseConstant":
        return cls([T], [np.atleast_1d(value)])

    @property
    def horizon(self) -> float:
        return float(sum(self.durations))


def matrix_exponential(A, t: float = 1.0) -> np.ndarray:
    """e^{A t} by scaling and squaring with a degree-13 Pade approximant."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"matrix_exponential needs a square matrix, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    n = A.shape[0]
    M = A * float(t)
    norm1 = np.linalg.norm(M, 1)
    if norm1 == 0.0:
        return np.eye(n)
    s = 0
    if norm1 > _THETA13:
        s = max(0, int(math.ceil(math.log2(norm1 / _THETA13))))
        M = M / 2.0**s
    b = _PADE13
    ident = np.eye(n)
    M2 = M @ M
    M4 = M2 @ M2
    M6 = M2 @ M4
    U = M @ (M6 @ (b[13] * M6 + b[11] * M4 + b[9] * M2)
             + b[7] * M6 + b[5] * M4 + b[3] * M2 + b[1] * ident)
    V = (M6 @ (b[12] * M6 + b[10] * M4 + b[8] * M2)
         + b[6] * M6 + b[4] * M4 + b[2] * M2 + b[0] * ident)
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


def propagate(sys: LinearSystem, x0, u: PiecewiseConstant) -> np.ndarray:
    """State at the end of the control horizon, integrated exactly piece by piece.

    A constant piece of length dt maps x to e^{A dt} x + (int_0^dt e^{A s} ds) B u,
    read off the top block row of the exponential of [[A, B u], [0, 0]].
    """
    x = np.array(x0, dtype=float).reshape(-1)
    if x.shape[0] != sys.n:
        raise DimensionError(f"x0 has length {x.shape[0]}, expected {sys.n}")
    n = sys.n
    for dt, val in zip(u.durations, u.values):
        val = np.asarray(val, dtype=float)
        if val.shape[0] != sys.k:
            raise DimensionError(f"control piece has length {val.shape[0]}, expected {sys.k}")
        if dt == 0.0:
            continue
        if not np.any(val):
            x = matrix_exponential(sys.A, dt) @ x
            continue
        aug = np.zeros((n + 1, n + 1))
        aug[:n, :n] = sys.A
        aug[:n, n] = sys.B @ val
        E = matrix_exponential(aug, dt)
        x = E[:n, :n] @ x + E[:n, n]
    return x


def kalman_matrix(sys: LinearSystem) -> np.ndarray:
    """[B, AB, ..., A^{n-1} B]."""
    blocks = [sys.B]
    for _ in range(sys.n - 1):
        blocks.append(sys.A @ blocks[-1])
    return np.hstack(blocks)


def kalman_test(sys: LinearSystem) -> ControllabilityReport:
    rank, sigma = numeric_rank(kalman_matrix(sys))
    return ControllabilityReport(
        rank=rank,
        controllable=rank == sys.n,
        singular_values=tuple(float(s) for s in sigma),
    )


def _gramian_factor(sys: LinearSystem, T: float, panels: int) -> np.ndarray:
    # Simpson weights are positive, so W = F F^T with F = [sqrt(w_i) e^{-A t_i} B].
    if T <= 0:
        raise ValueError("Gramian horizon T must be positive")
    if panels % 2:
        raise ValueError("Simpson's rule needs an even number of panels")
    h = T / panels
    w = np.full(panels + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    w *= h / 3.0
    cols = [np.sqrt(w[i]) * (matrix_exponential(sys.A, -i * h) @ sys.B)
            for i in range(panels + 1)]
    return np.hstack(cols)


def controllability_gramian(sys: LinearSystem, T: float, panels: int = GRAMIAN_PANELS) -> np.ndarray:
    """W(T) = int_0^T e^{-At} B B^T e^{-A^T t} dt by composite Simpson."""
    F = _gramian_factor(sys, T, panels)
    return F @ F.T


def gramian_rank(sys: LinearSystem, T: float, panels: int = GRAMIAN_PANELS) -> int:
    """Numeric rank of the controllability Gramian on [0, T].

    The rank is taken from the quadrature square-root factor F (W = F F^T),
    whose singular values are the square roots of W's eigenvalues; this keeps
    weakly controllable directions well above roundoff.
    """
    rank, _ = numeric_rank(_gramian_factor(sys, T, panels))
    return rank


def _fd_jacobian(fun: Callable[[np.ndarray], np.ndarray], z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    f0 = np.asarray(fun(z), dtype=float)
    J = np.empty((f0.shape[0], z.shape[0]))
    base = EPS ** (1.0 / 3.0)
    for i in range(z.shape[0]):
        h = base * max(1.0, abs(z[i]))
        zp = z.copy()
        zm = z.copy()
        zp[i] += h
        zm[i] -= h
        J[:, i] = (np.asarray(fun(zp), dtype=float) - np.asarray(fun(zm), dtype=float)) / (zp[i] - zm[i])
    return J


def linearize(f: Callable[[np.ndarray, np.ndarray], np.ndarray], x0, u0) -> LinearSystem:
    """Central-difference linearization of x' = f(x, u) at an equilibrium (x0, u0)."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    f0 = np.asarray(f(x0, u0), dtype=float)
    if f0.shape != x0.shape:
        raise DimensionError(f"f returned shape {f0.shape}, expected {x0.shape}")
    residual = float(np.max(np.abs(f0))) if f0.size else 0.0
    if not residual <= EQUILIBRIUM_TOL:
        raise EquilibriumError(residual)
    A = _fd_jacobian(lambda x: f(x, u0), x0)
    B = _fd_jacobian(lambda u: f(x0, u), u0)
    return LinearSystem(A, B)
