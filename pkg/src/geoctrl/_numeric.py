"""Small numeric helpers shared across the solvers."""
from __future__ import annotations

import math

import numpy as np

EPS = float(np.finfo(float).eps)
TWO_PI = 2.0 * math.pi


def rank_threshold(sigma: np.ndarray, shape: tuple[int, int]) -> float:
    """Cutoff below which a singular value is treated as zero."""
    if sigma.size == 0:
        return 0.0
    return max(shape) * EPS * float(sigma[0])


def numeric_rank(M: np.ndarray) -> tuple[int, np.ndarray]:
    """Return (rank, singular values) with the max(m, n)*eps*sigma_max cutoff."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0, np.zeros(0)
    sigma = np.linalg.svd(M, compute_uv=False)
    tol = rank_threshold(sigma, M.shape)
    return int(np.count_nonzero(sigma > tol)), sigma


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    w = math.remainder(a, TWO_PI)
    if w <= -math.pi:
        w += TWO_PI
    return w


def mod2pi(a: float) -> float:
    """Normalize an angle to [0, 2*pi)."""
    w = math.fmod(a, TWO_PI)
    if w < 0.0:
        w += TWO_PI
    if w >= TWO_PI:
        w -= TWO_PI
    return w


def x_minus_sin(x: float) -> float:
    """x - sin(x) without cancellation for small |x|."""
    if abs(x) < 1.0:
        # alternating series x^3/3! - x^5/5! + ...; 12 terms reach eps for |x| < 1
        term = x**3 / 6.0
        total = term
        x2 = x * x
        k = 3
        while abs(term) > 1e-18 * abs(total) and k < 40:
            term *= -x2 / ((k + 1) * (k + 2))
            total += term
            k += 2
        return total
    return x - math.sin(x)
