"""Numerical vector-field calculus on R^n charts.

Lie brackets (Jacobian formula and flow commutator), left-normed iterated
brackets, the Lie-algebra rank condition at a point and a Frobenius
involutivity check.

Derivatives come from, in order of preference: an analytic Jacobian
attached to the field, forward-mode autodiff when the field is written
with ``jax.numpy`` (``traceable=True``), and central finite differences.
Autodiff keeps nested brackets exact to roundoff; finite differences of
finite differences do not, so opaque fields are fine for single brackets
but give noisy iterated ones.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import jax
import jax.numpy as jnp
import numpy as np

from ._numeric import EPS, numeric_rank

jax.config.update("jax_enable_x64", True)

DEFAULT_MAX_DEPTH = 4
FLOW_STEPS = 100
INVOLUTIVE_RTOL = 1e-6
INVOLUTIVE_ATOL = 1e-9


class FlowDivergenceError(RuntimeError):
    pass


class DependentFrameError(ValueError):
    def __init__(self, point):
        self.point = np.asarray(point, dtype=float)
        super().__init__(f"fields are linearly dependent at {self.point.tolist()}")


@dataclass(frozen=True, eq=False)
class VectorField:
    """A smooth vector field on an open subset of R^dim.

    ``eval`` maps a point to the tangent vector there. ``jac`` is an
    optional analytic Jacobian. Set ``traceable`` when ``eval`` is
    written with ``jax.numpy`` so that derivatives are taken by autodiff.
    """

    dim: int
    eval: Callable
    jac: Callable | None = None
    traceable: bool = False
    name: str = ""
    _compiled: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if self.traceable:
            fn = self._compiled.get("eval")
            if fn is None:
                fn = self._compiled.setdefault("eval", jax.jit(self.eval))
            return np.asarray(fn(q), dtype=float)
        return np.asarray(self.eval(q), dtype=float)

    def jacobian(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if self.jac is not None:
            return np.asarray(self.jac(q), dtype=float)
        if self.traceable:
            fn = self._compiled.get("jac")
            if fn is None:
                fn = self._compiled.setdefault("jac", jax.jit(jax.jacfwd(self.eval)))
            return np.asarray(fn(q), dtype=float)
        return fd_jacobian(self, q)

    def __neg__(self) -> "VectorField":
        jac = None if self.jac is None else (lambda q, j=self.jac: -np.asarray(j(q)))
        return VectorField(self.dim, lambda q, f=self.eval: -f(q), jac,
                           self.traceable, f"-{self.name}" if self.name else "")


def fd_jacobian(V: VectorField, q: np.ndarray) -> np.ndarray:
    """Central differences with step eps^(1/3) * max(1, |q_i|)."""
    q = np.asarray(q, dtype=float)
    J = np.empty((V.dim, q.shape[0]))
    base = EPS ** (1.0 / 3.0)
    for i in range(q.shape[0]):
        h = base * max(1.0, abs(q[i]))
        qp = q.copy()
        qm = q.copy()
        qp[i] += h
        qm[i] -= h
        J[:, i] = (V(qp) - V(qm)) / (qp[i] - qm[i])
    return J


def _check_dims(V: VectorField, W: VectorField, q=None):
    if V.dim != W.dim:
        raise ValueError(f"dimension mismatch: {V.dim} vs {W.dim}")
    if q is not None and np.shape(q) != (V.dim,):
        raise ValueError(f"point has shape {np.shape(q)}, expected ({V.dim},)")


def bracket(V: VectorField, W: VectorField, q) -> np.ndarray:
    """[V, W](q) = DW(q) V(q) - DV(q) W(q)."""
    _check_dims(V, W, q)
    q = np.asarray(q, dtype=float)
    return W.jacobian(q) @ V(q) - V.jacobian(q) @ W(q)


def bracket_field(V: VectorField, W: VectorField) -> VectorField:
    """The vector field [V, W] as a new VectorField."""
    _check_dims(V, W)
    name = f"[{V.name},{W.name}]" if V.name and W.name else ""
    if V.traceable and W.traceable:
        fv, fw = V.eval, W.eval

        def ev(q):
            _, dw = jax.jvp(fw, (q,), (fv(q),))
            _, dv = jax.jvp(fv, (q,), (fw(q),))
            return dw - dv

        return VectorField(V.dim, ev, traceable=True, name=name)
    return VectorField(V.dim, lambda q: bracket(V, W, q), name=name)


def _rk4_flow(V: VectorField, q: np.ndarray, t: float, steps: int) -> np.ndarray:
    h = t / steps
    for _ in range(steps):
        k1 = V(q)
        k2 = V(q + 0.5 * h * k1)
        k3 = V(q + 0.5 * h * k2)
        k4 = V(q + h * k3)
        q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(q)):
            raise FlowDivergenceError(f"flow of {V.name or 'field'} diverged")
    return q


def commutator_curve(V: VectorField, W: VectorField, q, t: float, steps: int = FLOW_STEPS) -> np.ndarray:
    """gamma(t) = e^{-tW} o e^{-tV} o e^{tW} o e^{tV}(q), each leg by RK4."""
    _check_dims(V, W, q)
    p = np.asarray(q, dtype=float)
    p = _rk4_flow(V, p, t, steps)
    p = _rk4_flow(W, p, t, steps)
    p = _rk4_flow(V, p, -t, steps)
    p = _rk4_flow(W, p, -t, steps)
    return p


def bracket_by_flows(V: VectorField, W: VectorField, q, t: float, steps: int = FLOW_STEPS) -> np.ndarray:
    """(gamma(t) - q) / t^2, a first-order estimate of [V, W](q)."""
    if t <= 0:
        raise ValueError("t must be positive")
    q = np.asarray(q, dtype=float)
    return (commutator_curve(V, W, q, t, steps) - q) / t**2


@dataclass(frozen=True)
class BracketTree:
    """Left-normed bracket [f_{iN}, [..., [f_{i2}, f_{i1}]...]].

    ``indices`` is (i_N, ..., i_2, i_1), outermost first.
    """

    indices: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.indices)

    @property
    def leaves(self) -> tuple[int, ...]:
        return self.indices

    @property
    def structure(self):
        """Nested pairs (outer, inner); a bare int for depth 1."""
        t = self.indices[-1]
        for i in reversed(self.indices[:-1]):
            t = (i, t)
        return t

    def label(self, names: Sequence[str] | None = None) -> str:
        def nm(i):
            return names[i] if names else f"f{i}"

        s = nm(self.indices[-1])
        for i in reversed(self.indices[:-1]):
            s = f"[{nm(i)},{s}]"
        return s

    def __str__(self) -> str:
        return self.label()


def left_normed_trees(m: int, max_depth: int):
    """All left-normed trees up to max_depth, depth-major.

    Trees whose innermost bracket is [f_i, f_i] vanish identically and are skipped.
    """
    for depth in range(1, max_depth + 1):
        for idx in itertools.product(range(m), repeat=depth):
            if depth >= 2 and idx[-1] == idx[-2]:
                continue
            yield BracketTree(idx)


@dataclass(frozen=True)
class LarcResult:
    """Rank of the bracket span at a point.

    The rank is a certified lower bound on dim Lie_q: numerical
    independence is robust, numerical dependence is not a proof.
    """

    rank: int
    basis: tuple[BracketTree, ...]
    vectors: np.ndarray
    dim: int
    max_depth: int
    full_rank_depth: int | None

    @property
    def full_rank(self) -> bool:
        return self.rank == self.dim


def larc_rank(fields: Sequence[VectorField], q, max_depth: int = DEFAULT_MAX_DEPTH) -> LarcResult:
    """Greedy independent subset of left-normed brackets evaluated at q."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if not fields:
        raise ValueError("need at least one field")
    n = fields[0].dim
    for f in fields[1:]:
        _check_dims(fields[0], f)
    q = np.asarray(q, dtype=float)
    traceable = all(f.traceable for f in fields)

    cache: dict[tuple[int, ...], VectorField] = {}

    def field_for(idx):
        if idx not in cache:
            if len(idx) == 1:
                cache[idx] = fields[idx[0]]
            else:
                cache[idx] = bracket_field(fields[idx[0]], field_for(idx[1:]))
        return cache[idx]

    basis: list[BracketTree] = []
    vecs: list[np.ndarray] = []
    rank = 0
    full_depth = None
    for tree in left_normed_trees(len(fields), max_depth):
        if rank == n:
            break
        if len(tree.indices) == 1:
            v = fields[tree.indices[0]](q)
        elif traceable:
            # one-shot values: eager autodiff beats compiling every tree
            v = np.asarray(field_for(tree.indices).eval(jnp.asarray(q)), dtype=float)
        else:
            # the outermost bracket is evaluated pointwise; inner ones are fields
            v = bracket(fields[tree.indices[0]], field_for(tree.indices[1:]), q)
        if not np.all(np.isfinite(v)):
            continue
        r, _ = numeric_rank(np.column_stack(vecs + [v]))
        if r > rank:
            rank = r
            basis.append(tree)
            vecs.append(v)
            if rank == n:
                full_depth = tree.depth
    mat = np.column_stack(vecs) if vecs else np.zeros((n, 0))
    return LarcResult(rank, tuple(basis), mat, n, max_depth, full_depth)


def is_bracket_generating(fields: Sequence[VectorField], q, max_depth: int = DEFAULT_MAX_DEPTH) -> bool:
    """Full-rank (bracket-generating) test at q: Lie_q spans the tangent space."""
    return larc_rank(fields, q, max_depth).full_rank


def is_involutive(fields: Sequence[VectorField], sample_points) -> bool:
    """Frobenius condition at each sample point.

    Every pairwise bracket must lie in the span of the frame, measured by
    the least-squares residual of projecting it onto that span.
    """
    m = len(fields)
    for f in fields[1:]:
        _check_dims(fields[0], f)
    for q in sample_points:
        q = np.asarray(q, dtype=float)
        F = np.column_stack([f(q) for f in fields])
        r, _ = numeric_rank(F)
        if r < m:
            raise DependentFrameError(q)
        for i in range(m):
            for j in range(i + 1, m):
                b = bracket(fields[i], fields[j], q)
                coef, *_ = np.linalg.lstsq(F, b, rcond=None)
                resid = float(np.linalg.norm(F @ coef - b))
                if resid > INVOLUTIVE_RTOL * float(np.linalg.norm(b)) + INVOLUTIVE_ATOL:
                    return False
    return True


def polynomial_field(coeffs: np.ndarray, powers: np.ndarray) -> VectorField:
    """V_i(q) = sum_t coeffs[i, t] * prod_j q_j ** powers[t, j], with analytic Jacobian.

    Convenience for tests and demos with random polynomial fields.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    powers = np.asarray(powers, dtype=int)
    n = coeffs.shape[0]

    def monomials(q):
        return np.prod(q[None, :] ** powers, axis=1)

    def ev(q):
        return coeffs @ monomials(np.asarray(q, dtype=float))

    def jac(q):
        q = np.asarray(q, dtype=float)
        dm = np.empty((powers.shape[0], n))
        for j in range(n):
            p = powers.copy()
            c = p[:, j].astype(float)
            p[:, j] = np.maximum(p[:, j] - 1, 0)
            dm[:, j] = c * np.prod(q[None, :] ** p, axis=1)
        return coeffs @ dm

    return VectorField(n, ev, jac)


def as_numpy_field(V: VectorField) -> VectorField:
    """Same field with autodiff disabled, forcing finite-difference Jacobians."""
    return VectorField(V.dim, lambda q: np.asarray(V(q)), None, False, V.name)


__all__ = [
    "BracketTree",
    "DependentFrameError",
    "FlowDivergenceError",
    "LarcResult",
    "VectorField",
    "as_numpy_field",
    "bracket",
    "bracket_by_flows",
    "bracket_field",
    "commutator_curve",
    "fd_jacobian",
    "is_bracket_generating",
    "is_involutive",
    "larc_rank",
    "left_normed_trees",
    "polynomial_field",
]
