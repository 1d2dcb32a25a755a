import math

import jax
import jax.numpy as jnp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from geoctrl.catalog import field_system
from geoctrl.vf_calculus import (
    BracketTree,
    DependentFrameError,
    VectorField,
    as_numpy_field,
    bracket,
    bracket_by_flows,
    bracket_field,
    fd_jacobian,
    is_bracket_generating,
    is_involutive,
    larc_rank,
    left_normed_trees,
    polynomial_field,
)

POWERS = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [2, 0, 0], [1, 1, 0], [0, 1, 1], [0, 0, 2]])


def _quadratic(c):
    # c packs a constant (3), linear (3x3) and quadratic (3x3x3) part
    def ev(q):
        L = c[3:12].reshape(3, 3)
        Q = c[12:].reshape(3, 3, 3)
        return c[:3] + L @ q + jnp.einsum("ijk,j,k->i", Q, q, q)

    return VectorField(3, ev, traceable=True)


@jax.jit
def _jacobi_sum(a, b, c, q):
    X, Y, Z = _quadratic(a), _quadratic(b), _quadratic(c)
    return (bracket_field(X, bracket_field(Y, Z)).eval(q)
            + bracket_field(Y, bracket_field(Z, X)).eval(q)
            + bracket_field(Z, bracket_field(X, Y)).eval(q))


coeff_mats = st.lists(st.floats(-1, 1), min_size=3 * len(POWERS), max_size=3 * len(POWERS)).map(
    lambda xs: np.array(xs).reshape(3, len(POWERS)))
points = st.lists(st.floats(-1, 1), min_size=3, max_size=3).map(np.array)


@settings(max_examples=40, deadline=None)
@given(coeff_mats, coeff_mats, points)
def test_bracket_antisymmetric(a, b, q):
    V, W = polynomial_field(a, POWERS), polynomial_field(b, POWERS)
    assert np.max(np.abs(bracket(V, W, q) + bracket(W, V, q))) <= 1e-12


quad_coeffs = arrays(float, 39, elements=st.floats(-1, 1))


@settings(max_examples=60, deadline=None)
@given(quad_coeffs, quad_coeffs, quad_coeffs, points)
def test_jacobi_identity(a, b, c, q):
    total = np.asarray(_jacobi_sum(a, b, c, q))
    assert np.max(np.abs(total)) <= 1e-10


def test_polynomial_jacobian_matches_fd():
    rng = np.random.default_rng(0)
    V = polynomial_field(rng.uniform(-1, 1, (3, len(POWERS))), POWERS)
    q = rng.uniform(-1, 1, 3)
    np.testing.assert_allclose(V.jacobian(q), fd_jacobian(V, q), atol=1e-8)


def test_autodiff_and_fd_brackets_agree():
    sys_ = field_system("engel")
    f1, f2 = sys_.fields
    q = np.array([0.3, -0.7, 0.2, 1.1])
    exact = bracket(f1, f2, q)
    approx = bracket(as_numpy_field(f1), as_numpy_field(f2), q)
    np.testing.assert_allclose(approx, exact, atol=1e-8)


def test_heisenberg_bracket_is_vertical():
    f1, f2 = field_system("heisenberg").fields
    rng = np.random.default_rng(1)
    for _ in range(10):
        q = rng.uniform(-3, 3, 3)
        np.testing.assert_allclose(bracket(f1, f2, q), [0, 0, 1], atol=1e-8)


def test_reeds_shepp_bracket():
    V, W = field_system("reeds-shepp").fields
    rng = np.random.default_rng(2)
    for _ in range(20):
        q = np.array([*rng.uniform(-2, 2, 2), rng.uniform(-math.pi, math.pi)])
        th = q[2]
        np.testing.assert_allclose(bracket(V, W, q), [math.sin(th), -math.cos(th), 0], atol=1e-8)


def test_flow_commutator_first_order_convergence():
    V, W = field_system("reeds-shepp").fields
    q = np.array([0.1, -0.4, 0.7])
    exact = bracket(V, W, q)
    errs = [np.linalg.norm(bracket_by_flows(V, W, q, t) - exact) for t in (0.1, 0.05, 0.025, 0.0125)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(1.5 <= r <= 2.5 for r in ratios), ratios


def test_flow_commutator_heisenberg_exact():
    f1, f2 = field_system("heisenberg").fields
    est = bracket_by_flows(f1, f2, np.array([0.5, 0.2, -1.0]), 0.1)
    np.testing.assert_allclose(est, [0, 0, 1], atol=1e-10)


def test_flow_rejects_nonpositive_time():
    f1, f2 = field_system("heisenberg").fields
    with pytest.raises(ValueError):
        bracket_by_flows(f1, f2, np.zeros(3), 0.0)


def test_left_normed_tree_enumeration():
    trees = list(left_normed_trees(2, 3))
    assert [str(t) for t in trees] == ["f0", "f1", "[f0,f1]", "[f1,f0]",
                                       "[f0,[f0,f1]]", "[f0,[f1,f0]]", "[f1,[f0,f1]]", "[f1,[f1,f0]]"]
    t = BracketTree((2, 0, 1))
    assert t.depth == 3
    assert t.structure == (2, (0, 1))
    assert t.label(["a", "b", "c"]) == "[c,[a,b]]"


@pytest.mark.parametrize(
    "name,depth,rank",
    [
        ("heisenberg", 2, 3),
        ("dubins", 2, 3),
        ("se2", 2, 3),
        ("reeds-shepp", 2, 3),
        ("engel", 2, 3),
        ("engel", 3, 4),
        ("rolling-sphere", 2, 3),
        ("rolling-sphere", 3, 5),
    ],
)
def test_larc_ranks(name, depth, rank):
    sys_ = field_system(name)
    assert larc_rank(sys_.fields, sys_.default_point, depth).rank == rank
    q = sys_.sampler(np.random.default_rng(7))
    assert larc_rank(sys_.fields, q, depth).rank == rank


@pytest.mark.parametrize("name", ["heisenberg", "engel", "rolling-sphere"])
def test_larc_rank_monotone_in_depth(name):
    sys_ = field_system(name)
    ranks = [larc_rank(sys_.fields, sys_.default_point, d).rank for d in (1, 2, 3)]
    assert ranks == sorted(ranks)
    assert ranks[0] == 2


def test_larc_result_bookkeeping():
    sys_ = field_system("engel")
    res = larc_rank(sys_.fields, sys_.default_point, 4)
    assert res.full_rank and res.full_rank_depth == 3
    assert res.vectors.shape == (4, 4)
    assert len(res.basis) == 4
    assert is_bracket_generating(sys_.fields, sys_.default_point, 3)
    assert not is_bracket_generating(sys_.fields, sys_.default_point, 2)


def test_heisenberg_not_involutive():
    sys_ = field_system("heisenberg")
    rng = np.random.default_rng(3)
    assert not is_involutive(sys_.fields, [sys_.sampler(rng) for _ in range(5)])


def test_coordinate_frame_involutive():
    e1 = VectorField(3, lambda q: jnp.array([1.0, 0.0, 0.0]) + 0.0 * q, traceable=True)
    e2 = VectorField(3, lambda q: jnp.array([0.0, 1.0, 0.0]) + 0.0 * q, traceable=True)
    rng = np.random.default_rng(4)
    assert is_involutive([e1, e2], rng.uniform(-1, 1, (10, 3)))


def test_rescaled_frame_involutive():
    # {f, g f} together with a field commuting with f span an involutive distribution
    f = VectorField(3, lambda q: jnp.array([1.0, q[0], 0.0]), traceable=True)
    gf = VectorField(3, lambda q: (1.0 + q[2] ** 2) * jnp.array([1.0, q[0], 0.0]), traceable=True)
    e3 = VectorField(3, lambda q: jnp.array([0.0, 0.0, 1.0]) + 0.0 * q, traceable=True)
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1, 1, (10, 3))
    assert is_involutive([f, e3], pts)
    with pytest.raises(DependentFrameError):
        is_involutive([f, gf], pts)


def test_dimension_mismatch():
    a = VectorField(2, lambda q: q)
    b = VectorField(3, lambda q: q)
    with pytest.raises(ValueError):
        bracket(a, b, np.zeros(2))
