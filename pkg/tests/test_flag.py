import numpy as np
import pytest

from riemopt import framework as fw
from riemopt.flag import FlagQuotient
from riemopt.linalg import BlockPartition, symf
from riemopt.problems import flag_quadratic_problem, random_spd_matrix
from riemopt.stiefel import Stiefel


def _flag(sizes, n=8, alpha0=1.0, alpha1=0.5, d=None):
    d = sum(sizes) if sizes else (d or 4)
    return FlagQuotient(n, BlockPartition(sizes, d), alpha0, alpha1)


def test_empty_partition_reduces_to_stiefel(rng):
    fl = _flag((), n=8, d=4)
    st = Stiefel(8, 4, 1.0, 0.5)
    y = fl.rand_point(rng)
    w = rng.standard_normal((8, 4))
    assert np.allclose(fl.project(y, w), st.project(y, w), atol=1e-13)
    assert np.allclose(fl.rgrad(y, w), st.rgrad(y, w), atol=1e-13)
    xi, eta = fl.rand_tangent(rng, y), fl.rand_tangent(rng, y)
    assert np.allclose(fl.gamma(y, xi, eta), st.gamma(y, xi, eta), atol=1e-13)
    hv = rng.standard_normal((8, 4))
    assert np.allclose(
        fl.rhess11(y, w, hv, xi), st.rhess11(y, w, hv, xi), atol=1e-12
    )


def test_full_block_is_grassmann(rng):
    fl = _flag((4,), n=9)
    y = fl.rand_point(rng)
    a = rng.standard_normal((4, 4))
    # vertical directions Y A annihilate completely
    assert np.allclose(fl.project(y, y @ a), 0.0, atol=1e-12)
    w = rng.standard_normal((9, 4))
    assert np.allclose(fl.project(y, w), w - y @ (y.T @ w), atol=1e-12)
    xi = fl.rand_tangent(rng, y)
    assert np.linalg.norm(y.T @ xi) <= 1e-12


def test_projection_horizontality_and_idempotence(rng):
    fl = _flag((2, 1), n=6)
    y = fl.rand_point(rng)
    w = rng.standard_normal((6, 3))
    h = fl.project(y, w)
    assert np.linalg.norm(symf(y.T @ h, fl.part)) <= 1e-12
    assert np.allclose(fl.project(y, h), h, atol=1e-12)
    # horizontal vectors are Stiefel-tangent
    st = Stiefel(6, 3)
    assert st.tangent_residual(y, h) <= 1e-12


def test_rgrad_of_point_direction_vanishes(rng):
    fl = _flag((2, 2), n=7, alpha0=0.3, alpha1=2.7)
    y = fl.rand_point(rng)
    assert np.allclose(fl.rgrad(y, y), 0.0, atol=1e-12)


def test_rgrad_quadratic_cost_fd(rng):
    fl = _flag((2, 2, 1), n=9, alpha0=1.0, alpha1=0.5)
    a = random_spd_matrix(rng, 9)
    lam = np.concatenate([np.full(s, float(fl.part.q - i)) for i, s in enumerate(fl.part.sizes)])
    prob = flag_quadratic_problem(a, lam)
    y = fl.rand_point(rng)
    xi = fl.rand_tangent(rng, y)
    rg = fl.rgrad(y, prob.egrad(y))
    assert fl.tangent_residual(y, rg) <= 1e-9
    h = 1e-6
    fd = (prob.cost(fl.retract(y, h * xi)) - prob.cost(fl.retract(y, -h * xi))) / (
        2 * h
    )
    assert abs(fl.inner(y, rg, xi) - fd) <= 1e-5 * max(1.0, abs(fd))


def test_gamma_trivial_and_reduction(rng):
    fl = _flag((2, 2), n=7)
    y = fl.rand_point(rng)
    eta = fl.rand_tangent(rng, y)
    assert np.allclose(fl.gamma(y, np.zeros((7, 4)), eta), 0.0, atol=1e-14)


def test_gamma_matches_framework(rng):
    for sizes, a0, a1 in [((2, 1), 1.0, 1.0), ((2, 2), 1.0, 0.5), ((3, 1), 0.3, 2.7)]:
        fl = _flag(sizes, n=8, alpha0=a0, alpha1=a1)
        y = fl.rand_point(rng)
        s = fl.ambient_structure(y)
        xi, eta = fl.rand_tangent(rng, y), fl.rand_tangent(rng, y)
        assert np.linalg.norm(fl.gamma(y, xi, eta) - fw.gamma(s, xi, eta)) <= 1e-10


def test_gamma_normal_directions_match_framework(rng):
    # equal parameters, frame-orthogonal arguments
    fl = _flag((2, 1), n=7, alpha0=1.3, alpha1=1.3)
    y = fl.rand_point(rng)
    s = fl.ambient_structure(y)
    w1, w2 = rng.standard_normal((7, 3)), rng.standard_normal((7, 3))
    xi = w1 - y @ (y.T @ w1)
    eta = w2 - y @ (y.T @ w2)
    assert np.linalg.norm(fl.gamma(y, xi, eta) - fw.gamma(s, xi, eta)) <= 1e-10


def test_gamma_asymmetry_is_exactly_the_vertical_defect(rng):
    """The symmetry defect equals Y (symf(xi^T eta) - symf(eta^T xi)) and
    is vertical, so it projects to zero."""
    fl = _flag((2, 2), n=9, alpha0=1.0, alpha1=0.5)
    y = fl.rand_point(rng)
    xi, eta = fl.rand_tangent(rng, y), fl.rand_tangent(rng, y)
    diff = fl.gamma(y, xi, eta) - fl.gamma(y, eta, xi)
    b = xi.T @ eta
    want = y @ (symf(b, fl.part) - symf(b.T, fl.part))
    assert np.allclose(diff, want, atol=1e-12)
    assert np.linalg.norm(fl.project(y, diff)) <= 1e-9


def test_rhess11_trivial_and_reduction(rng):
    fl = _flag((2, 2), n=8, alpha0=1.0, alpha1=0.5)
    y = fl.rand_point(rng)
    xi = fl.rand_tangent(rng, y)
    z = np.zeros((8, 4))
    assert np.allclose(fl.rhess11(y, z, z, xi), 0.0)


def test_rhess11_matches_framework(rng):
    fl = _flag((2, 2, 1), n=9, alpha0=0.3, alpha1=2.7)
    for _ in range(10):
        y = fl.rand_point(rng)
        xi = fl.rand_tangent(rng, y)
        egrad = rng.standard_normal((9, 5))
        ehess = rng.standard_normal((9, 5))
        got = fl.rhess11(y, egrad, ehess, xi)
        want = fw.rhess11(fl.ambient_structure(y), egrad, ehess, xi)
        assert np.linalg.norm(got - want) <= 1e-9 * max(1, np.linalg.norm(want))
        assert fl.tangent_residual(y, got) <= 1e-9


def test_rhess11_fd_covariant_oracle(rng):
    fl = _flag((2, 1), n=7, alpha0=1.0, alpha1=0.5)
    a = random_spd_matrix(rng, 7)
    lam = np.array([2.0, 2.0, 1.0])
    prob = flag_quadratic_problem(a, lam)
    y = fl.rand_point(rng)
    xi = fl.rand_tangent(rng, y)
    h11 = fl.rhess11(y, prob.egrad(y), prob.ehess(y, xi), xi)

    def rgrad_at(z):
        return fl.rgrad(z, prob.egrad(z))

    h = 1e-6
    fdcov = (rgrad_at(fl.retract(y, h * xi)) - rgrad_at(fl.retract(y, -h * xi))) / (
        2 * h
    ) + fl.gamma(y, xi, rgrad_at(y))
    fdcov = fl.project(y, fdcov)
    assert np.linalg.norm(fdcov - h11) <= 1e-5 * max(1.0, np.linalg.norm(h11))


def test_rgrad_equivariance_under_group(rng):
    fl = _flag((2, 2), n=8, alpha0=1.0, alpha1=0.5)
    a = random_spd_matrix(rng, 8)
    lam = np.array([2.0, 2.0, 1.0, 1.0])
    prob = flag_quadratic_problem(a, lam)
    y = fl.rand_point(rng)
    u = fl.rand_group_element(rng)
    # group-invariance of the cost
    assert abs(prob.cost(y @ u) - prob.cost(y)) <= 1e-9 * max(1, abs(prob.cost(y)))
    moved = fl.rgrad(y @ u, prob.egrad(y @ u))
    assert np.linalg.norm(moved - fl.rgrad(y, prob.egrad(y)) @ u) <= 1e-9
