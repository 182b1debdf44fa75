import numpy as np
import pytest

from riemopt.errors import ParameterError, StagnationError
from riemopt.manifold import AmbientProblem, Manifold
from riemopt.solvers import (
    SolverConfig,
    steepest_descent,
    truncated_cg_subproblem,
    trust_region,
)
from riemopt.spd import SpdPoint, SymmetricPositiveDefinite, trace_plus_inverse_problem
from riemopt.sphere import Sphere, rayleigh_problem as sphere_rayleigh
from riemopt.stiefel import Stiefel, rayleigh_problem as stiefel_rayleigh
from riemopt.problems import flag_quadratic_problem, random_spd_matrix
from riemopt.flag import FlagQuotient
from riemopt.linalg import BlockPartition


class FlatSpace(Manifold):
    """Euclidean fixture: identity metric, retraction by addition."""

    def __init__(self, n):
        self.n = n
        self.name = f"flat({n})"

    def dim(self):
        return self.n

    def rand_point(self, rng):
        return rng.standard_normal((self.n, 1))

    def rand_ambient(self, rng, point):
        return rng.standard_normal((self.n, 1))

    def zero_tangent(self, point):
        return np.zeros((self.n, 1))

    def point_residual(self, point):
        return 0.0

    def tangent_residual(self, point, eta):
        return 0.0

    def metric_apply(self, point, omega):
        return omega

    def project(self, point, omega):
        return omega

    def rgrad(self, point, egrad):
        return egrad

    def gamma(self, point, xi, eta):
        return np.zeros_like(xi)

    def rhess11(self, point, egrad, ehess_vec, xi):
        return ehess_vec

    def retract(self, point, eta):
        return point + eta


def test_config_validation():
    with pytest.raises(ParameterError):
        SolverConfig(rho_accept=0.9, rho_expand=0.5)
    with pytest.raises(ParameterError):
        SolverConfig(gradient_norm_tolerance=-1.0)


# -- truncated CG ---------------------------------------------------------------

def test_tcg_newton_step_inside_huge_radius():
    flat = FlatSpace(3)
    h = np.diag([2.0, 3.0, 5.0])
    x = np.zeros((3, 1))
    grad = np.array([[1.0], [-2.0], [0.5]])
    res = truncated_cg_subproblem(
        flat, x, grad, lambda v: h @ v, radius=1e6, cfg=SolverConfig(kappa=1e-10)
    )
    newton = -np.linalg.solve(h, grad)
    assert np.linalg.norm(res.step - newton) <= 1e-9


def test_tcg_zero_gradient():
    flat = FlatSpace(3)
    res = truncated_cg_subproblem(
        flat,
        np.zeros((3, 1)),
        np.zeros((3, 1)),
        lambda v: v,
        radius=1.0,
        cfg=SolverConfig(),
    )
    assert np.linalg.norm(res.step) == 0.0
    assert res.iterations == 0


def test_tcg_negative_curvature_hits_boundary_with_cauchy_decrease():
    flat = FlatSpace(2)
    h = np.diag([1.0, -2.0])
    grad = np.array([[1.0], [1.0]])
    radius = 1.0
    res = truncated_cg_subproblem(
        flat, np.zeros((2, 1)), grad, lambda v: h @ v, radius, SolverConfig()
    )
    assert np.linalg.norm(res.step) == pytest.approx(radius, rel=1e-12)

    def model(s):
        return float((grad.T @ s)[0, 0]) + 0.5 * float((s.T @ h @ s)[0, 0])

    # Cauchy point: minimize the model along -grad within the radius.
    g_hg = float((grad.T @ h @ grad)[0, 0])
    g_norm = float(np.linalg.norm(grad))
    if g_hg <= 0:
        tau = 1.0
    else:
        tau = min(g_norm ** 3 / (radius * g_hg), 1.0)
    cauchy = -tau * radius / g_norm * grad
    assert model(res.step) <= model(cauchy) + 1e-12


# -- trust region ------------------------------------------------------------------

def test_trust_region_sphere_rayleigh(rng):
    sph = Sphere(3)
    prob = sphere_rayleigh(np.diag([1.0, 2.0, 3.0]))
    x0 = sph.rand_point(rng)
    result = trust_region(sph, prob, x0, SolverConfig())
    assert result.converged
    assert result.final_cost == pytest.approx(1.0, abs=1e-10)
    assert abs(abs(float(result.point[0, 0])) - 1.0) <= 1e-6
    costs = [r.cost for r in result.records]
    assert all(b <= a + 1e-15 for a, b in zip(costs, costs[1:]))


def test_trust_region_critical_point_returns_immediately():
    sph = Sphere(3)
    prob = sphere_rayleigh(np.diag([1.0, 2.0, 3.0]))
    x0 = np.array([[1.0], [0.0], [0.0]])
    result = trust_region(sph, prob, x0)
    assert result.converged
    assert result.records == []


def test_trust_region_flag_quadratic_superlinear(rng):
    part = BlockPartition((2, 2, 1), 5)
    fl = FlagQuotient(12, part, 1.0, 1.0)
    a = random_spd_matrix(rng, 12)
    lam = np.concatenate([np.full(s, float(part.q - i)) for i, s in enumerate(part.sizes)])
    prob = flag_quadratic_problem(a, lam)
    x0 = fl.rand_point(rng)
    result = trust_region(fl, prob, x0, SolverConfig(max_outer_iterations=100))
    assert result.converged
    assert result.final_grad_norm < 1e-8
    # all accepted iterates satisfy the frame invariant
    assert fl.point_residual(result.point) <= 1e-9


def test_trust_region_stiefel_invariants_along_run(rng):
    st = Stiefel(10, 3, 1.0, 0.5)
    prob = stiefel_rayleigh(random_spd_matrix(rng, 10))
    result = trust_region(st, prob, st.rand_point(rng), SolverConfig())
    assert result.converged
    assert st.point_residual(result.point) <= 1e-9


# -- steepest descent -----------------------------------------------------------------

def test_steepest_descent_spd_converges_to_identity(rng):
    spd = SymmetricPositiveDefinite(4)
    prob = trace_plus_inverse_problem()
    x0 = spd.rand_point(rng)
    cfg = SolverConfig(max_outer_iterations=400, gradient_norm_tolerance=1e-6)
    result = steepest_descent(spd, prob, x0, cfg)
    assert result.converged
    assert result.final_cost == pytest.approx(2 * 4, abs=1e-6)
    assert np.linalg.norm(result.point.p - np.eye(4)) <= 1e-4
    costs = [r.cost for r in result.records]
    assert all(b < a for a, b in zip(costs, costs[1:]))


def test_steepest_descent_zero_gradient_start():
    spd = SymmetricPositiveDefinite(3)
    prob = trace_plus_inverse_problem()
    result = steepest_descent(spd, prob, SpdPoint(np.eye(3)))
    assert result.converged
    assert result.records == []


def test_steepest_descent_metric_changes_path_not_minimum(rng):
    a = random_spd_matrix(rng, 8)
    x0 = Stiefel(8, 2).rand_point(rng)
    finals = []
    for alpha1 in (1.0, 0.5):
        st = Stiefel(8, 2, 1.0, alpha1)
        prob = stiefel_rayleigh(a)
        cfg = SolverConfig(max_outer_iterations=3000, gradient_norm_tolerance=1e-7)
        result = steepest_descent(st, prob, x0, cfg)
        assert result.converged
        finals.append(result.final_cost)
    assert finals[0] == pytest.approx(finals[1], abs=1e-6)


def test_steepest_descent_stagnation_error(rng):
    sph = Sphere(4)
    prob = sphere_rayleigh(np.diag([1.0, 2.0, 3.0, 4.0]))
    x0 = sph.rand_point(rng)
    cfg = SolverConfig(initial_step=1e18, max_backtracks=2, backtrack_factor=0.5)
    with pytest.raises(StagnationError) as err:
        steepest_descent(sph, prob, x0, cfg)
    assert err.value.iterate is not None
