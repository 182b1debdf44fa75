"""Riemannian optimization drivers.

Trust-region with a truncated-CG subproblem and steepest descent with
Armijo backtracking.  Both operate purely through the manifold contract
(gradient, Hessian product, retraction, metric inner product); all inner
geometry uses the manifold metric at the current point, never the
ambient one.  Runs are deterministic given the starting point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Any, List, Optional

from .errors import InvariantError, ParameterError, StagnationError
from .manifold import AmbientProblem, Manifold

POINT_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    max_outer_iterations: int = 200
    gradient_norm_tolerance: float = 1e-8
    initial_radius: Optional[float] = None  # default: typical_dist / 8
    max_radius: Optional[float] = None  # default: typical_dist
    rho_accept: float = 0.1
    rho_expand: float = 0.75
    radius_shrink: float = 0.25
    radius_grow: float = 2.0
    max_inner_iterations: Optional[int] = None  # default: manifold dimension
    kappa: float = 0.1
    theta: float = 1.0
    # Shift guarding the acceptance ratio against cancellation near optima.
    rho_regularization: float = 1e3
    initial_step: float = 1.0
    backtrack_factor: float = 0.5
    armijo_coefficient: float = 1e-4
    max_backtracks: int = 60

    def __post_init__(self):
        positive = (
            self.max_outer_iterations,
            self.gradient_norm_tolerance,
            self.rho_accept,
            self.rho_expand,
            self.radius_shrink,
            self.radius_grow,
            self.kappa,
            self.theta,
            self.initial_step,
            self.backtrack_factor,
            self.armijo_coefficient,
            self.max_backtracks,
        )
        if any(v <= 0 for v in positive):
            raise ParameterError("solver parameters must be positive")
        if not self.rho_accept < self.rho_expand < 1.0:
            raise ParameterError("need rho_accept < rho_expand < 1")
        if self.initial_radius is not None and self.initial_radius <= 0:
            raise ParameterError("initial_radius must be positive")
        if self.max_radius is not None and self.max_radius <= 0:
            raise ParameterError("max_radius must be positive")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    cost: float
    grad_norm: float
    radius_or_step: float
    inner_iterations: int
    rho: float
    ms: float


@dataclass
class SolveResult:
    point: Any
    records: List[IterationRecord]
    converged: bool
    final_cost: float
    final_grad_norm: float

    def __iter__(self):
        # Allows ``x, records = solve(...)`` unpacking.
        return iter((self.point, self.records))


@dataclass(frozen=True)
class TcgResult:
    step: Any
    hess_step: Any
    iterations: int
    reason: str


def truncated_cg_subproblem(
    manifold: Manifold,
    x,
    grad,
    hess_vec_fn,
    radius: float,
    cfg: SolverConfig,
) -> TcgResult:
    """Steihaug-Toint truncated CG for the trust-region model.

    Starts from the zero step, so the model decrease is at least the
    Cauchy-point decrease; negative curvature and the radius both
    truncate to the boundary.
    """
    inner = manifold.inner
    max_inner = cfg.max_inner_iterations
    if max_inner is None:
        max_inner = manifold.dim()
    eta = manifold.zero_tangent(x)
    h_eta = manifold.zero_tangent(x)
    r = grad
    r_r = inner(x, r, r)
    norm_r0 = r_r ** 0.5
    if norm_r0 == 0.0:
        return TcgResult(eta, h_eta, 0, "zero gradient")
    delta = -r
    model_value = 0.0
    reason = "max inner iterations"
    iterations = 0
    # Step norms are measured exactly (not via scalar recurrences) and the
    # residual is refreshed periodically: long inner runs near the noise
    # floor otherwise drift off the trust region and return junk steps.
    refresh_every = 50
    for j in range(max_inner):
        iterations = j + 1
        h_delta = hess_vec_fn(delta)
        d_hd = inner(x, delta, h_delta)
        e_d = inner(x, eta, delta)
        d_d = inner(x, delta, delta)
        e_e = inner(x, eta, eta)
        alpha = r_r / d_hd if d_hd != 0.0 else float("inf")
        e_e_new = e_e + 2.0 * alpha * e_d + alpha ** 2 * d_d
        if d_hd <= 0.0 or e_e_new >= radius ** 2:
            tau = (-e_d + (e_d ** 2 + d_d * (radius ** 2 - e_e)) ** 0.5) / d_d
            eta = eta + tau * delta
            h_eta = h_eta + tau * h_delta
            reason = "negative curvature" if d_hd <= 0.0 else "boundary"
            break
        eta_new = eta + alpha * delta
        h_eta_new = h_eta + alpha * h_delta
        new_model_value = inner(x, eta_new, grad) + 0.5 * inner(
            x, eta_new, h_eta_new
        )
        if new_model_value >= model_value:
            reason = "model increase"
            break
        eta, h_eta, model_value = eta_new, h_eta_new, new_model_value
        if (j + 1) % refresh_every == 0:
            h_eta = hess_vec_fn(eta)
            r = grad + h_eta
        else:
            r = r + alpha * h_delta
        r_r_new = inner(x, r, r)
        norm_r = r_r_new ** 0.5
        if norm_r <= norm_r0 * min(norm_r0 ** cfg.theta, cfg.kappa):
            reason = (
                "target (superlinear)"
                if norm_r0 ** cfg.theta < cfg.kappa
                else "target (linear)"
            )
            break
        beta = r_r_new / r_r
        delta = -r + beta * delta
        r_r = r_r_new
    return TcgResult(eta, h_eta, iterations, reason)


def _check_iterate(manifold, point, iteration):
    res = manifold.point_residual(point)
    if res > POINT_RESIDUAL_TOL:
        raise InvariantError(
            f"iterate left the manifold at iteration {iteration}"
            f" (residual {res:.3e})"
        )


def trust_region(
    manifold: Manifold,
    problem: AmbientProblem,
    x0,
    cfg: SolverConfig = SolverConfig(),
) -> SolveResult:
    """Riemannian trust-region method.

    Terminates when the Riemannian gradient norm falls below the
    tolerance or the outer iteration cap is reached; every accepted step
    decreases the cost.
    """
    x = x0
    max_radius = cfg.max_radius if cfg.max_radius is not None else manifold.typical_dist()
    radius = (
        cfg.initial_radius if cfg.initial_radius is not None else max_radius / 8.0
    )
    records: List[IterationRecord] = []

    fx = problem.cost(x)
    grad = manifold.rgrad(x, problem.egrad(x))
    grad_norm = manifold.norm(x, grad)

    converged = grad_norm <= cfg.gradient_norm_tolerance
    iteration = 0
    while not converged and iteration < cfg.max_outer_iterations:
        tic = time.perf_counter()
        iteration += 1
        egrad = problem.egrad(x)

        def hess_vec(xi, _x=x, _egrad=egrad):
            return manifold.rhess11(_x, _egrad, problem.ehess(_x, xi), xi)

        tcg = truncated_cg_subproblem(manifold, x, grad, hess_vec, radius, cfg)
        step = tcg.step

        x_prop = manifold.retract(x, step)
        fx_prop = problem.cost(x_prop)

        model_decrease = -(
            manifold.inner(x, grad, step) + 0.5 * manifold.inner(x, step, tcg.hess_step)
        )
        # Shift both sides of the ratio to absorb cancellation error when
        # the decrease is at rounding level (standard TR safeguard).
        regularizer = max(1.0, abs(fx)) * 2.220446049250313e-16 * cfg.rho_regularization
        rho_num = fx - fx_prop + regularizer
        rho_den = model_decrease + regularizer
        model_decreased = rho_den >= 0.0
        rho = rho_num / rho_den if rho_den != 0.0 else float("-inf")

        if rho < 0.25 or not model_decreased:
            radius *= cfg.radius_shrink
        elif rho > cfg.rho_expand and tcg.reason in ("negative curvature", "boundary"):
            radius = min(cfg.radius_grow * radius, max_radius)

        accepted = model_decreased and rho > cfg.rho_accept
        if accepted:
            x = x_prop
            fx = fx_prop
            _check_iterate(manifold, x, iteration)
            grad = manifold.rgrad(x, problem.egrad(x))
            grad_norm = manifold.norm(x, grad)

        ms = (time.perf_counter() - tic) * 1e3
        records.append(
            IterationRecord(
                iteration=iteration,
                cost=fx,
                grad_norm=grad_norm,
                radius_or_step=radius,
                inner_iterations=tcg.iterations,
                rho=rho,
                ms=ms,
            )
        )
        converged = grad_norm <= cfg.gradient_norm_tolerance

    return SolveResult(
        point=x,
        records=records,
        converged=converged,
        final_cost=fx,
        final_grad_norm=grad_norm,
    )


def steepest_descent(
    manifold: Manifold,
    problem: AmbientProblem,
    x0,
    cfg: SolverConfig = SolverConfig(),
) -> SolveResult:
    """Riemannian gradient descent with Armijo backtracking.

    The cost strictly decreases on every accepted step; a step-size
    underflow raises :class:`StagnationError` carrying the last iterate.
    """
    x = x0
    fx = problem.cost(x)
    grad = manifold.rgrad(x, problem.egrad(x))
    grad_norm = manifold.norm(x, grad)
    records: List[IterationRecord] = []
    step_size = cfg.initial_step / (1.0 + grad_norm)

    converged = grad_norm <= cfg.gradient_norm_tolerance
    iteration = 0
    while not converged and iteration < cfg.max_outer_iterations:
        tic = time.perf_counter()
        iteration += 1
        # Warm-start from twice the last accepted step.
        t = 2.0 * step_size
        backtracks = 0
        while True:
            x_prop = manifold.retract(x, -t * grad)
            fx_prop = problem.cost(x_prop)
            if fx_prop <= fx - cfg.armijo_coefficient * t * grad_norm ** 2:
                break
            backtracks += 1
            if backtracks > cfg.max_backtracks:
                raise StagnationError(
                    f"line search underflow at iteration {iteration}", iterate=x
                )
            # Safeguarded quadratic interpolation of t -> f(x - t grad).
            denom = 2.0 * (fx_prop - fx + t * grad_norm ** 2)
            if denom > 0.0:
                t_min = t * t * grad_norm ** 2 / denom
                t = min(max(t_min, 0.1 * t), cfg.backtrack_factor * t)
            else:
                t *= cfg.backtrack_factor
        step_size = t
        x = x_prop
        fx = fx_prop
        _check_iterate(manifold, x, iteration)
        grad = manifold.rgrad(x, problem.egrad(x))
        grad_norm = manifold.norm(x, grad)
        ms = (time.perf_counter() - tic) * 1e3
        records.append(
            IterationRecord(
                iteration=iteration,
                cost=fx,
                grad_norm=grad_norm,
                radius_or_step=t,
                inner_iterations=backtracks,
                rho=0.0,
                ms=ms,
            )
        )
        converged = grad_norm <= cfg.gradient_norm_tolerance

    return SolveResult(
        point=x,
        records=records,
        converged=converged,
        final_cost=fx,
        final_grad_norm=grad_norm,
    )


def with_overrides(cfg: SolverConfig, **kwargs) -> SolverConfig:
    """Copy a config with selected fields replaced."""
    return replace(cfg, **kwargs)
