"""Property checks over any manifold implementing the contract.

Each check draws seeded random points and vectors, measures a scale-free
residual, and reports the worst trial.  Failures are reported, never
thrown: the harness is also used to confirm that deliberately broken
geometries are caught (negative controls).

Two tolerance regimes are kept apart deliberately: algebraic identities
(projection idempotence, nullspace residuals, self-adjointness, torsion)
must hold to 1e-9/1e-10, while anything measured through central finite
differences is limited by the scheme to about 1e-5.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .linalg import vec_inner, vec_norm
from .manifold import AmbientProblem, Manifold

ALGEBRAIC_TOL = 1e-9
TORSION_TOL = 1e-10
FD_TOL = 1e-5
DUALITY_TOL = 1e-8


def fd_step(point_scale: float) -> float:
    """Central-difference step scaled to the point."""
    return 1e-6 * (1.0 + point_scale)


def _point_scale(manifold, point) -> float:
    try:
        return manifold.ambient_norm(getattr(point, "p", point))
    except Exception:
        return 1.0


@dataclass(frozen=True)
class CheckReport:
    name: str
    manifold: str
    trials: int
    max_error: float
    tolerance: float
    passed: bool
    worst_seed: int

    def row(self) -> str:
        flag = "pass" if self.passed else "FAIL"
        return (
            f"{self.name:<24} {self.manifold:<44} trials={self.trials:<4}"
            f" max_err={self.max_error:.3e} tol={self.tolerance:.1e}"
            f" seed={self.worst_seed:<6} {flag}"
        )


def _report(name, manifold, errors, seeds, tol) -> CheckReport:
    worst = int(np.argmax(errors))
    return CheckReport(
        name=name,
        manifold=manifold.name,
        trials=len(errors),
        max_error=float(errors[worst]),
        tolerance=tol,
        passed=bool(errors[worst] <= tol),
        worst_seed=seeds[worst],
    )


def check_projection(
    manifold: Manifold, trials: int = 100, seed: int = 0
) -> CheckReport:
    """Nullspace/horizontality residual, idempotence, g*Pi self-adjointness."""
    errors, seeds = [], []
    for t in range(trials):
        s = seed + t
        rng = np.random.default_rng(s)
        x = manifold.rand_point(rng)
        omega = manifold.rand_ambient(rng, x)
        h = manifold.project(x, omega)
        scale = max(1.0, manifold.ambient_norm(omega))
        err = manifold.tangent_residual(x, h)
        err = max(err, manifold.ambient_norm(manifold.project(x, h) - h) / scale)
        # <g Pi w1, w2> must match <w1, g Pi w2>.
        w1 = manifold.rand_ambient(rng, x)
        w2 = manifold.rand_ambient(rng, x)
        lhs = vec_inner(manifold.metric_apply(x, manifold.project(x, w1)), w2)
        rhs = vec_inner(w1, manifold.metric_apply(x, manifold.project(x, w2)))
        err = max(err, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))
        errors.append(err)
        seeds.append(s)
    return _report("projection", manifold, errors, seeds, ALGEBRAIC_TOL)


def torsion_residual(manifold: Manifold, x, xi, eta) -> float:
    """Symmetry defect of the Christoffel function, seen by the fiber.

    For quotient geometries the raw defect is vertical (the integrability
    term of the submersion), so it is measured after projection.
    """
    g_xy = manifold.gamma(x, xi, eta)
    g_yx = manifold.gamma(x, eta, xi)
    scale = max(1.0, vec_norm(g_xy), vec_norm(g_yx))
    return manifold.ambient_norm(manifold.project(x, g_xy - g_yx)) / scale


def metric_compatibility_residual(manifold: Manifold, x, rng) -> float:
    """Finite-difference check of d/dt <xi, g eta> along a retracted curve.

    Fields are extended by projecting frozen ambient vectors at each
    curve point; any extension gives the same covariant derivative.
    """
    u = manifold.rand_tangent(rng, x)
    xi0 = manifold.rand_tangent(rng, x)
    eta0 = manifold.rand_tangent(rng, x)
    h = fd_step(_point_scale(manifold, x))

    def fields_at(t):
        c = manifold.retract(x, t * u)
        return c, manifold.project(c, xi0), manifold.project(c, eta0)

    cp, xip, etap = fields_at(h)
    cm, xim, etam = fields_at(-h)
    lhs = (manifold.inner(cp, xip, etap) - manifold.inner(cm, xim, etam)) / (2 * h)

    d_xi = (xip - xim) / (2 * h)
    d_eta = (etap - etam) / (2 * h)
    xi = manifold.project(x, xi0)
    eta = manifold.project(x, eta0)
    nabla_xi = d_xi + manifold.gamma(x, u, xi)
    nabla_eta = d_eta + manifold.gamma(x, u, eta)
    rhs = manifold.inner(x, nabla_xi, eta) + manifold.inner(x, xi, nabla_eta)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def covariant_range_residual(manifold: Manifold, x, rng) -> float:
    """The covariant derivative of a projected field must stay in the fiber.

    Catches a Christoffel function missing its projection-derivative
    term: that term is g-orthogonal to the fiber, invisible to metric
    pairings, but exactly what keeps D_u eta + Gamma(u, eta) horizontal.
    """
    u = manifold.rand_tangent(rng, x)
    eta0 = manifold.rand_tangent(rng, x)
    h = fd_step(_point_scale(manifold, x))
    etap = manifold.project(manifold.retract(x, h * u), eta0)
    etam = manifold.project(manifold.retract(x, -h * u), eta0)
    nabla = (etap - etam) / (2 * h) + manifold.gamma(x, u, manifold.project(x, eta0))
    return manifold.tangent_residual(x, nabla)


def check_connection_axioms(
    manifold: Manifold, trials: int = 20, seed: int = 0
) -> CheckReport:
    """Torsion (algebraic), metric compatibility, covariant range (FD-limited)."""
    errors, seeds = [], []
    for t in range(trials):
        s = seed + t
        rng = np.random.default_rng(s)
        x = manifold.rand_point(rng)
        xi = manifold.rand_tangent(rng, x)
        eta = manifold.rand_tangent(rng, x)
        torsion = torsion_residual(manifold, x, xi, eta)
        compat = metric_compatibility_residual(manifold, x, rng)
        in_fiber = covariant_range_residual(manifold, x, rng)
        # Normalize each residual by its own tolerance so a single max
        # carries the joint verdict.
        err = max(torsion / TORSION_TOL, compat / FD_TOL, in_fiber / FD_TOL)
        errors.append(err)
        seeds.append(s)
    report = _report("connection_axioms", manifold, errors, seeds, 1.0)
    return report


def check_hessian_duality(
    manifold: Manifold,
    problem: AmbientProblem,
    trials: int = 20,
    seed: int = 0,
) -> CheckReport:
    """Bilinear and operator Hessians must pair through the metric."""
    errors, seeds = [], []
    for t in range(trials):
        s = seed + t
        rng = np.random.default_rng(s)
        x = manifold.rand_point(rng)
        xi = manifold.rand_tangent(rng, x)
        eta = manifold.rand_tangent(rng, x)
        egrad = problem.egrad(x)
        h11 = manifold.rhess11(x, egrad, problem.ehess(x, xi), xi)
        e02 = vec_inner(problem.ehess(x, xi), eta)
        h02 = manifold.rhess02(x, egrad, e02, xi, eta)
        paired = manifold.inner(x, h11, eta)
        scale = max(1.0, abs(h02), abs(paired))
        err = abs(h02 - paired) / scale
        # Symmetry of the bilinear form.
        e02_t = vec_inner(problem.ehess(x, eta), xi)
        h02_t = manifold.rhess02(x, egrad, e02_t, eta, xi)
        err = max(err, abs(h02 - h02_t) / scale)
        errors.append(err)
        seeds.append(s)
    return _report("hessian_duality", manifold, errors, seeds, DUALITY_TOL)


def check_gradient_fd(
    manifold: Manifold,
    problem: AmbientProblem,
    trials: int = 20,
    seed: int = 0,
) -> CheckReport:
    """Defining relation of the gradient against cost differences."""
    errors, seeds = [], []
    for t in range(trials):
        s = seed + t
        rng = np.random.default_rng(s)
        x = manifold.rand_point(rng)
        xi = manifold.rand_tangent(rng, x)
        h = fd_step(_point_scale(manifold, x))
        fd = (
            problem.cost(manifold.retract(x, h * xi))
            - problem.cost(manifold.retract(x, -h * xi))
        ) / (2 * h)
        rg = manifold.rgrad(x, problem.egrad(x))
        pairing = manifold.inner(x, rg, xi)
        errors.append(abs(fd - pairing) / max(1.0, abs(fd), abs(pairing)))
        seeds.append(s)
    return _report("gradient_fd", manifold, errors, seeds, FD_TOL)


def run_checks(
    manifold: Manifold,
    problem: Optional[AmbientProblem] = None,
    trials: int = 50,
    seed: int = 0,
) -> List[CheckReport]:
    reports = [
        check_projection(manifold, trials, seed),
        check_connection_axioms(manifold, max(5, trials // 5), seed),
    ]
    if problem is not None:
        reports.append(check_hessian_duality(manifold, problem, max(5, trials // 5), seed))
        reports.append(check_gradient_fd(manifold, problem, max(5, trials // 5), seed))
    return reports


def default_suite(name: str, trials: int = 50, seed: int = 0) -> List[CheckReport]:
    """Named stock instances for the command-line checker."""
    from .flag import FlagQuotient
    from .linalg import BlockPartition, sym
    from .problems import flag_quadratic_problem, random_spd_matrix, weighted_pca_problem
    from .psd_fixed_rank import PsdFixedRank
    from .sphere import Sphere, rayleigh_problem as sphere_rayleigh
    from .spd import SymmetricPositiveDefinite, logdet_problem
    from .stiefel import Stiefel, rayleigh_problem as stiefel_rayleigh

    rng = np.random.default_rng(seed + 977)
    if name == "sphere":
        return run_checks(Sphere(8), sphere_rayleigh(sym(rng.standard_normal((8, 8)))), trials, seed)
    if name == "stiefel":
        return run_checks(
            Stiefel(8, 3, 1.0, 0.5),
            stiefel_rayleigh(random_spd_matrix(rng, 8)),
            trials,
            seed,
        )
    if name == "flag":
        part = BlockPartition((3, 2, 1), 6)
        lam = np.concatenate([np.full(s, float(part.q - i)) for i, s in enumerate(part.sizes)])
        return run_checks(
            FlagQuotient(10, part, 1.0, 0.5),
            flag_quadratic_problem(random_spd_matrix(rng, 10), lam),
            trials,
            seed,
        )
    if name == "spd":
        return run_checks(
            SymmetricPositiveDefinite(6),
            logdet_problem(random_spd_matrix(rng, 6)),
            trials,
            seed,
        )
    if name == "psd":
        n, p = 10, 3
        return run_checks(
            PsdFixedRank(n, p, 1.0, 0.5, 2.0),
            weighted_pca_problem(
                sym(rng.standard_normal((n, n))), rng.uniform(0.5, 1.5, size=n)
            ),
            trials,
            seed,
        )
    raise ValueError(f"unknown manifold name {name!r}")


MANIFOLD_NAMES = ("sphere", "stiefel", "flag", "spd", "psd")
