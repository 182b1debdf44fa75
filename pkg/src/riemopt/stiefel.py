"""Stiefel manifold of orthonormal n x d frames, two-parameter metric family.

The ambient metric is g(Y) w = a0 w + (a1 - a0) Y Y^T w for positive
parameters (a0, a1): a0 = a1 = 1 is the constant trace metric, a0 = 1,
a1 = 1/2 the canonical one.  All operations below are closed forms; the
``ambient_structure`` bundle exposes the same geometry to the generic
framework for cross-checking.

Points are n x d arrays with Y^T Y = I; tangent vectors eta satisfy
Y^T eta + eta^T Y = 0.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ParameterError
from .framework import AmbientStructure
from .linalg import asym, qr_positive, sym
from .manifold import Manifold


class Stiefel(Manifold):
    def __init__(self, n: int, d: int, alpha0: float = 1.0, alpha1: float = 1.0):
        if not 0 < d <= n:
            raise DimensionError(f"need 0 < d <= n, got ({n}, {d})")
        if alpha0 <= 0 or alpha1 <= 0:
            raise ParameterError("metric parameters must be positive")
        self.n = int(n)
        self.d = int(d)
        self.alpha0 = float(alpha0)
        self.alpha1 = float(alpha1)
        self.name = f"stiefel({n},{d};a0={alpha0:g},a1={alpha1:g})"

    def dim(self) -> int:
        return self.n * self.d - self.d * (self.d + 1) // 2

    def typical_dist(self) -> float:
        return self.d ** 0.5

    # -- points and tangents -------------------------------------------------
    def rand_point(self, rng):
        q, _ = qr_positive(rng.standard_normal((self.n, self.d)))
        return q

    def rand_ambient(self, rng, point):
        return rng.standard_normal((self.n, self.d))

    def zero_tangent(self, point):
        return np.zeros((self.n, self.d))

    def point_residual(self, point) -> float:
        return np.linalg.norm(point.T @ point - np.eye(self.d))

    def tangent_residual(self, point, eta) -> float:
        return np.linalg.norm(point.T @ eta + eta.T @ point) / max(
            1.0, np.linalg.norm(eta)
        )

    # -- metric --------------------------------------------------------------
    def metric_apply(self, point, omega):
        return self.alpha0 * omega + (self.alpha1 - self.alpha0) * point @ (
            point.T @ omega
        )

    def metric_inverse(self, point, omega):
        ia0, ia1 = 1.0 / self.alpha0, 1.0 / self.alpha1
        return ia0 * omega + (ia1 - ia0) * point @ (point.T @ omega)

    # -- geometry ------------------------------------------------------------
    def project(self, point, omega):
        """Tangent projection; independent of the metric parameters."""
        return omega - 0.5 * (point @ (omega.T @ point) + point @ (point.T @ omega))

    def rgrad(self, point, egrad):
        ytg = point.T @ egrad
        return (1.0 / self.alpha0) * (egrad - point @ ytg) + (
            1.0 / self.alpha1
        ) * point @ asym(ytg)

    def christoffel_K(self, point, xi, eta):
        """Metric-derivative term, simplified using the tangency of xi, eta."""
        s = xi.T @ eta + eta.T @ xi
        cross = (xi @ eta.T + eta @ xi.T) @ point
        return 0.5 * (self.alpha1 - self.alpha0) * (point @ s - 2.0 * cross)

    def gamma(self, point, xi, eta):
        s = xi.T @ eta + eta.T @ xi
        cross = (xi @ eta.T + eta @ xi.T) @ point
        coef = (self.alpha0 - self.alpha1) / self.alpha0
        return 0.5 * point @ s + coef * (cross - point @ (point.T @ cross))

    def rhess11(self, point, egrad, ehess_vec, xi):
        ytg = point.T @ egrad
        coef = (self.alpha0 - self.alpha1) / self.alpha0
        pi0_g = egrad - point @ ytg
        inner = (
            ehess_vec
            - xi @ sym(ytg)
            - coef * (pi0_g @ (point.T @ xi) + point @ (pi0_g.T @ xi))
        )
        return self.project(point, self.metric_inverse(point, inner))

    def retract(self, point, eta):
        q, _ = qr_positive(point + eta)
        return q

    # -- framework bundle ----------------------------------------------------
    def ambient_structure(self, point) -> AmbientStructure:
        y = point
        a0, a1 = self.alpha0, self.alpha1

        def d_g(xi, omega):
            return (a1 - a0) * (xi @ (y.T @ omega) + y @ (xi.T @ omega))

        def cross_term(xi, eta):
            return (a1 - a0) * (xi @ eta.T + eta @ xi.T) @ y

        def d_proj(xi, omega):
            return -0.5 * (
                xi @ (omega.T @ y)
                + y @ (omega.T @ xi)
                + xi @ (y.T @ omega)
                + y @ (xi.T @ omega)
            )

        return AmbientStructure(
            g=lambda w: self.metric_apply(y, w),
            g_inv=lambda w: self.metric_inverse(y, w),
            d_g=d_g,
            cross_term=cross_term,
            j=lambda w: y.T @ w + w.T @ y,
            j_adjoint=lambda a: 2.0 * y @ a,
            d_j=lambda xi, w: xi.T @ w + w.T @ xi,
            d_j_adjoint=lambda xi, a: 2.0 * xi @ a,
            solve_jgjt=lambda a: (a1 / 4.0) * a,
            d_project=d_proj,
        )


def rayleigh_problem(a: np.ndarray):
    """Trace quadratic Tr(Y^T A Y); stationary frames span eigenspaces of A."""
    from .manifold import AmbientProblem

    a = np.asarray(a, dtype=float)

    return AmbientProblem(
        cost=lambda y: float(np.trace(y.T @ a @ y)),
        egrad=lambda y: 2.0 * a @ y,
        ehess=lambda y, xi: 2.0 * a @ xi,
        name="stiefel_rayleigh",
    )
