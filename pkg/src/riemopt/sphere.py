"""Unit sphere with the constant metric.

The smallest instance of the machinery: one scalar constraint, identity
metric, everything in closed form.  Used as a ground-truth fixture for
the generic framework and as a toy problem for the solvers.  Points and
tangents are n x 1 column matrices.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError
from .framework import AmbientStructure
from .linalg import trr_inner
from .manifold import Manifold


class Sphere(Manifold):
    def __init__(self, n: int):
        if n < 2:
            raise DimensionError("sphere needs ambient dimension >= 2")
        self.n = int(n)
        self.name = f"sphere({n})"

    def dim(self) -> int:
        return self.n - 1

    def typical_dist(self) -> float:
        return np.pi

    def rand_point(self, rng):
        x = rng.standard_normal((self.n, 1))
        return x / np.linalg.norm(x)

    def rand_ambient(self, rng, point):
        return rng.standard_normal((self.n, 1))

    def zero_tangent(self, point):
        return np.zeros_like(point)

    def point_residual(self, point) -> float:
        return abs(float((point.T @ point)[0, 0]) - 1.0)

    def tangent_residual(self, point, eta) -> float:
        return abs(float((point.T @ eta)[0, 0])) / max(1.0, np.linalg.norm(eta))

    def metric_apply(self, point, omega):
        return omega

    def project(self, point, omega):
        return omega - point @ (point.T @ omega)

    def rgrad(self, point, egrad):
        return self.project(point, egrad)

    def gamma(self, point, xi, eta):
        return point @ (xi.T @ eta)

    def rhess11(self, point, egrad, ehess_vec, xi):
        return self.project(point, ehess_vec) - xi @ (point.T @ egrad)

    def retract(self, point, eta):
        y = point + eta
        return y / np.linalg.norm(y)

    def ambient_structure(self, point) -> AmbientStructure:
        x = point

        def d_proj(xi, omega):
            return -(xi @ (x.T @ omega) + x @ (xi.T @ omega))

        return AmbientStructure(
            g=lambda w: w,
            g_inv=lambda w: w,
            d_g=lambda xi, w: np.zeros_like(w),
            cross_term=lambda xi, eta: np.zeros_like(xi),
            j=lambda w: x.T @ w,
            j_adjoint=lambda a: x @ a,
            d_j=lambda xi, w: xi.T @ w,
            d_j_adjoint=lambda xi, a: xi @ a,
            solve_jgjt=lambda a: a,
            d_project=d_proj,
        )


def rayleigh_problem(a: np.ndarray):
    """Quadratic form x^T A x on the sphere; minimized at the bottom eigenvector."""
    from .manifold import AmbientProblem

    a = np.asarray(a, dtype=float)

    return AmbientProblem(
        cost=lambda x: float((x.T @ a @ x)[0, 0]),
        egrad=lambda x: 2.0 * a @ x,
        ehess=lambda x, xi: 2.0 * a @ xi,
        name="sphere_rayleigh",
    )
