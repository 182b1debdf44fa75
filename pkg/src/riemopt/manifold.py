"""Shared manifold contract consumed by solvers and diagnostics.

A manifold object owns the dimensions and metric parameters; points and
tangent vectors are plain arrays (or light cached wrappers for the
positive-definite geometries).  Every concrete manifold implements the
closed forms for projection, gradient, connection and Hessian, and can
hand out the operator-callback bundle for the generic framework path via
``ambient_structure``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .framework import AmbientStructure
from .linalg import vec_inner, vec_norm


@dataclass(frozen=True)
class AmbientProblem:
    """Cost with ambient first and second derivatives.

    ``egrad`` returns the ambient gradient at a point; ``ehess`` returns
    the ambient Hessian applied to a tangent vector.  ``name`` labels
    logs and reports.
    """

    cost: Callable[[Any], float]
    egrad: Callable[[Any], Any]
    ehess: Callable[[Any, Any], Any]
    name: str = "problem"


class Manifold:
    """Base class fixing the method surface; subclasses fill in geometry."""

    name = "manifold"

    def dim(self) -> int:
        raise NotImplementedError

    def typical_dist(self) -> float:
        return self.dim() ** 0.5

    # -- points and tangents -------------------------------------------------
    def rand_point(self, rng):
        raise NotImplementedError

    def rand_ambient(self, rng, point):
        raise NotImplementedError

    def rand_tangent(self, rng, point):
        """Projected Gaussian ambient vector, normalized to unit metric norm."""
        eta = self.project(point, self.rand_ambient(rng, point))
        return eta / self.norm(point, eta)

    def zero_tangent(self, point):
        raise NotImplementedError

    def point_residual(self, point) -> float:
        """Scale-free violation of the point invariant."""
        raise NotImplementedError

    def tangent_residual(self, point, eta) -> float:
        """Scale-free violation of the tangency/horizontality invariant."""
        raise NotImplementedError

    # -- geometry ------------------------------------------------------------
    def metric_apply(self, point, omega):
        raise NotImplementedError

    def inner(self, point, a, b) -> float:
        return vec_inner(a, self.metric_apply(point, b))

    def norm(self, point, a) -> float:
        return max(self.inner(point, a, a), 0.0) ** 0.5

    def project(self, point, omega):
        raise NotImplementedError

    def rgrad(self, point, egrad):
        raise NotImplementedError

    def gamma(self, point, xi, eta):
        """Christoffel function: covariant derivative minus plain derivative."""
        raise NotImplementedError

    def rhess11(self, point, egrad, ehess_vec, xi):
        raise NotImplementedError

    def rhess02(self, point, egrad, ehess_bilinear_value, xi, eta) -> float:
        return float(ehess_bilinear_value) - vec_inner(
            self.gamma(point, xi, eta), egrad
        )

    def retract(self, point, eta):
        raise NotImplementedError

    def ambient_structure(self, point) -> AmbientStructure:
        raise NotImplementedError

    # -- helpers -------------------------------------------------------------
    def ambient_norm(self, a) -> float:
        return vec_norm(a)
