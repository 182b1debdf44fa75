"""Quotients of a Stiefel manifold by block-diagonal orthogonal groups.

A column partition (d_1, ..., d_q) of d (possibly with a remainder block
that is not quotiented) defines the group of block-diagonal orthogonal
matrices acting on frames from the right.  When the partition exhausts d
the quotient is a flag manifold; the empty partition gives back Stiefel
and the single full block gives Grassmann.

Points are represented by Stiefel frames; all operations are equivariant
so no canonical representative is chosen.  Horizontal vectors eta satisfy
symf(Y^T eta) = 0 with the blockwise symmetrizer ``symf``.

Cost functions handed to the gradient/Hessian routines must be invariant
under the group action; this is the caller's contract and is only
spot-checked by diagnostics.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ParameterError
from .framework import AmbientStructure
from .linalg import BlockPartition, qr_positive, symf
from .manifold import Manifold


class FlagQuotient(Manifold):
    def __init__(
        self,
        n: int,
        part: BlockPartition,
        alpha0: float = 1.0,
        alpha1: float = 1.0,
    ):
        if part.dim > n:
            raise DimensionError(f"need d <= n, got d={part.dim}, n={n}")
        if alpha0 <= 0 or alpha1 <= 0:
            raise ParameterError("metric parameters must be positive")
        self.n = int(n)
        self.d = part.dim
        self.part = part
        self.alpha0 = float(alpha0)
        self.alpha1 = float(alpha1)
        self.name = (
            f"flag({n},{self.d};d_hat={list(part.sizes)},"
            f"a0={alpha0:g},a1={alpha1:g})"
        )

    def dim(self) -> int:
        stiefel_dim = self.n * self.d - self.d * (self.d + 1) // 2
        vertical = sum(s * (s - 1) // 2 for s in self.part.sizes)
        return stiefel_dim - vertical

    def typical_dist(self) -> float:
        return self.d ** 0.5

    def _symf(self, a):
        return symf(a, self.part)

    # -- points and tangents -------------------------------------------------
    def rand_point(self, rng):
        q, _ = qr_positive(rng.standard_normal((self.n, self.d)))
        return q

    def rand_group_element(self, rng):
        """Random block-diagonal orthogonal matrix of the quotient group."""
        u = np.eye(self.d)
        for s in self.part.diagonal_slices():
            block = rng.standard_normal((s.stop - s.start, s.stop - s.start))
            q, _ = qr_positive(block)
            u[s, s] = q
        return u

    def rand_ambient(self, rng, point):
        return rng.standard_normal((self.n, self.d))

    def zero_tangent(self, point):
        return np.zeros((self.n, self.d))

    def point_residual(self, point) -> float:
        return np.linalg.norm(point.T @ point - np.eye(self.d))

    def tangent_residual(self, point, eta) -> float:
        return np.linalg.norm(self._symf(point.T @ eta)) / max(
            1.0, np.linalg.norm(eta)
        )

    # -- metric (same family as the Stiefel total space) ----------------------
    def metric_apply(self, point, omega):
        return self.alpha0 * omega + (self.alpha1 - self.alpha0) * point @ (
            point.T @ omega
        )

    def metric_inverse(self, point, omega):
        ia0, ia1 = 1.0 / self.alpha0, 1.0 / self.alpha1
        return ia0 * omega + (ia1 - ia0) * point @ (point.T @ omega)

    # -- geometry ------------------------------------------------------------
    def project(self, point, omega):
        """Projection onto the horizontal space."""
        return omega - point @ self._symf(point.T @ omega)

    def rgrad(self, point, egrad):
        ia0, ia1 = 1.0 / self.alpha0, 1.0 / self.alpha1
        ytg = point.T @ egrad
        return ia0 * egrad + (ia1 - ia0) * point @ ytg - ia1 * point @ self._symf(ytg)

    def gamma(self, point, xi, eta):
        cross = (xi @ eta.T + eta @ xi.T) @ point
        coef = (self.alpha0 - self.alpha1) / self.alpha0
        return point @ self._symf(xi.T @ eta) + coef * (
            cross - point @ (point.T @ cross)
        )

    def rhess11(self, point, egrad, ehess_vec, xi):
        ytg = point.T @ egrad
        coef = (self.alpha0 - self.alpha1) / self.alpha0
        pi0_g = egrad - point @ ytg
        inner = (
            ehess_vec
            - xi @ self._symf(ytg)
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
            return -xi @ self._symf(y.T @ omega) - y @ self._symf(xi.T @ omega)

        return AmbientStructure(
            g=lambda w: self.metric_apply(y, w),
            g_inv=lambda w: self.metric_inverse(y, w),
            d_g=d_g,
            cross_term=cross_term,
            j=lambda w: self._symf(y.T @ w),
            j_adjoint=lambda a: y @ self._symf(a),
            d_j=lambda xi, w: self._symf(xi.T @ w),
            d_j_adjoint=lambda xi, a: xi @ self._symf(a),
            solve_jgjt=lambda a: a1 * a,
            d_project=d_proj,
        )
