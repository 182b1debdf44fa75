"""Symmetric positive-definite matrices with the affine-invariant metric.

The metric operator at P sends omega to P^-1 omega P^-1.  Points carry
their eigendecomposition: metric applications, the exponential map, and
the structured solves downstream all reuse it, and recomputation would
dominate otherwise.  Tangent vectors are symmetric matrices.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NumericalError
from .framework import AmbientStructure
from .linalg import eigh, sym
from .manifold import Manifold


class SpdPoint:
    """A validated SPD matrix plus its cached eigendecomposition."""

    __slots__ = ("p", "eigenvalues", "eigenvectors")

    def __init__(self, p):
        p = np.asarray(p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionError(f"SPD point must be square, got {p.shape}")
        if np.linalg.norm(p - p.T) > 1e-10 * max(1.0, np.linalg.norm(p)):
            raise NumericalError("SPD point is not symmetric within tolerance")
        w, u = eigh(p)
        if w[-1] <= 1e-12 * max(w[0], 0.0):
            raise NumericalError("matrix is not positive-definite")
        self.p = sym(p)
        self.eigenvalues = w
        self.eigenvectors = u

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def solve(self, m):
        """P^-1 m via the cached factorization."""
        u, w = self.eigenvectors, self.eigenvalues
        return u @ ((u.T @ m) / w[:, None])

    def inv(self):
        u, w = self.eigenvectors, self.eigenvalues
        return (u / w) @ u.T

    def sqrt(self):
        u, w = self.eigenvectors, self.eigenvalues
        return (u * np.sqrt(w)) @ u.T

    def inv_sqrt(self):
        u, w = self.eigenvectors, self.eigenvalues
        return (u / np.sqrt(w)) @ u.T


class SymmetricPositiveDefinite(Manifold):
    def __init__(self, n: int):
        if n < 1:
            raise DimensionError("need n >= 1")
        self.n = int(n)
        self.name = f"spd({n})"

    def dim(self) -> int:
        return self.n * (self.n + 1) // 2

    # -- points and tangents -------------------------------------------------
    def rand_point(self, rng, spread: float = 1.0) -> SpdPoint:
        """Random SPD point with log-uniform eigenvalues in e^[-spread, spread]."""
        q, _ = np.linalg.qr(rng.standard_normal((self.n, self.n)))
        w = np.exp(rng.uniform(-spread, spread, size=self.n))
        return SpdPoint((q * w) @ q.T)

    def rand_ambient(self, rng, point):
        return rng.standard_normal((self.n, self.n))

    def zero_tangent(self, point):
        return np.zeros((self.n, self.n))

    def point_residual(self, point) -> float:
        p = point.p
        res = np.linalg.norm(p - p.T) / max(1.0, np.linalg.norm(p))
        if point.eigenvalues[-1] <= 0:
            res = max(res, 1.0)
        return res

    def tangent_residual(self, point, eta) -> float:
        return np.linalg.norm(eta - eta.T) / max(1.0, np.linalg.norm(eta))

    # -- metric --------------------------------------------------------------
    def metric_apply(self, point, omega):
        return point.solve(point.solve(omega).T).T

    def metric_inverse(self, point, omega):
        return point.p @ omega @ point.p

    # -- geometry ------------------------------------------------------------
    def project(self, point, omega):
        return sym(omega)

    def rgrad(self, point, egrad):
        return point.p @ sym(egrad) @ point.p

    def gamma(self, point, xi, eta):
        pinv_eta = point.solve(eta)
        pinv_xi = point.solve(xi)
        return -0.5 * (xi @ pinv_eta + eta @ pinv_xi)

    def connection(self, point, d_xi_eta, xi, eta):
        """Covariant derivative D_xi eta + gamma(xi, eta)."""
        return d_xi_eta + self.gamma(point, xi, eta)

    def rhess11(self, point, egrad, ehess_vec, xi):
        p = point.p
        return p @ sym(ehess_vec) @ p + sym(xi @ sym(egrad) @ p)

    def exp_map(self, point, xi) -> SpdPoint:
        """Geodesic exponential; defined for every symmetric direction."""
        half = point.sqrt()
        inv_half = point.inv_sqrt()
        w, u = eigh(inv_half @ xi @ inv_half)
        inner = (u * np.exp(w)) @ u.T
        return SpdPoint(half @ inner @ half)

    def retract(self, point, eta) -> SpdPoint:
        return self.exp_map(point, eta)

    # -- framework bundle ----------------------------------------------------
    def ambient_structure(self, point) -> AmbientStructure:
        pinv = point.inv()

        def d_g(xi, omega):
            return -(pinv @ xi @ pinv @ omega @ pinv + pinv @ omega @ pinv @ xi @ pinv)

        def cross_term(xi, eta):
            return -(pinv @ eta @ pinv @ xi @ pinv + pinv @ xi @ pinv @ eta @ pinv)

        zeros = np.zeros((self.n, self.n))
        return AmbientStructure(
            g=lambda w: self.metric_apply(point, w),
            g_inv=lambda w: self.metric_inverse(point, w),
            d_g=d_g,
            cross_term=cross_term,
            j=lambda w: w - w.T,
            j_adjoint=lambda a: 2.0 * a,
            d_j=lambda xi, w: zeros,
            d_j_adjoint=lambda xi, a: zeros,
            solve_jgjt=lambda a: 0.25 * pinv @ a @ pinv,
            d_project=lambda xi, w: zeros,
        )


def _matrix_of(point):
    """Accept an SpdPoint or a raw array (for ambient finite differences)."""
    return point.p if isinstance(point, SpdPoint) else np.asarray(point, dtype=float)


def logdet_problem(c: np.ndarray):
    """Linear-plus-barrier cost Tr(C P) - log det P, minimized at P = C^-1."""
    from .manifold import AmbientProblem

    c = np.asarray(c, dtype=float)

    def cost(point):
        p = _matrix_of(point)
        sign, logdet = np.linalg.slogdet(p)
        if sign <= 0:
            raise NumericalError("log det of a non-positive matrix")
        return float(np.trace(c @ p)) - logdet

    def egrad(point):
        if isinstance(point, SpdPoint):
            return c - point.inv()
        return c - np.linalg.inv(_matrix_of(point))

    def ehess(point, xi):
        if isinstance(point, SpdPoint):
            return point.solve(point.solve(xi).T).T
        pinv = np.linalg.inv(_matrix_of(point))
        return pinv @ xi @ pinv

    return AmbientProblem(cost=cost, egrad=egrad, ehess=ehess, name="spd_logdet")


def trace_plus_inverse_problem():
    """Tr(P) + Tr(P^-1): strictly convex along geodesics, minimized at I."""
    from .manifold import AmbientProblem

    def cost(point):
        p = _matrix_of(point)
        return float(np.trace(p) + np.trace(np.linalg.inv(p)))

    def egrad(point):
        pinv = np.linalg.inv(_matrix_of(point))
        return np.eye(pinv.shape[0]) - pinv @ pinv

    def ehess(point, xi):
        pinv = np.linalg.inv(_matrix_of(point))
        return pinv @ xi @ pinv @ pinv + pinv @ pinv @ xi @ pinv

    return AmbientProblem(cost=cost, egrad=egrad, ehess=ehess, name="spd_trace_inverse")
