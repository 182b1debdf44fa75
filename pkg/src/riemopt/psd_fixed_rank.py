"""Fixed-rank positive-semidefinite matrices as a Stiefel x SPD quotient.

A rank-p PSD matrix S = Y P Y^T is represented by a frame Y (n x p,
orthonormal columns) and an SPD factor P (p x p), up to the joint
rotation (Y, P) ~ (Y U, U^T P U).  The metric has three positive
parameters: (alpha0, alpha1) weigh the frame part as in the Stiefel
family, beta scales the affine-invariant part on P.  Ambient vectors are
(n x p, p x p) pairs held in a ProductVector.

Horizontal tangent vectors (eta_Y, eta_P) satisfy eta_P symmetric and

    alpha1 Y^T eta_Y + beta (eta_P P^-1 - P^-1 eta_P) = 0.

The horizontal projection needs one structured solve: an extended
Lyapunov equation inverted entrywise in the eigenbasis of P.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, IllPosedError, NumericalError, ParameterError
from .framework import AmbientStructure
from .linalg import ProductVector, eigh, qr_positive, sym
from .manifold import Manifold
from .spd import SpdPoint


class ExtendedLyapunov:
    """Operator X -> sum_st c_st P^s X P^t, inverted in the eigenbasis of P.

    For the metric instance L(P) X = (alpha1 - 2 beta) X
    + beta (P X P^-1 + P^-1 X P) the divisor table
    M_ij = alpha1 + beta (L_i / L_j + L_j / L_i - 2) is strictly positive
    for positive parameters, so the solve is unconditionally well posed.
    A general coefficient table is accepted; then well-posedness is the
    caller's responsibility and near-vanishing divisors raise.
    """

    def __init__(self, eigenvalues, eigenvectors, coefficients):
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.eigenvectors = np.asarray(eigenvectors, dtype=float)
        lam = self.eigenvalues
        m = np.zeros((lam.size, lam.size))
        for (s, t), c in coefficients.items():
            m += c * np.outer(lam ** s, lam ** t)
        self.divisors = m
        scale = np.max(np.abs(m))
        if scale == 0.0 or np.min(np.abs(m)) <= 1e-14 * scale:
            raise IllPosedError("extended Lyapunov divisors (near-)vanish")

    @classmethod
    def from_metric_params(cls, p: SpdPoint, alpha1: float, beta: float):
        if alpha1 <= 0 or beta <= 0:
            raise ParameterError("alpha1 and beta must be positive")
        coeffs = {(0, 0): alpha1 - 2.0 * beta, (1, -1): beta, (-1, 1): beta}
        return cls(p.eigenvalues, p.eigenvectors, coeffs)

    def apply(self, x):
        u = self.eigenvectors
        return u @ ((u.T @ x @ u) * self.divisors) @ u.T

    def solve(self, b):
        b = np.asarray(b, dtype=float)
        if b.shape != self.divisors.shape:
            raise DimensionError(f"expected {self.divisors.shape}, got {b.shape}")
        u = self.eigenvectors
        return u @ ((u.T @ b @ u) / self.divisors) @ u.T


def solve_extended_lyapunov(operator: ExtendedLyapunov, b):
    """Solve operator(X) = B; symmetric B gives symmetric X."""
    return operator.solve(b)


class PsdPoint:
    """Frame/factor pair with cached P eigendecomposition and lazy Y-complement."""

    __slots__ = ("y", "pf", "_y_perp")

    def __init__(self, y, p):
        y = np.asarray(y, dtype=float)
        if y.ndim != 2 or y.shape[0] < y.shape[1]:
            raise DimensionError(f"frame must be n x p with n >= p, got {y.shape}")
        if np.linalg.norm(y.T @ y - np.eye(y.shape[1])) > 1e-10:
            raise NumericalError("frame columns are not orthonormal")
        self.y = y
        self.pf = p if isinstance(p, SpdPoint) else SpdPoint(p)
        if self.pf.n != y.shape[1]:
            raise DimensionError("factor size does not match frame width")
        self._y_perp = None

    @property
    def p(self):
        return self.pf.p

    @property
    def y_perp(self):
        """Orthonormal complement of the frame; only the range-map path needs it."""
        if self._y_perp is None:
            q, _ = np.linalg.qr(self.y, mode="complete")
            self._y_perp = q[:, self.y.shape[1]:]
        return self._y_perp

    def matrix(self):
        """The represented PSD matrix Y P Y^T."""
        return self.y @ self.p @ self.y.T


class PsdFixedRank(Manifold):
    def __init__(
        self,
        n: int,
        p: int,
        alpha0: float = 1.0,
        alpha1: float = 1.0,
        beta: float = 1.0,
    ):
        if not 0 < p <= n:
            raise DimensionError(f"need 0 < p <= n, got ({n}, {p})")
        if alpha0 <= 0 or alpha1 <= 0 or beta <= 0:
            raise ParameterError("metric parameters must be positive")
        self.n = int(n)
        self.p = int(p)
        self.alpha0 = float(alpha0)
        self.alpha1 = float(alpha1)
        self.beta = float(beta)
        self.name = (
            f"psd({n},{p};a0={alpha0:g},a1={alpha1:g},b={beta:g})"
        )

    def dim(self) -> int:
        return self.n * self.p - self.p * (self.p - 1) // 2

    def lyapunov(self, point: PsdPoint) -> ExtendedLyapunov:
        return ExtendedLyapunov.from_metric_params(point.pf, self.alpha1, self.beta)

    # -- points and tangents -------------------------------------------------
    def rand_point(self, rng, spread: float = 0.7) -> PsdPoint:
        y, _ = qr_positive(rng.standard_normal((self.n, self.p)))
        q, _ = np.linalg.qr(rng.standard_normal((self.p, self.p)))
        w = np.exp(rng.uniform(-spread, spread, size=self.p))
        return PsdPoint(y, (q * w) @ q.T)

    def rand_ambient(self, rng, point):
        return ProductVector(
            (
                rng.standard_normal((self.n, self.p)),
                rng.standard_normal((self.p, self.p)),
            )
        )

    def zero_tangent(self, point):
        return ProductVector(
            (np.zeros((self.n, self.p)), np.zeros((self.p, self.p)))
        )

    def point_residual(self, point) -> float:
        res = np.linalg.norm(point.y.T @ point.y - np.eye(self.p))
        return max(res, np.linalg.norm(point.p - point.p.T))

    def tangent_residual(self, point, eta) -> float:
        eta_y, eta_p = eta
        pinv = point.pf.inv()
        horiz = self.alpha1 * point.y.T @ eta_y + self.beta * (
            eta_p @ pinv - pinv @ eta_p
        )
        scale = max(1.0, self.ambient_norm(eta))
        return max(np.linalg.norm(horiz), np.linalg.norm(eta_p - eta_p.T)) / scale

    def vertical_vector(self, point, q):
        """Tangent to the group orbit: (Y q, P q - q P) for antisymmetric q."""
        return ProductVector(
            (point.y @ q, point.p @ q - q @ point.p)
        )

    def transport(self, vec, u):
        """Carry an ambient pair along the group action (Y, P) -> (YU, U^T P U)."""
        vy, vp = vec
        return ProductVector((vy @ u, u.T @ vp @ u))

    # -- metric --------------------------------------------------------------
    def metric_apply(self, point, omega):
        wy, wp = omega
        gy = self.alpha0 * wy + (self.alpha1 - self.alpha0) * point.y @ (
            point.y.T @ wy
        )
        pinv = point.pf.inv()
        return ProductVector((gy, self.beta * pinv @ wp @ pinv))

    def metric_inverse(self, point, omega):
        wy, wp = omega
        ia0, ia1 = 1.0 / self.alpha0, 1.0 / self.alpha1
        gy = ia0 * wy + (ia1 - ia0) * point.y @ (point.y.T @ wy)
        return ProductVector((gy, (1.0 / self.beta) * point.p @ wp @ point.p))

    # -- geometry ------------------------------------------------------------
    def _coupling(self, point, omega):
        """Solve for the symmetric factor coupling the two blocks."""
        wy, wp = omega
        ytw = point.y.T @ wy
        rhs = sym(wp + ytw @ point.p - point.p @ ytw)
        return self.lyapunov(point).solve(rhs)

    def project(self, point, omega):
        wy, _ = omega
        d = self._coupling(point, omega)
        pinv = point.pf.inv()
        y_part = (
            self.beta * point.y @ (pinv @ d - d @ pinv)
            + wy
            - point.y @ (point.y.T @ wy)
        )
        return ProductVector((y_part, self.alpha1 * d))

    def rgrad(self, point, egrad):
        return self.project(point, self.metric_inverse(point, egrad))

    def christoffel_K(self, point, xi, eta):
        """Metric-derivative term for horizontal arguments."""
        xi_y, xi_p = xi
        eta_y, eta_p = eta
        y = point.y
        pinv = point.pf.inv()
        s = eta_y.T @ xi_y + xi_y.T @ eta_y
        k_y = 0.5 * (self.alpha1 - self.alpha0) * (
            y @ s - 2.0 * (eta_y @ xi_y.T + xi_y @ eta_y.T) @ y
        )
        k_p = -0.5 * self.beta * (
            pinv @ eta_p @ pinv @ xi_p @ pinv + pinv @ xi_p @ pinv @ eta_p @ pinv
        )
        return ProductVector((k_y, k_p))

    def d_projection(self, point, xi, omega):
        """Derivative of the horizontal projection along horizontal xi.

        Applies to an arbitrary (constant) ambient pair omega; both the
        coupling factor and its derivative come from the same structured
        solve.
        """
        xi_y, xi_p = xi
        wy, wp = omega
        y = point.y
        p = point.p
        pinv = point.pf.inv()
        lyap = self.lyapunov(point)
        ytw = y.T @ wy
        d = lyap.solve(sym(wp + ytw @ p - p @ ytw))
        rhs = sym(
            xi_y.T @ wy @ p - p @ xi_y.T @ wy + ytw @ xi_p - xi_p @ ytw
        ) - self.beta * (
            xi_p @ d @ pinv
            + pinv @ d @ xi_p
            - p @ d @ pinv @ xi_p @ pinv
            - pinv @ xi_p @ pinv @ d @ p
        )
        d_dot = lyap.solve(rhs)
        y_part = (
            self.beta * xi_y @ (pinv @ d - d @ pinv)
            + self.beta
            * y
            @ (
                pinv @ d_dot
                - d_dot @ pinv
                + d @ pinv @ xi_p @ pinv
                - pinv @ xi_p @ pinv @ d
            )
            - (xi_y @ y.T + y @ xi_y.T) @ wy
        )
        return ProductVector((y_part, self.alpha1 * d_dot))

    def gamma(self, point, xi, eta):
        k = self.christoffel_K(point, xi, eta)
        k_term = self.project(point, self.metric_inverse(point, k))
        return -self.d_projection(point, xi, eta) + k_term

    def rhess11(self, point, egrad, ehess_vec, xi):
        ginv_f = self.metric_inverse(point, egrad)
        rg = self.project(point, ginv_f)
        inner = (
            ehess_vec
            + self.metric_apply(point, self.d_projection(point, xi, ginv_f))
            - self._d_metric(point, xi, ginv_f)
            + self.christoffel_K(point, xi, rg)
        )
        return self.project(point, self.metric_inverse(point, inner))

    def geodesic_p_part(self, point, eta, t: float) -> SpdPoint:
        """P-part of the horizontal geodesic through the point."""
        _, eta_p = eta
        half = point.pf.sqrt()
        inv_half = point.pf.inv_sqrt()
        w, u = eigh(inv_half @ eta_p @ inv_half)
        return SpdPoint(half @ (u * np.exp(t * w)) @ u.T @ half)

    def retract(self, point, eta) -> PsdPoint:
        eta_y, _ = eta
        q, _ = qr_positive(point.y + eta_y)
        return PsdPoint(q, self.geodesic_p_part(point, eta, 1.0))

    # -- framework bundle ----------------------------------------------------
    def _d_metric(self, point, xi, omega):
        _, xi_p = xi
        wy, wp = omega
        y = point.y
        pinv = point.pf.inv()
        d_pinv = -pinv @ xi_p @ pinv
        xi_y = xi[0]
        gy = (self.alpha1 - self.alpha0) * (xi_y @ (y.T @ wy) + y @ (xi_y.T @ wy))
        gp = self.beta * (d_pinv @ wp @ pinv + pinv @ wp @ d_pinv)
        return ProductVector((gy, gp))

    def ambient_structure(self, point) -> AmbientStructure:
        y = point.y
        p = point.p
        pinv = point.pf.inv()
        a0, a1, b = self.alpha0, self.alpha1, self.beta

        def cross_term(xi, eta):
            xi_y, xi_p = xi
            eta_y, eta_p = eta
            cy = (a1 - a0) * (xi_y @ eta_y.T + eta_y @ xi_y.T) @ y
            cp = -b * (
                pinv @ eta_p @ pinv @ xi_p @ pinv
                + pinv @ xi_p @ pinv @ eta_p @ pinv
            )
            return ProductVector((cy, cp))

        def j(w):
            wy, wp = w
            ytw = y.T @ wy
            horiz = a1 * ytw + b * (wp @ pinv - pinv @ wp)
            return ProductVector(
                (sym(ytw), 0.5 * (wp - wp.T), 0.5 * (horiz - horiz.T))
            )

        def j_adjoint(abc):
            a_mat, b_mat, c_mat = abc
            return ProductVector(
                (y @ (a_mat + a1 * c_mat), b_mat + b * (c_mat @ pinv - pinv @ c_mat))
            )

        def d_j(xi, w):
            xi_y, xi_p = xi
            wy, wp = w
            d_pinv = -pinv @ xi_p @ pinv
            top = a1 * xi_y.T @ wy + b * (wp @ d_pinv - d_pinv @ wp)
            return ProductVector(
                (
                    sym(xi_y.T @ wy),
                    np.zeros((self.p, self.p)),
                    0.5 * (top - top.T),
                )
            )

        def d_j_adjoint(xi, abc):
            xi_y, xi_p = xi
            a_mat, _, c_mat = abc
            d_pinv = -pinv @ xi_p @ pinv
            return ProductVector(
                (
                    xi_y @ (a_mat + a1 * c_mat),
                    b * (c_mat @ d_pinv - d_pinv @ c_mat),
                )
            )

        def n(bd):
            b_mat, d_mat = bd
            return ProductVector(
                (
                    b * y @ (pinv @ d_mat - d_mat @ pinv) + point.y_perp @ b_mat,
                    a1 * d_mat,
                )
            )

        def n_adjoint(w):
            wy, wp = w
            ytw = y.T @ wy
            return ProductVector(
                (
                    point.y_perp.T @ wy,
                    sym(a1 * wp + b * (pinv @ ytw - ytw @ pinv)),
                )
            )

        return AmbientStructure(
            g=lambda w: self.metric_apply(point, w),
            g_inv=lambda w: self.metric_inverse(point, w),
            d_g=lambda xi, w: self._d_metric(point, xi, w),
            cross_term=cross_term,
            j=j,
            j_adjoint=j_adjoint,
            d_j=d_j,
            d_j_adjoint=d_j_adjoint,
            n=n,
            n_adjoint=n_adjoint,
        )
