"""Generic ambient-structure engine.

A manifold point is described to this module by a bundle of operator
callbacks (:class:`AmbientStructure`): the metric operator ``g`` and its
inverse, a constraint operator ``j`` whose nullspace is the tangent or
horizontal space (and/or a range operator ``n`` describing the same
subspace), their directional derivatives, and the metric cross term.
From these the module produces projections, Riemannian gradients, the
Christoffel function, and Hessian-vector products.  Manifold modules
register closed forms for the same quantities; this generic path is the
independent cross-check and the fallback for new geometries.

All operators act on ambient vectors: ndarrays or blockwise
:class:`~riemopt.linalg.ProductVector` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .errors import DimensionError, SolverError
from .linalg import vec_inner, vec_norm, vec_size, vec_zeros_like

Op = Callable


@dataclass(frozen=True)
class AmbientStructure:
    """Operator callbacks describing one manifold point.

    ``g``/``g_inv`` must be self-adjoint positive-definite on the ambient
    space.  ``j`` maps onto the constraint space with nullspace equal to
    the tangent/horizontal fiber; ``n`` maps one-to-one onto the same
    fiber.  At least one of ``j``/``n`` must be given for a nontrivial
    projection (with both absent the fiber is the whole ambient space).

    ``d_g(xi, omega)`` is the derivative of the metric operator along the
    tangent direction ``xi`` applied to ``omega``; ``cross_term(xi, eta)``
    is an ambient representative of the index-raised form of
    ``<xi, (D_. g) eta>`` (any representative works: the projected value
    entering the connection does not depend on the choice).

    ``solve_jgjt`` may supply a closed-form inverse of ``a -> J g^-1 J^t a``;
    otherwise a conjugate-gradient solve is used.  ``d_project`` may supply
    the analytic derivative of the projection applied to an arbitrary
    ambient vector; otherwise it is assembled from ``d_j``/``d_j_adjoint``.
    """

    g: Op
    g_inv: Op
    d_g: Op
    cross_term: Op
    j: Optional[Op] = None
    j_adjoint: Optional[Op] = None
    d_j: Optional[Op] = None
    d_j_adjoint: Optional[Op] = None
    n: Optional[Op] = None
    n_adjoint: Optional[Op] = None
    solve_jgjt: Optional[Op] = None
    d_project: Optional[Op] = None


def cg_solve(operator, rhs, rtol=1e-12, max_iterations=None):
    """Conjugate gradients for a self-adjoint positive-definite operator.

    Operates on ambient vectors through the trace inner product.  The
    systems arising here are small and well conditioned, so failure to
    reach ``rtol`` within the cap indicates a structural bug and raises.
    """
    rhs_norm = vec_norm(rhs)
    x = vec_zeros_like(rhs)
    if rhs_norm == 0.0:
        return x
    if max_iterations is None:
        max_iterations = 10 * vec_size(rhs)
    r = rhs
    p = r
    rr = vec_inner(r, r)
    for _ in range(max_iterations):
        ap = operator(p)
        pap = vec_inner(p, ap)
        if pap <= 0.0:
            raise SolverError(
                "operator is not positive-definite on this subspace",
                residual=vec_norm(r) / rhs_norm,
            )
        alpha = rr / pap
        x = x + alpha * p
        r = r - alpha * ap
        rr_new = vec_inner(r, r)
        if rr_new ** 0.5 <= rtol * rhs_norm:
            return x
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise SolverError(
        "conjugate gradient did not converge",
        residual=vec_norm(r) / rhs_norm,
    )


def solve_jgjt(s: AmbientStructure, rhs):
    """Solve (J g^-1 J^t) x = rhs on the constraint space."""
    if s.solve_jgjt is not None:
        return s.solve_jgjt(rhs)
    return cg_solve(lambda a: s.j(s.g_inv(s.j_adjoint(a))), rhs)


def project_nullspace(s: AmbientStructure, omega):
    """g-orthogonal projection onto the nullspace of J.

    omega - g^-1 J^t (J g^-1 J^t)^-1 J omega.
    """
    if s.j is None:
        if s.n is not None:
            return project_range(s, omega)
        return omega
    a = solve_jgjt(s, s.j(omega))
    return omega - s.g_inv(s.j_adjoint(a))


def project_range(s: AmbientStructure, omega):
    """g-orthogonal projection onto the range of N.

    N (N^t g N)^-1 N^t g omega; agrees with :func:`project_nullspace`
    whenever both descriptions of the subspace are supplied.
    """
    if s.n is None:
        raise DimensionError("structure has no range operator N")
    rhs = s.n_adjoint(s.g(omega))
    b = cg_solve(lambda d: s.n_adjoint(s.g(s.n(d))), rhs)
    return s.n(b)


def project(s: AmbientStructure, omega):
    """Projection onto the fiber, using whichever description is present."""
    if s.j is not None:
        return project_nullspace(s, omega)
    if s.n is not None:
        return project_range(s, omega)
    return omega


def rgrad(s: AmbientStructure, egrad):
    """Riemannian gradient from the ambient gradient: project(g^-1 egrad)."""
    return project(s, s.g_inv(egrad))


def christoffel_K(s: AmbientStructure, xi, eta):
    """Metric-derivative term of the connection.

    ((D_xi g) eta + (D_eta g) xi - cross_term(xi, eta)) / 2; symmetric in
    (xi, eta) by construction.
    """
    return 0.5 * (s.d_g(xi, eta) + s.d_g(eta, xi) - s.cross_term(xi, eta))


def d_project(s: AmbientStructure, xi, omega):
    """Directional derivative of the projection, (D_xi Pi) omega.

    Valid for arbitrary ambient ``omega``.  Uses the manifold-supplied
    closed form when present, otherwise differentiates the nullspace
    formula Pi = I - g^-1 J^t (J g^-1 J^t)^-1 J term by term, which needs
    ``d_j`` and ``d_j_adjoint``.
    """
    if s.d_project is not None:
        return s.d_project(xi, omega)
    if s.j is None or s.d_j is None or s.d_j_adjoint is None:
        raise DimensionError(
            "structure supplies neither d_project nor (d_j, d_j_adjoint)"
        )
    a = solve_jgjt(s, s.j(omega))
    jta = s.j_adjoint(a)
    ginv_jta = s.g_inv(jta)
    # D_xi of g^-1 J^t applied to a.
    t1 = -s.g_inv(s.d_g(xi, ginv_jta)) + s.g_inv(s.d_j_adjoint(xi, a))
    # D_xi of (J g^-1 J^t) applied to a.
    ds_a = (
        s.d_j(xi, ginv_jta)
        - s.j(s.g_inv(s.d_g(xi, ginv_jta)))
        + s.j(s.g_inv(s.d_j_adjoint(xi, a)))
    )
    t2 = s.g_inv(s.j_adjoint(solve_jgjt(s, ds_a)))
    t3 = s.g_inv(s.j_adjoint(solve_jgjt(s, s.d_j(xi, omega))))
    return -(t1 - t2 + t3)


def gamma_j_form(s: AmbientStructure, xi, eta):
    """Christoffel function from the constraint derivative.

    g^-1 J^t (J g^-1 J^t)^-1 (D_xi J) eta + Pi g^-1 K(xi, eta), valid when
    ``eta`` lies in the fiber (J eta = 0).
    """
    k_term = project(s, s.g_inv(christoffel_K(s, xi, eta)))
    if s.j is None:
        return k_term
    a = solve_jgjt(s, s.d_j(xi, eta))
    return s.g_inv(s.j_adjoint(a)) + k_term


def gamma_dpi_form(s: AmbientStructure, xi, eta):
    """Christoffel function from the projection derivative.

    -(D_xi Pi) eta + Pi g^-1 K(xi, eta).
    """
    k_term = project(s, s.g_inv(christoffel_K(s, xi, eta)))
    if s.j is None and s.n is None:
        return k_term
    return -d_project(s, xi, eta) + k_term


def gamma(s: AmbientStructure, xi, eta):
    """Christoffel function of the Levi-Civita connection.

    The covariant derivative of a vector field eta along xi is
    D_xi eta + gamma(xi, eta).  Dispatches to whichever form the
    structure supports (both agree; diagnostics assert it).
    """
    if s.j is not None and s.d_j is not None:
        return gamma_j_form(s, xi, eta)
    if s.d_project is not None or (s.d_j is not None and s.d_j_adjoint is not None):
        return gamma_dpi_form(s, xi, eta)
    if s.j is None and s.n is None:
        # Flat case: constant projection, connection reduces to K.
        return project(s, s.g_inv(christoffel_K(s, xi, eta)))
    raise DimensionError("structure supplies no derivative information")


def rhess11(s: AmbientStructure, egrad, ehess_vec, xi):
    """Riemannian Hessian-vector product.

    Pi g^-1 ( fhat_YY xi + g (D_xi Pi) g^-1 fhat_Y - (D_xi g) g^-1 fhat_Y
              + K(xi, Pi g^-1 fhat_Y) )
    where ``ehess_vec`` is the ambient Hessian applied to xi.
    """
    ginv_f = s.g_inv(egrad)
    rg = project(s, ginv_f)
    inner = (
        ehess_vec
        + s.g(d_project(s, xi, ginv_f))
        - s.d_g(xi, ginv_f)
        + christoffel_K(s, xi, rg)
    )
    return project(s, s.g_inv(inner))


def rhess02(s: AmbientStructure, egrad, ehess_bilinear_value, xi, eta):
    """Riemannian Hessian bilinear form.

    fhat_YY(xi, eta) - <Gamma(xi, eta), fhat_Y>, with the ambient bilinear
    Hessian value supplied by the caller.
    """
    return float(ehess_bilinear_value) - vec_inner(gamma(s, xi, eta), egrad)
