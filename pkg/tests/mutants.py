"""Deliberately broken geometries; the diagnostics harness must catch them."""

import numpy as np

from riemopt.flag import FlagQuotient
from riemopt.linalg import sym
from riemopt.psd_fixed_rank import PsdFixedRank
from riemopt.stiefel import Stiefel


class StiefelGammaDropsMetricTerm(Stiefel):
    """Christoffel function without the metric-derivative correction."""

    def gamma(self, point, xi, eta):
        return 0.5 * point @ (xi.T @ eta + eta.T @ xi)


class FlagProjectionWrongBlockRule(FlagQuotient):
    """Projection symmetrizes the leading diagonal blocks too."""

    def project(self, point, omega):
        return omega - point @ sym(point.T @ omega)


class PsdGammaMissingProjectionDerivative(PsdFixedRank):
    """Connection keeps only the metric term."""

    def gamma(self, point, xi, eta):
        k = self.christoffel_K(point, xi, eta)
        return self.project(point, self.metric_inverse(point, k))


class StiefelRgradSwappedParams(Stiefel):
    """Gradient computed with the metric parameters interchanged."""

    def rgrad(self, point, egrad):
        ytg = point.T @ egrad
        from riemopt.linalg import asym

        return (1.0 / self.alpha1) * (egrad - point @ ytg) + (
            1.0 / self.alpha0
        ) * point @ asym(ytg)
