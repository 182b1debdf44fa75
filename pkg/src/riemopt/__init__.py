"""Riemannian gradients, Hessians and solvers for matrix manifolds.

Ambient (Euclidean) derivatives of a cost are converted to Riemannian
ones through operator-valued metric structures: projections from
nullspace/range descriptions of the tangent or horizontal space, the
Christoffel function of the Levi-Civita connection, and Hessian-vector
products.  Instantiated for Stiefel frames with a two-parameter metric
family, block-diagonal quotients (flag manifolds), SPD matrices with the
affine-invariant metric, and fixed-rank PSD matrices as a Stiefel x SPD
quotient; driven by trust-region and gradient-descent solvers.
"""

from .errors import (
    ConfigError,
    DimensionError,
    IllPosedError,
    InvariantError,
    NumericalError,
    ParameterError,
    RiemoptError,
    SolverError,
    StagnationError,
)
from .flag import FlagQuotient
from .framework import AmbientStructure
from .linalg import BlockPartition, ProductVector
from .manifold import AmbientProblem, Manifold
from .psd_fixed_rank import ExtendedLyapunov, PsdFixedRank, PsdPoint
from .solvers import (
    IterationRecord,
    SolveResult,
    SolverConfig,
    steepest_descent,
    trust_region,
    truncated_cg_subproblem,
)
from .spd import SpdPoint, SymmetricPositiveDefinite
from .sphere import Sphere
from .stiefel import Stiefel

__version__ = "0.1.0"

__all__ = [
    "AmbientProblem",
    "AmbientStructure",
    "BlockPartition",
    "ConfigError",
    "DimensionError",
    "ExtendedLyapunov",
    "FlagQuotient",
    "IllPosedError",
    "InvariantError",
    "IterationRecord",
    "Manifold",
    "NumericalError",
    "ParameterError",
    "ProductVector",
    "PsdFixedRank",
    "PsdPoint",
    "RiemoptError",
    "SolveResult",
    "SolverConfig",
    "SolverError",
    "SpdPoint",
    "Sphere",
    "StagnationError",
    "Stiefel",
    "SymmetricPositiveDefinite",
    "steepest_descent",
    "trust_region",
    "truncated_cg_subproblem",
]
