"""Dense real matrix foundation.

Everything in the package runs on float64 matrices with the trace
(Frobenius) inner product.  Ambient elements of product spaces (pairs of
matrices, or larger tuples of blocks) are represented by
:class:`ProductVector`, whose arithmetic acts blockwise so solver and
framework code can treat all ambient vectors uniformly.

The adjoint abstraction is real transposition throughout; the functions
are named so a complex (Hermitian) extension can slot in, but no complex
code path exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericalError


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d float64 array, requiring finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={m.ndim}")
    if not np.isfinite(m).all():
        raise NumericalError("matrix has non-finite entries")
    return m


def trr_inner(a, b) -> float:
    """Trace (Frobenius) inner product Tr(a b^T).

    Symmetric and bilinear; positive-definite on each matrix space.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.tensordot(a, b, axes=a.ndim))


def sym(a) -> np.ndarray:
    """Symmetric part (a + a^T) / 2."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"sym needs a square matrix, got {a.shape}")
    return 0.5 * (a + a.T)


def asym(a) -> np.ndarray:
    """Antisymmetric part (a - a^T) / 2."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"asym needs a square matrix, got {a.shape}")
    return 0.5 * (a - a.T)


@dataclass(frozen=True)
class BlockPartition:
    """Column partition (d_1, ..., d_q) of a total dimension d.

    The blocks may not exhaust d; the remainder d - sum(d_i) >= 0 forms a
    trailing block.  An empty ``sizes`` is allowed (q = 0), in which case
    the trailing block is everything.
    """

    sizes: tuple[int, ...]
    dim: int
    offsets: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if any(s <= 0 for s in sizes):
            raise DimensionError(f"block sizes must be positive: {sizes}")
        if self.dim <= 0:
            raise DimensionError(f"total dimension must be positive: {self.dim}")
        if sum(sizes) > self.dim:
            raise DimensionError(
                f"blocks {sizes} exceed total dimension {self.dim}"
            )
        # Offsets include the trailing block boundary, even when empty.
        bounds = [0]
        for s in sizes:
            bounds.append(bounds[-1] + s)
        bounds.append(self.dim)
        object.__setattr__(self, "offsets", tuple(bounds))

    @property
    def q(self) -> int:
        return len(self.sizes)

    @property
    def tail(self) -> int:
        return self.dim - sum(self.sizes)

    def diagonal_slices(self):
        """Slices of the q leading diagonal blocks."""
        for i in range(self.q):
            yield slice(self.offsets[i], self.offsets[i + 1])


def symf(a, part: BlockPartition) -> np.ndarray:
    """Blockwise symmetrizer used for block-diagonal quotient geometry.

    Acting on a d x d matrix: the first q diagonal blocks are preserved,
    every other block (i, j) is replaced by (a_[ij] + a_[ji]^T) / 2.  With
    no blocks this is ``sym``; with a single block covering everything it
    is the identity.  Linear, self-adjoint, and idempotent.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (part.dim, part.dim):
        raise DimensionError(
            f"symf needs a {part.dim}x{part.dim} matrix, got {a.shape}"
        )
    out = sym(a)
    for s in part.diagonal_slices():
        out[s, s] = a[s, s]
    return out


def eigh(a) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric eigendecomposition with eigenvalues sorted descending.

    The input must be symmetric up to 1e-10 * max(1, ||a||); it is
    symmetrized before factorization so slightly drifted matrices are
    accepted.  Returns (eigenvalues, eigenvectors) with a = U diag(w) U^T.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"eigh needs a square matrix, got {a.shape}")
    nrm = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > 1e-10 * max(1.0, nrm):
        raise NumericalError("matrix is not symmetric within tolerance")
    w, u = np.linalg.eigh(0.5 * (a + a.T))
    return w[::-1].copy(), u[:, ::-1].copy()


def qr_positive(a) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR with the diagonal of R forced positive.

    The sign convention makes the factorization unique, so retractions
    built on it are deterministic.  Raises on (near) rank deficiency.
    """
    a = as_matrix(a)
    n, d = a.shape
    if n < d:
        raise DimensionError(f"qr_positive needs n >= d, got {a.shape}")
    q, r = np.linalg.qr(a)
    diag = np.diagonal(r)
    tol = 1e-12 * max(1.0, np.linalg.norm(a))
    if np.min(np.abs(diag)) <= tol:
        raise NumericalError("matrix is rank-deficient within tolerance")
    signs = np.sign(diag)
    return q * signs, signs[:, None] * r


class ProductVector(tuple):
    """Ambient vector with several matrix blocks; arithmetic is blockwise.

    Used for product ambient spaces (e.g. an (n x p, p x p) pair) and for
    stacked constraint values.  Scalar multiplication and addition mirror
    ndarray semantics so generic solver code works unchanged.
    """

    # Keep numpy scalars from broadcasting over the tuple.
    __array_ufunc__ = None

    def __new__(cls, parts):
        return super().__new__(cls, tuple(parts))

    def __add__(self, other):
        return ProductVector(a + b for a, b in zip(self, other, strict=True))

    def __radd__(self, other):
        return ProductVector(b + a for a, b in zip(self, other, strict=True))

    def __sub__(self, other):
        return ProductVector(a - b for a, b in zip(self, other, strict=True))

    def __rsub__(self, other):
        return ProductVector(b - a for a, b in zip(self, other, strict=True))

    def __mul__(self, scalar):
        return ProductVector(a * scalar for a in self)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return ProductVector(a / scalar for a in self)

    def __neg__(self):
        return ProductVector(-a for a in self)


def vec_inner(a, b) -> float:
    """Trace inner product extended blockwise to product vectors."""
    if isinstance(a, ProductVector) or isinstance(b, ProductVector):
        return sum(vec_inner(x, y) for x, y in zip(a, b, strict=True))
    return trr_inner(a, b)


def vec_norm(a) -> float:
    return vec_inner(a, a) ** 0.5


def vec_zeros_like(a):
    if isinstance(a, ProductVector):
        return ProductVector(vec_zeros_like(x) for x in a)
    return np.zeros_like(np.asarray(a, dtype=float))


def vec_size(a) -> int:
    """Number of scalar entries in an ambient vector container."""
    if isinstance(a, ProductVector):
        return sum(vec_size(x) for x in a)
    return int(np.asarray(a).size)
