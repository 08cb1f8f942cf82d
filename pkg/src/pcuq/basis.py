"""Total-degree multi-index sets and orthonormal multivariate Hermite bases.

The univariate building block is the probabilists' Hermite family

    H_0(u) = 1,  H_1(u) = u,  H_j(u) = u H_{j-1}(u) - (j-1) H_{j-2}(u),

orthogonal under the standard normal density with E[H_j^2] = j!. All
multivariate evaluations are orthonormalized, i.e. divided by sqrt(prod p_d!),
so that second moments of basis values are exactly one. That makes the output
variance the plain sum of squared non-constant coefficients and turns variance
decompositions into coefficient bookkeeping.
"""

from dataclasses import dataclass
from functools import cached_property
from math import comb, factorial, prod

import numpy as np

from .errors import DesignSizeError, DimensionMismatchError, InvalidParameterError

# Factorial normalization overflows double precision usefulness beyond this.
MAX_ORDER = 30

# Basis enumeration refuses to build more terms than this.
DEFAULT_BASIS_CAP = 10**6


def hermite_1d(order: int, u):
    """Probabilists' Hermite polynomial H_order evaluated at u (elementwise)."""
    if order < 0:
        raise InvalidParameterError(f"order must be >= 0, got {order}")
    if order > MAX_ORDER:
        raise InvalidParameterError(f"order {order} exceeds cap {MAX_ORDER}")
    u = np.asarray(u, dtype=float)
    prev = np.ones_like(u)
    if order == 0:
        return prev
    cur = u.copy()
    for j in range(2, order + 1):
        prev, cur = cur, u * cur - (j - 1) * prev
    return cur


def _hermite_table(max_order: int, u: np.ndarray) -> np.ndarray:
    """Stack of H_0..H_max_order over u; shape (max_order+1,) + u.shape."""
    table = np.empty((max_order + 1,) + u.shape)
    table[0] = 1.0
    if max_order >= 1:
        table[1] = u
    for j in range(2, max_order + 1):
        table[j] = u * table[j - 1] - (j - 1) * table[j - 2]
    return table


def _compositions(total: int, parts: int):
    """Weak compositions of `total` into `parts`, first coordinate descending."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


@dataclass(frozen=True)
class BasisSet:
    """An ordered total-degree multi-index set for dimension `dimension`.

    Indices are graded lexicographic: ascending total degree, and within a
    degree the leading coordinates carry the higher powers first. The first
    index is always all-zeros, so coefficient 0 is the constant term.
    """

    dimension: int
    max_order: int
    indices: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.indices)

    @cached_property
    def powers(self) -> np.ndarray:
        """Indices as an integer array of shape (terms, dimension)."""
        return np.array(self.indices, dtype=int)

    @cached_property
    def norms(self) -> np.ndarray:
        """sqrt(prod p_d!) per index; dividing by these orthonormalizes."""
        return np.array(
            [np.sqrt(float(prod(factorial(p) for p in idx))) for idx in self.indices]
        )


def enumerate_basis(dimension: int, max_order: int, cap: int = DEFAULT_BASIS_CAP) -> BasisSet:
    """All multi-indices of total degree <= max_order in graded-lex order.

    The count is C(dimension + max_order, max_order); exceeding `cap` raises
    DesignSizeError before any enumeration work is done.
    """
    if dimension < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {dimension}")
    if max_order < 0:
        raise InvalidParameterError(f"max_order must be >= 0, got {max_order}")
    if max_order > MAX_ORDER:
        raise InvalidParameterError(f"max_order {max_order} exceeds cap {MAX_ORDER}")
    count = comb(dimension + max_order, max_order)
    if count > cap:
        raise DesignSizeError(f"basis would have {count} terms, cap is {cap}")
    indices = []
    for degree in range(max_order + 1):
        indices.extend(_compositions(degree, dimension))
    return BasisSet(dimension=dimension, max_order=max_order, indices=tuple(indices))


def eval_basis(basis: BasisSet, u) -> np.ndarray:
    """Orthonormal basis values at a single point u of shape (dimension,)."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.shape[0] != basis.dimension:
        raise DimensionMismatchError(
            f"point has shape {u.shape}, expected ({basis.dimension},)"
        )
    return build_design_matrix(basis, u[None, :])[0]


def build_design_matrix(basis: BasisSet, points) -> np.ndarray:
    """Evaluate every basis function at every point; shape (N, terms).

    Row j holds the orthonormal basis values at points[j]; column 0 is all
    ones. Evaluation shares one Hermite recurrence table across all indices.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != basis.dimension:
        raise DimensionMismatchError(
            f"points have shape {points.shape}, expected (N, {basis.dimension})"
        )
    table = _hermite_table(basis.max_order, points)  # (order+1, N, D)
    powers = basis.powers
    matrix = np.ones((points.shape[0], len(basis)))
    for k, idx in enumerate(powers):
        for d, p in enumerate(idx):
            if p > 0:
                matrix[:, k] *= table[p, :, d]
    return matrix / basis.norms[None, :]
