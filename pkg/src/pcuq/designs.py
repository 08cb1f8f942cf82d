"""Standard-normal training designs: LHS, tensor quadrature, sparse grid.

All quadrature rules use the probabilists' convention: the weight function is
the standard normal density, so weights sum to one and the rules integrate
polynomials against N(0, 1) moments directly.
"""

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .basis import _compositions
from .errors import DesignSizeError, InvalidParameterError
from .stdnorm import std_normal_icdf

MAX_RULE_POINTS = 30
DEFAULT_POINT_CAP = 10**6

# Coordinates closer than this are treated as the same sparse-grid node.
MERGE_TOL = 1e-12

# Sparse-grid level -> size of the underlying 1-D rule.
SMOLYAK_RULE_SIZES = (1, 3, 7)


class DesignKind(str, Enum):
    LHS = "lhs"
    TENSOR_QUADRATURE = "tensor"
    SMOLYAK = "smolyak"


@dataclass(frozen=True)
class Design:
    """A set of standard-normal sample points, with weights when quadrature.

    LHS designs carry no weights; quadrature designs always do, normalized to
    sum to one.
    """

    points: np.ndarray
    weights: np.ndarray | None
    kind: DesignKind

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            object.__setattr__(self, "weights", w)
            if w.shape != (pts.shape[0],):
                raise InvalidParameterError("weights length must match point count")
            if abs(w.sum() - 1.0) > 1e-12:
                raise InvalidParameterError(
                    f"quadrature weights must sum to 1, got {w.sum()!r}"
                )

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


def lhs_design(n_points: int, dimension: int, seed: int) -> Design:
    """Latin hypercube design mapped to standard normal coordinates.

    Per dimension the unit interval is cut into `n_points` equiprobable
    strata; each stratum receives exactly one point, placed uniformly inside
    the stratum and mapped through the normal inverse CDF. Output is fully
    determined by (n_points, dimension, seed).
    """
    if n_points < 1:
        raise InvalidParameterError(f"n_points must be >= 1, got {n_points}")
    if dimension < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {dimension}")
    rng = np.random.default_rng(seed)
    points = np.empty((n_points, dimension))
    for d in range(dimension):
        strata = rng.permutation(n_points)
        jitter = rng.random(n_points)
        points[:, d] = std_normal_icdf((strata + jitter) / n_points)
    return Design(points=points, weights=None, kind=DesignKind.LHS)


def gauss_hermite_1d(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the probabilists' Gauss-Hermite rule.

    Computed Golub-Welsch style: eigenvalues of the symmetric tridiagonal
    Jacobi matrix of the recurrence (diagonal 0, off-diagonal sqrt(j)) are the
    nodes, squared first eigenvector components the weights. The rule
    integrates polynomials of degree <= 2 n_points - 1 exactly against the
    standard normal density; nodes are symmetric about 0 and weights sum to 1.
    """
    if not 1 <= n_points <= MAX_RULE_POINTS:
        raise InvalidParameterError(
            f"n_points must be in [1, {MAX_RULE_POINTS}], got {n_points}"
        )
    if n_points == 1:
        return np.array([0.0]), np.array([1.0])
    off_diagonal = np.sqrt(np.arange(1.0, n_points))
    nodes, vectors = eigh_tridiagonal(np.zeros(n_points), off_diagonal)
    weights = vectors[0] ** 2
    # Symmetrize: exact rules are symmetric, the eigensolver only nearly so.
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    if n_points % 2 == 1:
        nodes[n_points // 2] = 0.0
    weights /= weights.sum()
    return nodes, weights


def tensor_design(
    dimension: int, points_per_axis: int, cap: int = DEFAULT_POINT_CAP
) -> Design:
    """Full tensor product of 1-D Gauss-Hermite rules.

    Point ordering is the odometer over axes with the last axis changing
    fastest; weights are products of the 1-D weights.
    """
    if dimension < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {dimension}")
    if points_per_axis < 1:
        raise InvalidParameterError(
            f"points_per_axis must be >= 1, got {points_per_axis}"
        )
    n_total = points_per_axis**dimension
    if n_total > cap:
        raise DesignSizeError(
            f"tensor grid would have {n_total} points, cap is {cap}"
        )
    nodes, weights = gauss_hermite_1d(points_per_axis)
    grids = np.meshgrid(*([nodes] * dimension), indexing="ij")
    points = np.stack([g.reshape(-1) for g in grids], axis=1)
    w_grids = np.meshgrid(*([weights] * dimension), indexing="ij")
    w = np.ones(n_total)
    for g in w_grids:
        w = w * g.reshape(-1)
    w /= w.sum()
    return Design(points=points, weights=w, kind=DesignKind.TENSOR_QUADRATURE)


def _difference_rules(level: int) -> list[list[tuple[float, float]]]:
    """Per-level 1-D difference rules as (node, signed weight) lists."""
    rules = [gauss_hermite_1d(SMOLYAK_RULE_SIZES[k]) for k in range(level + 1)]
    deltas = []
    for k in range(level + 1):
        entries = [(x, w) for x, w in zip(*rules[k])]
        if k > 0:
            entries += [(x, -w) for x, w in zip(*rules[k - 1])]
        deltas.append(entries)
    return deltas


def smolyak_design(dimension: int, level: int) -> Design:
    """Sparse-grid combination of Gauss-Hermite rules.

    Sums tensor products of 1-D difference rules over all per-axis levels
    with total level <= `level`, using rule sizes 1, 3, 7 for levels 0, 1, 2.
    Coinciding points across sub-grids are merged with summed (possibly
    negative) weights. At level 1 the grid is the center point plus the two
    nonzero 3-point nodes on each axis, 2 * dimension + 1 points in total.
    """
    if dimension < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {dimension}")
    if level not in range(len(SMOLYAK_RULE_SIZES)):
        raise InvalidParameterError(
            f"level must be in {{0, 1, 2}}, got {level}"
        )
    deltas = _difference_rules(level)
    accumulated: dict[tuple[int, ...], tuple[np.ndarray, float]] = {}
    per_axis_levels = itertools.chain.from_iterable(
        _compositions(total, dimension) for total in range(level + 1)
    )
    for combo in per_axis_levels:
        for entries in itertools.product(*(deltas[k] for k in combo)):
            point = np.array([e[0] for e in entries])
            weight = float(np.prod([e[1] for e in entries]))
            key = tuple(int(round(c / MERGE_TOL)) for c in point)
            if key in accumulated:
                accumulated[key] = (accumulated[key][0], accumulated[key][1] + weight)
            else:
                accumulated[key] = (point, weight)
    ordered = sorted(accumulated.values(), key=lambda pw: tuple(pw[0]))
    points = np.array([pw[0] for pw in ordered])
    weights = np.array([pw[1] for pw in ordered])
    weights /= weights.sum()
    return Design(points=points, weights=weights, kind=DesignKind.SMOLYAK)
