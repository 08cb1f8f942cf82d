"""Polynomial chaos models: coefficient fits, moments, sensitivity indices.

Because the basis is orthonormal, the fitted coefficient vector alone carries
the output statistics: the constant coefficient is the mean, the sum of the
remaining squared coefficients is the variance, and grouping squared
coefficients by which variables their multi-indices touch yields variance
shares (Sobol' indices) without any further sampling.
"""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .basis import BasisSet, build_design_matrix, enumerate_basis
from .designs import Design
from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    MissingWeightsError,
    UnderdeterminedError,
    ZeroVarianceError,
)

# Least-squares condition number beyond which a fit is flagged as shaky.
CONDITION_WARN_THRESHOLD = 1e10


class RankDeficiencyWarning(UserWarning):
    """The regression matrix is close to rank deficient."""


@dataclass(frozen=True)
class PceModel:
    """Coefficients over a basis plus diagnostics of the fit that made them."""

    basis: BasisSet
    coefficients: np.ndarray
    residual_norm: float
    condition: float | None
    method: str

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", coef)
        if coef.shape != (len(self.basis),):
            raise DimensionMismatchError(
                f"{coef.shape[0]} coefficients for {len(self.basis)} basis terms"
            )


class Moments(NamedTuple):
    mean: float
    variance: float
    std: float


class CdfTable(NamedTuple):
    values: np.ndarray
    probabilities: np.ndarray


@dataclass(frozen=True)
class SobolReport:
    """First- and total-order variance shares per input variable."""

    labels: tuple[str, ...]
    first_order: np.ndarray
    total_order: np.ndarray
    total_variance: float


def fit_least_squares(basis: BasisSet, points, outputs) -> PceModel:
    """Least-squares coefficient fit on an unweighted design.

    Solves min ||design_matrix @ coef - outputs|| by orthogonal factorization
    (never by forming the normal equations). Requires at least as many samples
    as basis terms; ill-conditioned systems trigger RankDeficiencyWarning.
    """
    points = np.asarray(points, dtype=float)
    y = np.asarray(outputs, dtype=float)
    n_terms = len(basis)
    if points.shape[0] != y.shape[0]:
        raise DimensionMismatchError(
            f"{points.shape[0]} points but {y.shape[0]} outputs"
        )
    if y.shape[0] < n_terms:
        raise UnderdeterminedError(
            f"{y.shape[0]} samples cannot determine {n_terms} coefficients; "
            "use a quadrature design with fit_projection instead"
        )
    matrix = build_design_matrix(basis, points)
    coef, _, _, singular_values = np.linalg.lstsq(matrix, y, rcond=None)
    smallest = singular_values[-1]
    condition = float(singular_values[0] / smallest) if smallest > 0 else np.inf
    if condition > CONDITION_WARN_THRESHOLD:
        warnings.warn(
            f"design matrix condition {condition:.3e} exceeds "
            f"{CONDITION_WARN_THRESHOLD:.0e}; coefficients may be unreliable",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    residual = float(np.linalg.norm(matrix @ coef - y))
    return PceModel(
        basis=basis,
        coefficients=coef,
        residual_norm=residual,
        condition=condition,
        method="least_squares",
    )


def fit_projection(basis: BasisSet, design: Design, outputs) -> PceModel:
    """Discrete projection on a quadrature design.

    Each coefficient is the weighted sum of outputs times the corresponding
    basis values, exact whenever the rule's degree of exactness covers the
    integrand. The design must carry quadrature weights.
    """
    if design.weights is None:
        raise MissingWeightsError("projection requires a design with weights")
    y = np.asarray(outputs, dtype=float)
    if design.n_points != y.shape[0]:
        raise DimensionMismatchError(
            f"{design.n_points} design points but {y.shape[0]} outputs"
        )
    matrix = build_design_matrix(basis, design.points)
    coef = matrix.T @ (design.weights * y)
    residual = float(np.linalg.norm(matrix @ coef - y))
    return PceModel(
        basis=basis,
        coefficients=coef,
        residual_norm=residual,
        condition=None,
        method="projection",
    )


def pce_eval(model: PceModel, u) -> np.ndarray | float:
    """Evaluate the expansion at one point (dimension,) or a batch (N, dimension)."""
    u_arr = np.asarray(u, dtype=float)
    batch = u_arr[None, :] if u_arr.ndim == 1 else u_arr
    values = build_design_matrix(model.basis, batch) @ model.coefficients
    return values if u_arr.ndim == 2 else float(values[0])


def moments(model: PceModel) -> Moments:
    """Mean, variance and std read directly off the coefficients."""
    coef = model.coefficients
    variance = float(np.sum(coef[1:] ** 2))
    return Moments(mean=float(coef[0]), variance=variance, std=float(np.sqrt(variance)))


def sobol_indices(model: PceModel, variable_labels) -> SobolReport:
    """Variance shares per variable from squared coefficients.

    The first-order index of variable i collects coefficients whose
    multi-index is nonzero only in position i; the total-order index collects
    all coefficients whose multi-index touches position i at all.
    """
    labels = tuple(variable_labels)
    dimension = model.basis.dimension
    if len(labels) != dimension:
        raise DimensionMismatchError(
            f"{len(labels)} labels for dimension {dimension}"
        )
    total_variance = moments(model).variance
    if total_variance <= 0.0:
        raise ZeroVarianceError("sensitivity indices undefined for zero variance")
    squared = model.coefficients**2
    active = model.basis.powers > 0  # (terms, dimension)
    n_active = active.sum(axis=1)
    first = np.empty(dimension)
    total = np.empty(dimension)
    for i in range(dimension):
        only_i = active[:, i] & (n_active == 1)
        first[i] = squared[only_i].sum() / total_variance
        total[i] = squared[active[:, i]].sum() / total_variance
    return SobolReport(
        labels=labels,
        first_order=first,
        total_order=total,
        total_variance=total_variance,
    )


def empirical_cdf(model: PceModel, n_samples: int, seed: int) -> CdfTable:
    """Monte Carlo CDF of the expansion under standard normal inputs.

    Returns sorted sample values paired with cumulative probabilities
    (i + 1) / n_samples; deterministic for a fixed seed.
    """
    if n_samples < 1:
        raise InvalidParameterError(f"n_samples must be >= 1, got {n_samples}")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n_samples, model.basis.dimension))
    values = np.sort(pce_eval(model, u))
    probabilities = np.arange(1, n_samples + 1) / n_samples
    return CdfTable(values=values, probabilities=probabilities)


def save_pce(model: PceModel, path) -> None:
    """Write the model as a plain text file that round-trips bit-exactly."""
    lines = [
        "pce-model v1",
        f"dimension {model.basis.dimension}",
        f"max_order {model.basis.max_order}",
        f"terms {len(model.basis)}",
    ]
    for idx, coef in zip(model.basis.indices, model.coefficients):
        powers = " ".join(str(p) for p in idx)
        lines.append(f"{powers} {coef:.17g}")
    with open(path, "w", encoding="ascii") as handle:
        handle.write("\n".join(lines) + "\n")


def load_pce(path) -> PceModel:
    """Read a model written by save_pce."""
    with open(path, encoding="ascii") as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines or lines[0] != "pce-model v1":
        raise InvalidParameterError(f"{path}: not a pce-model v1 file")
    header = dict(line.split() for line in lines[1:4])
    dimension = int(header["dimension"])
    max_order = int(header["max_order"])
    n_terms = int(header["terms"])
    body = lines[4:]
    if len(body) != n_terms:
        raise InvalidParameterError(
            f"{path}: expected {n_terms} coefficient lines, found {len(body)}"
        )
    indices = []
    coefficients = []
    for line in body:
        parts = line.split()
        indices.append(tuple(int(p) for p in parts[:dimension]))
        coefficients.append(float(parts[dimension]))
    basis = enumerate_basis(dimension, max_order)
    if tuple(indices) != basis.indices:
        raise InvalidParameterError(f"{path}: index set is not graded-lex complete")
    return PceModel(
        basis=basis,
        coefficients=np.array(coefficients),
        residual_norm=0.0,
        condition=None,
        method="loaded",
    )
