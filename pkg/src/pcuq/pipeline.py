"""End-to-end propagation of coupled input and surrogate uncertainty.

The chain: append one extra standard-normal coordinate for the surrogate's
own prediction error, generate a training design in the combined space, turn
each design point into an output sample

    y = mean(x) + u_last * std(x),        x = u_to_x(u[:-1]),

fit a chaos expansion to those samples, and read moments and variance shares
off the coefficients. A plain Monte Carlo estimate over the same coupled
randomness serves as the reference answer.
"""

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .designs import Design, DesignKind, lhs_design, smolyak_design, tensor_design
from .distributions import InputSpace, sample, support, u_to_x
from .errors import InvalidParameterError, PcuqError, PipelineError
from .gp import GpConfig, ProbabilisticSurrogate, gp_train
from .pce import (
    PceModel,
    SobolReport,
    fit_least_squares,
    fit_projection,
    moments,
    sobol_indices,
)
from .basis import enumerate_basis

MODEL_UNCERTAINTY_LABEL = "model_uncertainty"

DEFAULT_ORDER = 2
MAX_SUPPORTED_ORDER = 4

# Half-width, in standard deviations, of the physical training box for GPs.
TRAINING_BOX_SIGMA = 4.0


@dataclass(frozen=True)
class DesignConfig:
    """Which training design to build in the combined standard-normal space."""

    method: str  # "lhs" | "tensor" | "smolyak"
    n_points: int | None = None  # lhs only
    seed: int = 0  # lhs only
    level: int = 1  # smolyak only


@dataclass(frozen=True)
class UqProblem:
    """Inputs, surrogate and expansion settings for one propagation run."""

    input_space: InputSpace
    surrogate: ProbabilisticSurrogate
    order: int = DEFAULT_ORDER
    design: DesignConfig = field(default_factory=lambda: DesignConfig(method="lhs", n_points=80))
    mcs_samples: int | None = None
    mcs_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.order <= MAX_SUPPORTED_ORDER:
            raise InvalidParameterError(
                f"order must be in [1, {MAX_SUPPORTED_ORDER}], got {self.order}"
            )

    @property
    def dimension(self) -> int:
        """Combined dimension: physical inputs plus the model-uncertainty axis."""
        return self.input_space.dimension + 1

    @property
    def labels(self) -> tuple[str, ...]:
        return self.input_space.names + (MODEL_UNCERTAINTY_LABEL,)


@dataclass(frozen=True)
class McsComparison:
    n_samples: int
    seed: int
    mean: float
    std: float
    relative_error_mean: float
    relative_error_std: float


@dataclass(frozen=True)
class UqResult:
    """Fitted expansion, its moments and variance shares, plus provenance."""

    pce: PceModel
    mean: float
    std: float
    sobol: SobolReport
    mcs: McsComparison | None
    provenance: dict


def build_design(problem: UqProblem) -> Design:
    """Materialize the configured design in the combined space."""
    cfg = problem.design
    dimension = problem.dimension
    if cfg.method == "lhs":
        if cfg.n_points is None:
            raise InvalidParameterError("lhs design requires n_points")
        return lhs_design(cfg.n_points, dimension, cfg.seed)
    if cfg.method == "tensor":
        return tensor_design(dimension, problem.order + 1)
    if cfg.method == "smolyak":
        return smolyak_design(dimension, cfg.level)
    raise InvalidParameterError(f"unknown design method {cfg.method!r}")


def coupled_sample_outputs(problem: UqProblem, points: np.ndarray) -> np.ndarray:
    """Output samples at combined-space points of shape (N, n+1).

    The last column scales the surrogate's predictive std, so a zero there
    returns the predictive mean exactly.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = problem.input_space.dimension
    if points.shape[1] != n + 1:
        raise PipelineError(
            "outputs", f"design has {points.shape[1]} columns, expected {n + 1}"
        )
    x = u_to_x(problem.input_space, points[:, :n])
    mean, std = problem.surrogate.predict_batch(x)
    return mean + points[:, n] * std


@dataclass(frozen=True)
class McsResult:
    mean: float
    std: float
    values: np.ndarray  # sorted output samples


def mcs_oracle(problem: UqProblem, n_samples: int, seed: int) -> McsResult:
    """Plain Monte Carlo over native inputs plus the model-uncertainty draw.

    Samples each marginal in its native parameterization, draws the extra
    standard-normal coordinate, evaluates the coupled output and returns the
    sample mean, the (n-1)-normalized sample std and the sorted samples.
    """
    if n_samples < 2:
        raise InvalidParameterError(f"n_samples must be >= 2, got {n_samples}")
    rng = np.random.default_rng(seed)
    space = problem.input_space
    x = np.empty((n_samples, space.dimension))
    for i, marginal in enumerate(space.marginals):
        x[:, i] = sample(marginal, rng, n_samples)
    u_model = rng.standard_normal(n_samples)
    mean, std = problem.surrogate.predict_batch(x)
    values = mean + u_model * std
    return McsResult(
        mean=float(values.mean()),
        std=float(values.std(ddof=1)),
        values=np.sort(values),
    )


def run_uq(problem: UqProblem) -> UqResult:
    """Design -> coupled outputs -> fit -> moments -> variance shares.

    Quadrature designs are fitted by discrete projection, LHS by least
    squares. Any stage failure is re-raised as PipelineError naming the stage.
    """
    try:
        design = build_design(problem)
    except PcuqError as err:
        raise PipelineError("design", str(err)) from err

    outputs = coupled_sample_outputs(problem, design.points)

    try:
        basis = enumerate_basis(problem.dimension, problem.order)
        if design.weights is not None:
            pce = fit_projection(basis, design, outputs)
        else:
            pce = fit_least_squares(basis, design.points, outputs)
    except PcuqError as err:
        raise PipelineError("fit", str(err)) from err

    stats = moments(pce)
    try:
        report = sobol_indices(pce, problem.labels)
    except PcuqError as err:
        raise PipelineError("sobol", str(err)) from err

    comparison = None
    if problem.mcs_samples is not None:
        try:
            oracle = mcs_oracle(problem, problem.mcs_samples, problem.mcs_seed)
        except PcuqError as err:
            raise PipelineError("mcs", str(err)) from err
        comparison = McsComparison(
            n_samples=problem.mcs_samples,
            seed=problem.mcs_seed,
            mean=oracle.mean,
            std=oracle.std,
            relative_error_mean=abs(stats.mean - oracle.mean) / abs(oracle.mean),
            relative_error_std=abs(stats.std - oracle.std) / oracle.std,
        )

    provenance = {
        "design": {
            "method": design.kind.value,
            "n_points": design.n_points,
            "seed": problem.design.seed if design.kind is DesignKind.LHS else None,
            "level": problem.design.level if design.kind is DesignKind.SMOLYAK else None,
        },
        "order": problem.order,
        "dimension": problem.dimension,
        "basis_size": len(pce.basis),
        "surrogate": problem.surrogate.description,
        "mcs_seed": problem.mcs_seed if problem.mcs_samples is not None else None,
        "labels": list(problem.labels),
    }
    return UqResult(
        pce=pce,
        mean=stats.mean,
        std=stats.std,
        sobol=report,
        mcs=comparison,
        provenance=provenance,
    )


def physical_box_lhs(space: InputSpace, n_points: int, seed: int,
                     box_sigma: float = TRAINING_BOX_SIGMA) -> np.ndarray:
    """Space-filling LHS over the box mean +- box_sigma*std, clipped to support.

    Used to generate surrogate training inputs in physical space; the box is
    uniform per dimension (not distribution-weighted).
    """
    rng = np.random.default_rng(seed)
    points = np.empty((n_points, space.dimension))
    for d, marginal in enumerate(space.marginals):
        lo_support, hi_support = support(marginal)
        lo = max(lo_support, marginal.mean - box_sigma * marginal.std)
        hi = min(hi_support, marginal.mean + box_sigma * marginal.std)
        if lo == 0.0 and lo_support == 0.0:
            lo = 1e-9 * max(marginal.mean, marginal.std)  # open support at zero
        strata = rng.permutation(n_points)
        jitter = rng.random(n_points)
        points[:, d] = lo + (strata + jitter) / n_points * (hi - lo)
    return points


@dataclass(frozen=True)
class StudySizeResult:
    training_points: int
    result: UqResult | None
    error: str | None


def training_size_study(true_model, sizes, input_space: InputSpace,
                        order: int = DEFAULT_ORDER,
                        design: DesignConfig | None = None,
                        gp_config: GpConfig = GpConfig(),
                        mcs_samples: int | None = None,
                        mcs_seed: int = 0) -> list[StudySizeResult]:
    """Re-train the surrogate at several training-set sizes and rerun the UQ.

    For each size m, a GP is trained on m space-filling samples of
    `true_model` (training seed = gp_config.seed + m, so designs are nested
    runs of one reproducible family), then the full pipeline runs with the
    same expansion settings. Failures for one size are recorded and the study
    continues.
    """
    if design is None:
        design = DesignConfig(method="tensor")
    entries = []
    for size in sizes:
        try:
            x_train = physical_box_lhs(input_space, size, gp_config.seed + size)
            y_train = np.asarray(true_model(x_train), dtype=float)
            surrogate = gp_train(x_train, y_train, gp_config)
            problem = UqProblem(
                input_space=input_space,
                surrogate=surrogate,
                order=order,
                design=design,
                mcs_samples=mcs_samples,
                mcs_seed=mcs_seed,
            )
            entries.append(StudySizeResult(size, run_uq(problem), None))
        except PcuqError as err:
            entries.append(StudySizeResult(size, None, str(err)))
    return entries


def result_to_dict(result: UqResult) -> dict:
    """JSON-ready view of a result; exact float round-trip via repr."""
    payload = {
        "mean": result.mean,
        "std": result.std,
        "variance": result.sobol.total_variance,
        "fit": {
            "method": result.pce.method,
            "residual_norm": result.pce.residual_norm,
            "condition": result.pce.condition,
        },
        "sobol": {
            "variables": list(result.sobol.labels),
            "first_order": [float(v) for v in result.sobol.first_order],
            "total_order": [float(v) for v in result.sobol.total_order],
        },
        "provenance": result.provenance,
    }
    if result.mcs is not None:
        payload["mcs"] = {
            "n_samples": result.mcs.n_samples,
            "seed": result.mcs.seed,
            "mean": result.mcs.mean,
            "std": result.mcs.std,
            "relative_error_mean": result.mcs.relative_error_mean,
            "relative_error_std": result.mcs.relative_error_std,
        }
    return payload


def _write_atomic(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    descriptor, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(descriptor, "w", encoding="ascii") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def write_report_json(payload: dict, path) -> None:
    """Deterministic JSON: sorted keys, no timestamps, atomic replace."""
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_sobol_csv(report: SobolReport, path) -> None:
    """`variable,first_order,total_order` rows at 17 significant digits."""
    lines = ["variable,first_order,total_order"]
    for label, first, total in zip(report.labels, report.first_order,
                                   report.total_order):
        lines.append(f"{label},{first:.17g},{total:.17g}")
    _write_atomic(path, "\n".join(lines) + "\n")


def write_study_csv(entries: list[StudySizeResult], path) -> None:
    """Long-format `size,variable,first_order,total_order` across all sizes."""
    lines = ["size,variable,first_order,total_order"]
    for entry in entries:
        if entry.result is None:
            continue
        report = entry.result.sobol
        for label, first, total in zip(report.labels, report.first_order,
                                       report.total_order):
            lines.append(
                f"{entry.training_points},{label},{first:.17g},{total:.17g}"
            )
    _write_atomic(path, "\n".join(lines) + "\n")
