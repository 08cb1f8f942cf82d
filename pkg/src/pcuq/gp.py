"""Probabilistic surrogates: the predict contract, GP regression, grid files.

A surrogate is anything that returns a predictive mean and a nonnegative
predictive standard deviation for a physical-space input. The GP here is the
reference implementation: anisotropic squared-exponential kernel, zero-mean on
standardized outputs, hyperparameters from multi-start maximization of the log
marginal likelihood. A file-backed surrogate interpolates precomputed
mean/std tables so externally trained models can be consumed as-is.
"""

import csv
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from .errors import (
    DegenerateDataError,
    DimensionMismatchError,
    GridFormatError,
    InvalidParameterError,
    NotPositiveDefiniteError,
)

_PREDICT_CHUNK = 8192

# Escalation ceiling for the diagonal nudge, relative to the kernel amplitude.
_MAX_EXTRA_JITTER = 1e-4


class ProbabilisticSurrogate(ABC):
    """Predictive mean and standard deviation at physical-space points."""

    @abstractmethod
    def predict(self, x) -> tuple[float, float]:
        """Return (mean, std) at a single input point; std is >= 0."""

    def predict_batch(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized predict; default implementation loops over rows."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        pairs = [self.predict(row) for row in points]
        means = np.array([p[0] for p in pairs])
        stds = np.array([p[1] for p in pairs])
        return means, stds

    @property
    def description(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class GpConfig:
    """Training controls: jitter floor, restarts and their seed."""

    jitter: float = 1e-10
    restarts: int = 8
    seed: int = 0
    max_iter: int = 150
    ftol: float = 1e-8


class GpModel(ProbabilisticSurrogate):
    """GP posterior with a squared-exponential kernel, in physical units.

    k(x, x') = sigma_f^2 exp(-0.5 sum_d ((x_d - x'_d) / length_scales_d)^2)

    The prior mean is the constant `mean_const`; `noise_variance` is the
    diagonal nudge keeping the kernel matrix positive definite. The kernel
    factorization is cached at construction, after which prediction is pure.
    """

    def __init__(self, inputs, outputs, sigma_f, length_scales, noise_variance,
                 mean_const=0.0):
        self.inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        self.outputs = np.asarray(outputs, dtype=float)
        if self.inputs.shape[0] != self.outputs.shape[0]:
            raise DimensionMismatchError("inputs and outputs disagree on sample count")
        self.sigma_f = float(sigma_f)
        self.length_scales = np.asarray(length_scales, dtype=float)
        if self.length_scales.shape != (self.inputs.shape[1],):
            raise DimensionMismatchError("one length-scale per input dimension required")
        if self.sigma_f <= 0 or np.any(self.length_scales <= 0):
            raise InvalidParameterError("kernel parameters must be positive")
        self.noise_variance = float(noise_variance)
        self.mean_const = float(mean_const)

        scaled = self.inputs / self.length_scales
        sq_dist = cdist(scaled, scaled, metric="sqeuclidean")
        kernel = self.sigma_f**2 * np.exp(-0.5 * sq_dist)
        self._chol, self.noise_variance = _chol_with_escalation(
            kernel, self.noise_variance, self.sigma_f**2
        )
        self._scaled_inputs = scaled
        self._alpha = cho_solve((self._chol, True), self.outputs - self.mean_const)

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    def predict(self, x) -> tuple[float, float]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_inputs,):
            raise DimensionMismatchError(
                f"point has shape {x.shape}, expected ({self.n_inputs},)"
            )
        means, stds = self.predict_batch(x[None, :])
        return float(means[0]), float(stds[0])

    def predict_batch(self, points) -> tuple[np.ndarray, np.ndarray]:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.n_inputs:
            raise DimensionMismatchError(
                f"points have {points.shape[1]} columns, expected {self.n_inputs}"
            )
        means = np.empty(points.shape[0])
        variances = np.empty(points.shape[0])
        for start in range(0, points.shape[0], _PREDICT_CHUNK):
            chunk = points[start:start + _PREDICT_CHUNK] / self.length_scales
            cross = self.sigma_f**2 * np.exp(
                -0.5 * cdist(chunk, self._scaled_inputs, metric="sqeuclidean")
            )
            means[start:start + _PREDICT_CHUNK] = self.mean_const + cross @ self._alpha
            v = solve_triangular(self._chol, cross.T, lower=True)
            variances[start:start + _PREDICT_CHUNK] = self.sigma_f**2 - np.sum(
                v**2, axis=0
            )
        stds = np.sqrt(np.clip(variances, 0.0, None))
        return means, stds

    @property
    def description(self) -> str:
        return (
            f"gp(m={self.inputs.shape[0]}, n={self.n_inputs}, "
            f"sigma_f={self.sigma_f:.6g})"
        )


def _chol_with_escalation(kernel, noise_variance, amplitude_sq):
    """Cholesky of kernel + noise*I, escalating the nudge when needed."""
    extra = max(noise_variance, 1e-16 * amplitude_sq)
    while True:
        try:
            chol = cholesky(kernel + extra * np.eye(kernel.shape[0]), lower=True)
            return chol, extra
        except np.linalg.LinAlgError:
            extra *= 100.0
            if extra > _MAX_EXTRA_JITTER * amplitude_sq:
                raise NotPositiveDefiniteError(
                    "kernel matrix not positive definite at maximum jitter"
                ) from None


def _neg_log_marginal_likelihood(theta, sq_diffs, z, jitter):
    """Negative LML and gradient; theta = (log amp^2, log length-scales)."""
    m = z.shape[0]
    amp_sq = np.exp(theta[0])
    lengths_sq = np.exp(2.0 * theta[1:])
    correlation = np.exp(-0.5 * np.tensordot(1.0 / lengths_sq, sq_diffs, axes=1))
    kernel = amp_sq * (correlation + jitter * np.eye(m))
    try:
        chol = cholesky(kernel, lower=True)
    except np.linalg.LinAlgError:
        return 1e25, np.zeros_like(theta)
    alpha = cho_solve((chol, True), z)
    lml = (
        -0.5 * z @ alpha
        - np.sum(np.log(np.diag(chol)))
        - 0.5 * m * np.log(2.0 * np.pi)
    )
    kernel_inv = cho_solve((chol, True), np.eye(m))
    w = np.outer(alpha, alpha) - kernel_inv
    grad = np.empty_like(theta)
    grad[0] = 0.5 * np.sum(w * kernel)
    for d in range(sq_diffs.shape[0]):
        dk = amp_sq * correlation * (sq_diffs[d] / lengths_sq[d])
        grad[d + 1] = 0.5 * np.sum(w * dk)
    return -lml, -grad


def gp_train(inputs, outputs, config: GpConfig = GpConfig()) -> GpModel:
    """Fit kernel hyperparameters by multi-start LML maximization.

    Inputs are standardized per dimension and outputs centered and scaled
    internally; the returned model is expressed back in physical units.
    Deterministic for a fixed config seed. Constant outputs yield a constant
    model with near-zero predictive std rather than an error.
    """
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(outputs, dtype=float)
    m, n = x.shape
    if y.shape != (m,):
        raise DimensionMismatchError(f"outputs shape {y.shape}, expected ({m},)")
    if m < 2 * n:
        raise InvalidParameterError(
            f"need at least {2 * n} samples for {n} inputs, got {m}"
        )
    if len(np.unique(x, axis=0)) != m:
        raise DegenerateDataError("duplicate training inputs")

    x_scale = x.std(axis=0)
    x_scale[x_scale == 0.0] = 1.0
    if np.ptp(y) == 0.0:
        level = float(y[0])
        tiny = 1e-8 * max(1.0, abs(level))
        return GpModel(
            inputs=x,
            outputs=y,
            sigma_f=tiny,
            length_scales=x_scale,
            noise_variance=config.jitter * tiny**2,
            mean_const=level,
        )

    x_shift = x.mean(axis=0)
    x_std = (x - x_shift) / x_scale
    y_shift = y.mean()
    y_scale = y.std()
    z = (y - y_shift) / y_scale

    sq_diffs = (x_std[:, None, :] - x_std[None, :, :]) ** 2  # (m, m, n)
    sq_diffs = np.moveaxis(sq_diffs, 2, 0)  # (n, m, m)

    rng = np.random.default_rng(config.seed)
    starts = [np.zeros(n + 1)]
    for _ in range(max(0, config.restarts - 1)):
        theta0 = np.empty(n + 1)
        theta0[0] = rng.uniform(np.log(0.25), np.log(4.0))
        theta0[1:] = rng.uniform(np.log(0.1), np.log(10.0))
        starts.append(theta0)

    bounds = [(np.log(1e-6), np.log(1e6))] + [(np.log(1e-3), np.log(1e4))] * n
    best = None
    for theta0 in starts:
        result = minimize(
            _neg_log_marginal_likelihood,
            theta0,
            args=(sq_diffs, z, config.jitter),
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": config.max_iter, "ftol": config.ftol},
        )
        if best is None or result.fun < best.fun:
            best = result

    amp_sq = np.exp(best.x[0])
    lengths = np.exp(best.x[1:])
    sigma_f = y_scale * np.sqrt(amp_sq)
    return GpModel(
        inputs=x,
        outputs=y,
        sigma_f=sigma_f,
        length_scales=lengths * x_scale,
        noise_variance=config.jitter * sigma_f**2,
        mean_const=y_shift,
    )


def export_training_csv(inputs, outputs, path) -> None:
    """Write the training set as `x1,...,xn,y` for audit."""
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(outputs, dtype=float)
    with open(path, "w", newline="", encoding="ascii") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"x{i + 1}" for i in range(x.shape[1])] + ["y"])
        for row, value in zip(x, y):
            writer.writerow([f"{v:.17g}" for v in row] + [f"{value:.17g}"])


class GridSurrogate(ProbabilisticSurrogate):
    """Multilinear interpolation of tabulated (mean, std) on a tensor grid.

    Out-of-grid queries are clamped to the boundary; `clamp_count` records how
    many queries were affected.
    """

    def __init__(self, axes, mean_grid, std_grid, source=""):
        self.axes = tuple(np.asarray(a, dtype=float) for a in axes)
        self._mean = RegularGridInterpolator(self.axes, mean_grid, method="linear")
        self._std = RegularGridInterpolator(self.axes, std_grid, method="linear")
        self._source = source
        self.clamp_count = 0

    @property
    def n_inputs(self) -> int:
        return len(self.axes)

    def predict(self, x) -> tuple[float, float]:
        means, stds = self.predict_batch(np.asarray(x, dtype=float)[None, :])
        return float(means[0]), float(stds[0])

    def predict_batch(self, points) -> tuple[np.ndarray, np.ndarray]:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.n_inputs:
            raise DimensionMismatchError(
                f"points have {points.shape[1]} columns, expected {self.n_inputs}"
            )
        clamped = points.copy()
        for d, axis in enumerate(self.axes):
            clamped[:, d] = np.clip(clamped[:, d], axis[0], axis[-1])
        self.clamp_count += int(np.sum(np.any(clamped != points, axis=1)))
        return self._mean(clamped), self._std(clamped)

    @property
    def description(self) -> str:
        return f"grid_file({self._source})"


def load_grid_surrogate(path) -> GridSurrogate:
    """Load a `x1,...,xn,mean,std` CSV holding a regular tensor grid.

    Rows must enumerate the full Cartesian product of the per-axis values in
    row-major order (last axis fastest); anything else is rejected.
    """
    with open(path, newline="", encoding="ascii") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        rows = [[float(v) for v in row] for row in reader if row]
    if header is None or len(header) < 3 or header[-2:] != ["mean", "std"]:
        raise GridFormatError(f"{path}: header must be x1,...,xn,mean,std")
    n = len(header) - 2
    if header[:n] != [f"x{i + 1}" for i in range(n)]:
        raise GridFormatError(f"{path}: coordinate columns must be named x1..x{n}")
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != n + 2:
        raise GridFormatError(f"{path}: malformed data rows")
    coords, mean_col, std_col = data[:, :n], data[:, n], data[:, n + 1]
    if np.any(std_col < 0.0):
        raise GridFormatError(f"{path}: std column must be nonnegative")
    axes = [np.unique(coords[:, d]) for d in range(n)]
    sizes = [len(a) for a in axes]
    if any(size < 2 for size in sizes):
        raise GridFormatError(f"{path}: every axis needs at least 2 distinct values")
    if int(np.prod(sizes)) != data.shape[0]:
        raise GridFormatError(
            f"{path}: {data.shape[0]} rows do not form a "
            f"{'x'.join(map(str, sizes))} tensor grid"
        )
    expected = np.stack(
        [g.reshape(-1) for g in np.meshgrid(*axes, indexing="ij")], axis=1
    )
    if not np.array_equal(coords, expected):
        raise GridFormatError(
            f"{path}: rows are not the row-major enumeration of the grid"
        )
    return GridSurrogate(
        axes=axes,
        mean_grid=mean_col.reshape(sizes),
        std_grid=std_col.reshape(sizes),
        source=str(path),
    )
