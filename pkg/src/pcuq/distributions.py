"""Marginal input distributions and transforms to/from standard normal space.

Each marginal is parameterized by its mean and standard deviation at the user
boundary; family-specific (native) parameters are derived internally by moment
matching. Marginals are independent, so the transform between physical space
and standard normal space factorizes per component:

    u_i = icdf_N(F_i(x_i))        and        x_i = F_i^{-1}(cdf_N(u_i))

where F_i is the marginal CDF and cdf_N/icdf_N the standard normal pair.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, InvalidParameterError, SupportError
from .stdnorm import std_normal_cdf, std_normal_icdf

# Euler-Mascheroni constant, used by the Gumbel moment match.
EULER_GAMMA = 0.5772156649015329


class Family(str, Enum):
    NORMAL = "normal"
    LOGNORMAL = "lognormal"
    UNIFORM = "uniform"
    GUMBEL_MAX = "gumbel_max"


@dataclass(frozen=True)
class DistributionSpec:
    """A marginal distribution given by family, mean and standard deviation.

    ``std`` must be positive, and a lognormal additionally needs a positive
    mean. Instances are immutable and safe to share.
    """

    name: str
    family: Family
    mean: float
    std: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "std", float(self.std))
        if not np.isfinite(self.mean) or not np.isfinite(self.std):
            raise InvalidParameterError(f"{self.name}: mean/std must be finite")
        if self.std <= 0.0:
            raise InvalidParameterError(f"{self.name}: std must be > 0, got {self.std}")
        if self.family is Family.LOGNORMAL and self.mean <= 0.0:
            raise InvalidParameterError(
                f"{self.name}: lognormal mean must be > 0, got {self.mean}"
            )


def native_params(spec: DistributionSpec) -> dict:
    """Family-native parameters matched to the spec's mean and std.

    Returns a dict keyed by the conventional parameter names:

    - normal:     ``loc``, ``scale``
    - lognormal:  ``log_loc``, ``log_scale`` (mean/std of ln X)
    - uniform:    ``lower``, ``upper``
    - gumbel_max: ``loc``, ``scale``
    """
    m, s = spec.mean, spec.std
    if spec.family is Family.NORMAL:
        return {"loc": m, "scale": s}
    if spec.family is Family.LOGNORMAL:
        log_var = np.log1p((s / m) ** 2)
        return {"log_loc": np.log(m) - 0.5 * log_var, "log_scale": np.sqrt(log_var)}
    if spec.family is Family.UNIFORM:
        half_width = np.sqrt(3.0) * s
        return {"lower": m - half_width, "upper": m + half_width}
    if spec.family is Family.GUMBEL_MAX:
        scale = s * np.sqrt(6.0) / np.pi
        return {"loc": m - EULER_GAMMA * scale, "scale": scale}
    raise InvalidParameterError(f"unknown family {spec.family!r}")


def support(spec: DistributionSpec) -> tuple[float, float]:
    """Closed support interval (endpoints may be infinite)."""
    if spec.family is Family.LOGNORMAL:
        return (0.0, np.inf)
    if spec.family is Family.UNIFORM:
        p = native_params(spec)
        return (p["lower"], p["upper"])
    return (-np.inf, np.inf)


def cdf(spec: DistributionSpec, x):
    """Marginal CDF, elementwise; saturates to 0/1 in the tails."""
    x = np.asarray(x, dtype=float)
    p = native_params(spec)
    if spec.family is Family.NORMAL:
        return std_normal_cdf((x - p["loc"]) / p["scale"])
    if spec.family is Family.LOGNORMAL:
        safe = np.where(x > 0.0, x, 1.0)
        vals = std_normal_cdf((np.log(safe) - p["log_loc"]) / p["log_scale"])
        return np.where(x > 0.0, vals, 0.0)
    if spec.family is Family.UNIFORM:
        return np.clip((x - p["lower"]) / (p["upper"] - p["lower"]), 0.0, 1.0)
    # Gumbel (max form): exp(-exp(-(x - loc)/scale))
    return np.exp(-np.exp(-(x - p["loc"]) / p["scale"]))


def inv_cdf(spec: DistributionSpec, prob):
    """Marginal quantile function for probabilities in the open interval (0, 1)."""
    prob = np.asarray(prob, dtype=float)
    if np.any(prob <= 0.0) or np.any(prob >= 1.0):
        raise InvalidParameterError(f"{spec.name}: probability must be in (0, 1)")
    p = native_params(spec)
    if spec.family is Family.NORMAL:
        return p["loc"] + p["scale"] * std_normal_icdf(prob)
    if spec.family is Family.LOGNORMAL:
        return np.exp(p["log_loc"] + p["log_scale"] * std_normal_icdf(prob))
    if spec.family is Family.UNIFORM:
        return p["lower"] + prob * (p["upper"] - p["lower"])
    return p["loc"] - p["scale"] * np.log(-np.log(prob))


def sample(spec: DistributionSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw `size` samples from the native parameterization."""
    p = native_params(spec)
    if spec.family is Family.NORMAL:
        return rng.normal(p["loc"], p["scale"], size)
    if spec.family is Family.LOGNORMAL:
        return rng.lognormal(p["log_loc"], p["log_scale"], size)
    if spec.family is Family.UNIFORM:
        return rng.uniform(p["lower"], p["upper"], size)
    return rng.gumbel(p["loc"], p["scale"], size)


@dataclass(frozen=True)
class InputSpace:
    """An ordered collection of independent marginals.

    The ordering fixes the canonical variable ordering used by every
    downstream design, basis and report.
    """

    marginals: tuple[DistributionSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.marginals) < 1:
            raise InvalidParameterError("input space needs at least one marginal")

    @property
    def dimension(self) -> int:
        return len(self.marginals)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.marginals)


def _check_columns(space: InputSpace, arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(arr, dtype=float))
    if arr.shape[1] != space.dimension:
        raise DimensionMismatchError(
            f"{what} has {arr.shape[1]} columns, expected {space.dimension}"
        )
    return arr


def u_to_x(space: InputSpace, u):
    """Map standard normal coordinates to physical space, componentwise.

    Accepts a single point of shape (n,) or a batch of shape (N, n); the
    output matches the input shape. The origin maps to the marginal medians.
    """
    u_arr = np.asarray(u, dtype=float)
    batch = _check_columns(space, u_arr, "u")
    out = np.empty_like(batch)
    for i, marg in enumerate(space.marginals):
        out[:, i] = inv_cdf(marg, std_normal_cdf(batch[:, i]))
    return out if u_arr.ndim == 2 else out[0]


def x_to_u(space: InputSpace, x):
    """Map physical coordinates to standard normal space, componentwise.

    Raises SupportError if any component lies outside its marginal's support.
    """
    x_arr = np.asarray(x, dtype=float)
    batch = _check_columns(space, x_arr, "x")
    out = np.empty_like(batch)
    for i, marg in enumerate(space.marginals):
        lo, hi = support(marg)
        col = batch[:, i]
        if np.any(col < lo) or np.any(col > hi) or (
            marg.family is Family.LOGNORMAL and np.any(col <= 0.0)
        ):
            raise SupportError(f"{marg.name}: value outside support [{lo}, {hi}]")
        out[:, i] = std_normal_icdf(cdf(marg, col))
    return out if x_arr.ndim == 2 else out[0]
