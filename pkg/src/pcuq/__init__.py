"""Coupled input and surrogate-model uncertainty propagation via polynomial chaos."""

from .basis import BasisSet, build_design_matrix, enumerate_basis, eval_basis, hermite_1d
from .designs import (
    Design,
    DesignKind,
    gauss_hermite_1d,
    lhs_design,
    smolyak_design,
    tensor_design,
)
from .distributions import (
    DistributionSpec,
    Family,
    InputSpace,
    cdf,
    inv_cdf,
    native_params,
    u_to_x,
    x_to_u,
)
from .gp import (
    GpConfig,
    GpModel,
    GridSurrogate,
    ProbabilisticSurrogate,
    gp_train,
    load_grid_surrogate,
)
from .models import PlateStandInModel, ShaftModel, shaft_margin
from .pce import (
    PceModel,
    SobolReport,
    empirical_cdf,
    fit_least_squares,
    fit_projection,
    load_pce,
    moments,
    pce_eval,
    save_pce,
    sobol_indices,
)
from .pipeline import (
    DesignConfig,
    UqProblem,
    UqResult,
    coupled_sample_outputs,
    mcs_oracle,
    run_uq,
    training_size_study,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSet",
    "Design",
    "DesignConfig",
    "DesignKind",
    "DistributionSpec",
    "Family",
    "GpConfig",
    "GpModel",
    "GridSurrogate",
    "InputSpace",
    "PceModel",
    "PlateStandInModel",
    "ProbabilisticSurrogate",
    "ShaftModel",
    "SobolReport",
    "UqProblem",
    "UqResult",
    "build_design_matrix",
    "cdf",
    "coupled_sample_outputs",
    "empirical_cdf",
    "enumerate_basis",
    "eval_basis",
    "fit_least_squares",
    "fit_projection",
    "gauss_hermite_1d",
    "gp_train",
    "hermite_1d",
    "inv_cdf",
    "lhs_design",
    "load_grid_surrogate",
    "load_pce",
    "mcs_oracle",
    "moments",
    "native_params",
    "pce_eval",
    "run_uq",
    "save_pce",
    "shaft_margin",
    "smolyak_design",
    "sobol_indices",
    "tensor_design",
    "training_size_study",
    "u_to_x",
    "x_to_u",
]
