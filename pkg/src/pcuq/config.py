"""Study configuration: JSON schema, validation, and problem assembly.

A study config is a JSON object with these keys (see configs/ for examples):

    inputs      list of {name, family, mean, std};
                family in {normal, lognormal, uniform, gumbel_max}
    surrogate   {kind: "gp_train", training_points, seed, jitter?, restarts?}
                or {kind: "grid_file", path}
    true_model  {kind: "shaft" | "plate_stand_in" | "grid_file", path?};
                required when the surrogate is trained here
    pce         {order, design: {method, n?, seed?, level?}}
    mcs         optional {n_samples, seed}
    outputs     optional {report, sobol_csv, cdf_csv, training_csv}

Validation errors name the offending key. Parsing is lossless: parse ->
serialize -> parse is the identity on the resolved form.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionSpec, Family, InputSpace
from .errors import ConfigError, InvalidParameterError
from .gp import GpConfig, gp_train, load_grid_surrogate
from .models import PlateStandInModel, ShaftModel
from .pipeline import (
    DesignConfig,
    MAX_SUPPORTED_ORDER,
    UqProblem,
    physical_box_lhs,
)

DESIGN_METHODS = ("lhs", "tensor", "smolyak")
SURROGATE_KINDS = ("gp_train", "grid_file")
TRUE_MODEL_KINDS = ("shaft", "plate_stand_in", "grid_file")

DEFAULT_OUTPUTS = {"report": "report.json", "sobol_csv": "sobol.csv"}


def _require(mapping: dict, key: str, kind, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}.{key}: missing required key")
    value = mapping[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if not isinstance(value, kind):
        raise ConfigError(
            f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}"
        )
    return value


@dataclass(frozen=True)
class SurrogateConfig:
    kind: str
    training_points: int | None = None
    seed: int = 0
    jitter: float = 1e-10
    restarts: int = 8
    path: str | None = None


@dataclass(frozen=True)
class TrueModelConfig:
    kind: str
    path: str | None = None


@dataclass(frozen=True)
class StudyConfig:
    inputs: tuple[DistributionSpec, ...]
    surrogate: SurrogateConfig
    true_model: TrueModelConfig | None
    order: int
    design: DesignConfig
    mcs_samples: int | None
    mcs_seed: int
    outputs: dict = field(default_factory=dict)

    @property
    def input_space(self) -> InputSpace:
        return InputSpace(self.inputs)

    def output_path(self, key: str, out_dir: str) -> str | None:
        name = {**DEFAULT_OUTPUTS, **self.outputs}.get(key)
        return None if name is None else os.path.join(out_dir, name)


def parse_config(raw: dict) -> StudyConfig:
    """Validate a raw JSON object; error messages name the offending key."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")

    inputs_raw = _require(raw, "inputs", list, "config")
    if not inputs_raw:
        raise ConfigError("config.inputs: must list at least one input")
    inputs = []
    for i, entry in enumerate(inputs_raw):
        where = f"config.inputs[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where}: expected an object")
        name = _require(entry, "name", str, where)
        family = _require(entry, "family", str, where)
        if family not in {f.value for f in Family}:
            raise ConfigError(
                f"{where}.family: unknown family {family!r}; choose from "
                f"{sorted(f.value for f in Family)}"
            )
        mean = _require(entry, "mean", float, where)
        std = _require(entry, "std", float, where)
        try:
            inputs.append(DistributionSpec(name=name, family=Family(family),
                                           mean=mean, std=std))
        except InvalidParameterError as err:
            raise ConfigError(f"{where}: {err}") from err

    surr_raw = _require(raw, "surrogate", dict, "config")
    kind = _require(surr_raw, "kind", str, "config.surrogate")
    if kind not in SURROGATE_KINDS:
        raise ConfigError(
            f"config.surrogate.kind: unknown kind {kind!r}; choose from "
            f"{list(SURROGATE_KINDS)}"
        )
    if kind == "gp_train":
        surrogate = SurrogateConfig(
            kind=kind,
            training_points=_require(surr_raw, "training_points", int,
                                     "config.surrogate"),
            seed=int(surr_raw.get("seed", 0)),
            jitter=float(surr_raw.get("jitter", 1e-10)),
            restarts=int(surr_raw.get("restarts", 8)),
        )
        if surrogate.training_points < 2 * (len(inputs)):
            raise ConfigError(
                "config.surrogate.training_points: need at least twice the "
                "input dimension"
            )
    else:
        surrogate = SurrogateConfig(
            kind=kind, path=_require(surr_raw, "path", str, "config.surrogate")
        )

    true_model = None
    if "true_model" in raw and raw["true_model"] is not None:
        tm_raw = _require(raw, "true_model", dict, "config")
        tm_kind = _require(tm_raw, "kind", str, "config.true_model")
        if tm_kind not in TRUE_MODEL_KINDS:
            raise ConfigError(
                f"config.true_model.kind: unknown kind {tm_kind!r}; choose "
                f"from {list(TRUE_MODEL_KINDS)}"
            )
        path = tm_raw.get("path")
        if tm_kind == "grid_file" and not isinstance(path, str):
            raise ConfigError("config.true_model.path: required for grid_file")
        true_model = TrueModelConfig(kind=tm_kind, path=path)
    if surrogate.kind == "gp_train" and true_model is None:
        raise ConfigError(
            "config.true_model: required when surrogate.kind is gp_train"
        )

    pce_raw = _require(raw, "pce", dict, "config")
    order = int(pce_raw.get("order", 2))
    if not 1 <= order <= MAX_SUPPORTED_ORDER:
        raise ConfigError(
            f"config.pce.order: must be in [1, {MAX_SUPPORTED_ORDER}], got {order}"
        )
    design_raw = _require(pce_raw, "design", dict, "config.pce")
    method = _require(design_raw, "method", str, "config.pce.design")
    if method not in DESIGN_METHODS:
        raise ConfigError(
            f"config.pce.design.method: unknown method {method!r}; choose "
            f"from {list(DESIGN_METHODS)}"
        )
    n_points = design_raw.get("n")
    if method == "lhs":
        if not isinstance(n_points, int) or isinstance(n_points, bool) or n_points < 1:
            raise ConfigError("config.pce.design.n: lhs needs a positive integer")
    level = design_raw.get("level", 1)
    if method == "smolyak" and level not in (0, 1, 2):
        raise ConfigError(
            f"config.pce.design.level: must be 0, 1 or 2, got {level}"
        )
    design = DesignConfig(
        method=method,
        n_points=n_points if method == "lhs" else None,
        seed=int(design_raw.get("seed", 0)),
        level=int(level),
    )

    mcs_samples = None
    mcs_seed = 0
    if "mcs" in raw and raw["mcs"] is not None:
        mcs_raw = _require(raw, "mcs", dict, "config")
        mcs_samples = _require(mcs_raw, "n_samples", int, "config.mcs")
        if mcs_samples < 2:
            raise ConfigError("config.mcs.n_samples: must be >= 2")
        mcs_seed = int(mcs_raw.get("seed", 0))

    outputs = raw.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ConfigError("config.outputs: expected an object")
    for key, value in outputs.items():
        if not isinstance(value, str):
            raise ConfigError(f"config.outputs.{key}: expected a file name")

    return StudyConfig(
        inputs=tuple(inputs),
        surrogate=surrogate,
        true_model=true_model,
        order=order,
        design=design,
        mcs_samples=mcs_samples,
        mcs_seed=mcs_seed,
        outputs=dict(outputs),
    )


def serialize_config(config: StudyConfig) -> dict:
    """Resolved config as a JSON-ready dict; parse(serialize(c)) == c."""
    raw = {
        "inputs": [
            {"name": m.name, "family": m.family.value, "mean": m.mean, "std": m.std}
            for m in config.inputs
        ],
        "surrogate": (
            {
                "kind": "gp_train",
                "training_points": config.surrogate.training_points,
                "seed": config.surrogate.seed,
                "jitter": config.surrogate.jitter,
                "restarts": config.surrogate.restarts,
            }
            if config.surrogate.kind == "gp_train"
            else {"kind": "grid_file", "path": config.surrogate.path}
        ),
        "pce": {
            "order": config.order,
            "design": {
                "method": config.design.method,
                "seed": config.design.seed,
                "level": config.design.level,
            },
        },
        "outputs": dict(config.outputs),
    }
    if config.design.method == "lhs":
        raw["pce"]["design"]["n"] = config.design.n_points
    if config.true_model is not None:
        raw["true_model"] = {"kind": config.true_model.kind}
        if config.true_model.path is not None:
            raw["true_model"]["path"] = config.true_model.path
    if config.mcs_samples is not None:
        raw["mcs"] = {"n_samples": config.mcs_samples, "seed": config.mcs_seed}
    return raw


def load_config(path) -> StudyConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as err:
        raise ConfigError(f"config: cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config: {path} is not valid JSON: {err}") from err
    return parse_config(raw)


def _resolve(path: str, base_dir: str) -> str:
    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def check_referenced_files(config: StudyConfig, base_dir: str) -> None:
    """Referenced files must exist; raises ConfigError naming the key."""
    if config.surrogate.kind == "grid_file":
        resolved = _resolve(config.surrogate.path, base_dir)
        if not os.path.isfile(resolved):
            raise ConfigError(f"config.surrogate.path: no such file {resolved!r}")
    if config.true_model is not None and config.true_model.kind == "grid_file":
        resolved = _resolve(config.true_model.path, base_dir)
        if not os.path.isfile(resolved):
            raise ConfigError(f"config.true_model.path: no such file {resolved!r}")


def _build_true_model(config: StudyConfig, base_dir: str):
    tm = config.true_model
    if tm is None:
        return None
    if tm.kind == "shaft":
        return ShaftModel()
    if tm.kind == "plate_stand_in":
        return PlateStandInModel()
    surrogate = load_grid_surrogate(_resolve(tm.path, base_dir))
    return lambda points: surrogate.predict_batch(points)[0]


def build_problem(config: StudyConfig, base_dir: str = ".") -> tuple[UqProblem, dict]:
    """Assemble the runnable problem; returns it plus audit metadata.

    When the surrogate is trained here, its training data comes from a
    space-filling design over the physical box of the inputs evaluated on the
    configured true model.
    """
    check_referenced_files(config, base_dir)
    space = config.input_space
    audit = {}
    if config.surrogate.kind == "gp_train":
        true_model = _build_true_model(config, base_dir)
        x_train = physical_box_lhs(space, config.surrogate.training_points,
                                   config.surrogate.seed)
        y_train = np.asarray(true_model(x_train), dtype=float)
        surrogate = gp_train(x_train, y_train, GpConfig(
            jitter=config.surrogate.jitter,
            restarts=config.surrogate.restarts,
            seed=config.surrogate.seed,
        ))
        audit["training_inputs"] = x_train
        audit["training_outputs"] = y_train
    else:
        surrogate = load_grid_surrogate(_resolve(config.surrogate.path, base_dir))
    problem = UqProblem(
        input_space=space,
        surrogate=surrogate,
        order=config.order,
        design=config.design,
        mcs_samples=config.mcs_samples,
        mcs_seed=config.mcs_seed,
    )
    return problem, audit
