"""Command-line front end: run a study config, size studies, validation.

    uq run <config.json> [--out-dir DIR] [--seed-override N]
    uq study <config.json> --sizes 30,100,500 [--out-dir DIR] [--seed-override N]
    uq validate <config.json>

All randomness flows from seeds in the config (optionally overridden), so a
repeated run writes byte-identical reports.
"""

import argparse
import os
import sys
from dataclasses import replace
from math import comb

from .config import (
    StudyConfig,
    build_problem,
    check_referenced_files,
    load_config,
    serialize_config,
    _build_true_model,
)
from .errors import ConfigError, PcuqError, PipelineError
from .gp import GpConfig, export_training_csv
from .pce import empirical_cdf
from .pipeline import (
    _write_atomic,
    result_to_dict,
    run_uq,
    training_size_study,
    write_report_json,
    write_sobol_csv,
    write_study_csv,
)

# Fixed offsets so one override seed re-keys every random stage distinctly.
_SEED_OFFSET_DESIGN = 0
_SEED_OFFSET_MCS = 1
_SEED_OFFSET_SURROGATE = 2


def _apply_seed_override(config: StudyConfig, seed: int) -> StudyConfig:
    design = replace(config.design, seed=seed + _SEED_OFFSET_DESIGN)
    surrogate = config.surrogate
    if surrogate.kind == "gp_train":
        surrogate = replace(surrogate, seed=seed + _SEED_OFFSET_SURROGATE)
    return replace(
        config,
        design=design,
        surrogate=surrogate,
        mcs_seed=seed + _SEED_OFFSET_MCS,
    )


def _design_point_count(config: StudyConfig) -> int:
    dimension = len(config.inputs) + 1
    if config.design.method == "lhs":
        return config.design.n_points
    if config.design.method == "tensor":
        return (config.order + 1) ** dimension
    from .designs import smolyak_design

    return smolyak_design(dimension, config.design.level).n_points


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed_override is not None:
        config = _apply_seed_override(config, args.seed_override)
    base_dir = os.path.dirname(os.path.abspath(args.config))
    problem, audit = build_problem(config, base_dir)
    result = run_uq(problem)

    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    payload = {
        "config": serialize_config(config),
        "results": result_to_dict(result),
    }
    report_path = config.output_path("report", out_dir)
    write_report_json(payload, report_path)
    written = [report_path]

    sobol_path = config.output_path("sobol_csv", out_dir)
    if sobol_path is not None:
        write_sobol_csv(result.sobol, sobol_path)
        written.append(sobol_path)

    cdf_path = config.output_path("cdf_csv", out_dir)
    if cdf_path is not None:
        table = empirical_cdf(
            result.pce, config.mcs_samples or 100_000, config.mcs_seed
        )
        lines = ["value,probability"]
        lines += [
            f"{v:.17g},{p:.17g}"
            for v, p in zip(table.values, table.probabilities)
        ]
        _write_atomic(cdf_path, "\n".join(lines) + "\n")
        written.append(cdf_path)

    training_path = config.output_path("training_csv", out_dir)
    if training_path is not None and "training_inputs" in audit:
        export_training_csv(
            audit["training_inputs"], audit["training_outputs"], training_path
        )
        written.append(training_path)

    print(f"mean {result.mean:.6g}")
    print(f"std {result.std:.6g}")
    if result.mcs is not None:
        print(
            f"mcs mean {result.mcs.mean:.6g} (rel err "
            f"{result.mcs.relative_error_mean:.3%}), "
            f"std {result.mcs.std:.6g} (rel err "
            f"{result.mcs.relative_error_std:.3%})"
        )
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_study(args) -> int:
    config = load_config(args.config)
    if args.seed_override is not None:
        config = _apply_seed_override(config, args.seed_override)
    if config.surrogate.kind != "gp_train" or config.true_model is None:
        raise ConfigError(
            "config.surrogate.kind: the size study retrains a GP, so it needs "
            "kind gp_train plus a true_model"
        )
    sizes = []
    for token in args.sizes.split(","):
        token = token.strip()
        if not token.isdigit() or int(token) < 1:
            raise ConfigError(f"--sizes: {token!r} is not a positive integer")
        sizes.append(int(token))

    base_dir = os.path.dirname(os.path.abspath(args.config))
    check_referenced_files(config, base_dir)
    true_model = _build_true_model(config, base_dir)
    entries = training_size_study(
        true_model,
        sizes,
        config.input_space,
        order=config.order,
        design=config.design,
        gp_config=GpConfig(
            jitter=config.surrogate.jitter,
            restarts=config.surrogate.restarts,
            seed=config.surrogate.seed,
        ),
        mcs_samples=config.mcs_samples,
        mcs_seed=config.mcs_seed,
    )

    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    successes = 0
    for entry in entries:
        if entry.result is None:
            print(
                f"size {entry.training_points}: failed: {entry.error}",
                file=sys.stderr,
            )
            continue
        successes += 1
        per_size = os.path.join(out_dir, f"sobol_{entry.training_points}.csv")
        write_sobol_csv(entry.result.sobol, per_size)
        share = dict(
            zip(entry.result.sobol.labels, entry.result.sobol.first_order)
        )["model_uncertainty"]
        print(
            f"size {entry.training_points}: model_uncertainty first-order "
            f"{share:.4f} -> {per_size}"
        )
    combined = os.path.join(
        out_dir, config.outputs.get("study_csv", "study.csv")
    )
    write_study_csv(entries, combined)
    print(f"wrote {combined}")
    return 0 if successes else 1


def cmd_validate(args) -> int:
    config = load_config(args.config)
    base_dir = os.path.dirname(os.path.abspath(args.config))
    check_referenced_files(config, base_dir)
    dimension = len(config.inputs) + 1
    basis_size = comb(dimension + config.order, config.order)
    points = _design_point_count(config)
    print(f"inputs {len(config.inputs)}")
    print(f"dimension {dimension}")
    print(f"order {config.order}")
    print(f"basis_size {basis_size}")
    print(f"design {config.design.method} with {points} points")
    if config.design.method == "lhs" and points < basis_size:
        print(
            f"warning: {points} samples < {basis_size} coefficients; least "
            "squares will be underdetermined",
            file=sys.stderr,
        )
    print("config ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uq",
        description=(
            "Propagate coupled input and surrogate-model uncertainty through "
            "a polynomial chaos expansion."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run a study config end to end")
    run_parser.add_argument("config", help="path to the study config JSON")
    run_parser.set_defaults(func=cmd_run)

    study_parser = sub.add_parser(
        "study", help="rerun the pipeline across GP training-set sizes"
    )
    study_parser.add_argument("config", help="path to the study config JSON")
    study_parser.add_argument(
        "--sizes", required=True, help="comma-separated training sizes, e.g. 30,100,500"
    )
    study_parser.set_defaults(func=cmd_study)

    validate_parser = sub.add_parser(
        "validate", help="check a config without running it"
    )
    validate_parser.add_argument("config", help="path to the study config JSON")
    validate_parser.set_defaults(func=cmd_validate)

    for p in (run_parser, study_parser):
        p.add_argument(
            "--out-dir", default=".", help="directory for reports and CSVs"
        )
        p.add_argument(
            "--seed-override",
            type=int,
            default=None,
            help="replace every configured seed by this value plus a fixed "
            "per-stage offset",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except PipelineError as err:
        print(f"pipeline error: {err}", file=sys.stderr)
        return 1
    except PcuqError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
