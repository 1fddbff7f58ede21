"""Command-line entry points.

Verbs: simulate, fit, describe, synthesize, serve.  Exit codes: 0 on
success, 1 when a simulation halts at runtime (empty tank, zero wind
velocity), 2 on usage or validation problems (missing/malformed files,
schema violations).  Log level comes from the ICINGPLANT_LOG environment
variable.  The only files touched are the declared output paths.
"""

from __future__ import annotations

import argparse
import importlib.resources
import logging
import os
import re
import sys

import numpy as np

from .engine import SimulationHalt, Simulator, export_trace
from .fitting import (
    Dataset,
    DatasetError,
    REFERENCE_CORRELATION,
    REFERENCE_MODEL_ERRORS,
    REFERENCE_STATS,
    VARIABLES,
    correlation_matrix,
    describe,
    fit_mlp,
    fit_polynomial,
    fit_tree,
    load_predictor,
    save_predictor,
    small_search_space,
    synthesize_dataset,
)
from .fitting.mlp import SearchSpace
from .fitting.polynomial import STRUCTURES
from .fitting.tables import STAT_NAMES
from .plant import ConfigError, PlantConfig, load_config
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

logger = logging.getLogger("icingplant")


def shipped_path(name: str) -> str:
    """Path of a scenario/config file bundled with the package."""
    return str(importlib.resources.files("icingplant").joinpath("scenarios", name))


def _load_inputs(scenario_path: str, config_path: str | None):
    if not os.path.exists(scenario_path):
        raise ScenarioError(f"scenario file not found: {scenario_path}")
    if config_path is None:
        cfg = PlantConfig()
    else:
        if not os.path.exists(config_path):
            raise ConfigError(f"config file not found: {config_path}")
        cfg = load_config(config_path)
    scenario = load_scenario(scenario_path, cfg.n_conduits)
    return scenario, cfg


def cmd_simulate(args) -> int:
    try:
        scenario, cfg = _load_inputs(args.scenario, args.config)
        t_n_pred = mvd_pred = None
        if args.tn_model:
            if not os.path.exists(args.tn_model):
                raise ConfigError(f"model file not found: {args.tn_model}")
            t_n_pred = load_predictor(args.tn_model)
        if args.mvd_model:
            if not os.path.exists(args.mvd_model):
                raise ConfigError(f"model file not found: {args.mvd_model}")
            mvd_pred = load_predictor(args.mvd_model)
        sim = Simulator(cfg, scenario, t_n_pred=t_n_pred, mvd_pred=mvd_pred)
    except (ScenarioError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        trace = sim.run()
    except SimulationHalt as exc:
        print(f"halted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    export_trace(trace, args.out, args.format)
    warned = sum(1 for row in trace.rows if row.warnings)
    print(f"wrote {len(trace)} rows to {args.out} ({args.format})")
    if warned:
        patterns: dict[str, int] = {}
        for row in trace.rows:
            for w in row.warnings:
                key = re.sub(r"-?\d+(\.\d+)?([eE][+-]?\d+)?", "#", w)
                patterns[key] = patterns.get(key, 0) + 1
        print(f"{warned} rows carry warnings:")
        for key, count in sorted(patterns.items()):
            print(f"  - {key}  (x{count})")
    if args.figures:
        from .plots import plot_trace
        for path in plot_trace(trace, args.figures):
            print(f"wrote {path}")
    return EXIT_OK


def _fit_dataset(path: str) -> Dataset:
    if not os.path.exists(path):
        raise DatasetError(f"dataset file not found: {path}")
    return Dataset.load_csv(path, provenance="real")


def _reference_errors(target: str) -> str | None:
    ref = REFERENCE_MODEL_ERRORS.get(target)
    if not ref:
        return None
    lines = [f"reference errors reported for {target} on the original "
             "30 commissioning experiments (context only, not a gate):"]
    for model, err in ref.items():
        lines.append(f"  {model:<24} MSE {err['mse']:<8} MAE {err['mae']}")
    return "\n".join(lines)


def cmd_fit(args) -> int:
    try:
        ds = _fit_dataset(args.data)
        if args.target not in VARIABLES:
            raise DatasetError(
                f"unknown target column {args.target!r}; expected one of "
                f"{', '.join(VARIABLES)}")
        inputs = [v for v in VARIABLES if v != args.target]
        if args.model == "poly":
            structure_name = args.structure
            if structure_name == "auto":
                structure_name = "tn_linear" if args.target == "T_n" else "mvd_products_4"
            if structure_name not in STRUCTURES:
                raise DatasetError(
                    f"unknown structure {structure_name!r}; expected one of "
                    f"{', '.join(STRUCTURES)} or auto")
            structure = STRUCTURES[structure_name]()
            names = sorted({v for term in structure for v in term})
            missing = [v for v in names if v == args.target]
            if missing:
                raise DatasetError(f"structure uses the target column {missing}")
            predictor, report = fit_polynomial(ds, args.target, structure,
                                               input_names=names, seed=args.seed)
        elif args.model == "tree":
            predictor, report = fit_tree(ds, args.target, inputs,
                                         max_depth=args.max_depth,
                                         min_leaf=args.min_leaf, seed=args.seed)
        else:
            space = SearchSpace() if args.space == "full" else small_search_space()
            predictor, report = fit_mlp(ds, args.target, inputs, space=space,
                                        seed=args.seed)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    predictor.meta.setdefault("report", report.to_dict())
    save_predictor(predictor, args.out)
    print(report.summary())
    ref = _reference_errors(args.target)
    if ref:
        print(ref)
    print(f"wrote model to {args.out}")
    if args.figures:
        from .plots import plot_fit
        x = np.column_stack([ds.column(v) for v in predictor.input_names])
        for path in plot_fit(predictor.predict(x), ds.column(args.target),
                             args.target, args.figures):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_describe(args) -> int:
    try:
        ds = _fit_dataset(args.data)
        stats = describe(ds)
        corr = correlation_matrix(ds)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    header = "          " + "".join(f"{v:>9}" for v in VARIABLES)
    print(header)
    for i, stat in enumerate(STAT_NAMES):
        cells = "".join(f"{stats[v][stat]:>9.2f}" for v in VARIABLES)
        print(f"{stat:<10}{cells}")
    print("\ncorrelation matrix:")
    print("          " + "".join(f"{v:>7}" for v in VARIABLES))
    for i, v in enumerate(VARIABLES):
        print(f"{v:<10}" + "".join(f"{corr[i, j]:>7.2f}" for j in range(len(VARIABLES))))

    if args.reference:
        print("\ndeviation from the published commissioning statistics "
              "(value - reference):")
        for i, stat in enumerate(STAT_NAMES):
            cells = "".join(
                f"{stats[v][stat] - REFERENCE_STATS[v][i]:>9.2f}" for v in VARIABLES)
            print(f"{stat:<10}{cells}")
        dev = np.abs(corr - REFERENCE_CORRELATION)
        print(f"max |corr - reference| = {dev.max():.3f}")

    if args.figures:
        from .plots import plot_correlation
        for path in plot_correlation(corr, args.figures):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_synthesize(args) -> int:
    try:
        ds = synthesize_dataset(args.n, args.seed)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ds.save_csv(args.out)
    print(f"wrote {len(ds)} synthetic records to {args.out} (seed {args.seed})")
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        scenario, cfg = _load_inputs(args.scenario, args.config)
    except (ScenarioError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    import uvicorn

    from .service import create_app

    app = create_app(cfg, scenario, real_time=not args.fast,
                     snapshot_every=args.rate)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except SystemExit:
        print(f"error: cannot bind {args.host}:{args.port}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icingplant",
        description="Icing-wind-tunnel injection plant: simulate, fit, "
                    "describe, synthesize, serve.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("simulate", help="run a scenario and export the trace")
    p.add_argument("--scenario", default=shipped_path("paper_iv.scenario.json"),
                   help="scenario JSON (default: shipped open-loop scenario)")
    p.add_argument("--config", default=shipped_path("paper_iv.config.json"),
                   help="plant config JSON (default: shipped config)")
    p.add_argument("--out", required=True, help="trace output path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--figures", help="directory for rendered figure files")
    p.add_argument("--tn-model", help="fitted predictor JSON for the nozzle "
                                      "temperature (default: built-in polynomial)")
    p.add_argument("--mvd-model", help="fitted predictor JSON for the droplet "
                                       "median diameter (default: built-in "
                                       "product polynomial)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a predictor to a dataset CSV")
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--target", required=True, help="target column")
    p.add_argument("--model", choices=("poly", "tree", "mlp"), required=True)
    p.add_argument("--out", required=True, help="model JSON output path")
    p.add_argument("--structure", default="auto",
                   help="polynomial term structure "
                        f"({', '.join(STRUCTURES)} or auto)")
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--min-leaf", type=int, default=2)
    p.add_argument("--space", choices=("small", "full"), default="small",
                   help="MLP architecture grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--figures", help="directory for validation/error figures")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("describe", help="dataset statistics and correlations")
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--reference", action="store_true",
                   help="compare against the published statistics")
    p.add_argument("--figures", help="directory for the correlation heatmap")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("synthesize", help="generate a synthetic dataset CSV")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("serve", help="live simulation service + dashboard")
    p.add_argument("--scenario", default=shipped_path("paper_iv.scenario.json"))
    p.add_argument("--config", default=shipped_path("paper_iv.config.json"))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--fast", action="store_true",
                   help="run steps as fast as computed instead of real time")
    p.add_argument("--rate", type=int, default=1,
                   help="publish every Nth snapshot")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("ICINGPLANT_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
