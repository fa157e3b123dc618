"""Command-line surface.

    adkit run <experiment> [--config file.json] [--seed N] [--trials N]
              [--out path] [--check] [--plot]
    adkit list

Exit codes: 0 success, 2 configuration error, 3 check failure with --check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import REGISTRY, ConfigError, ExperimentConfig, check, run


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adkit", description="Algebraic-diversity experiment harness")
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a named experiment")
    runp.add_argument("experiment", help="experiment name (see `adkit list`)")
    runp.add_argument("--config", type=Path, help="JSON config file")
    runp.add_argument("--seed", type=int, help="master seed (overrides config)")
    runp.add_argument("--trials", type=int, help="Monte Carlo trials (overrides config)")
    runp.add_argument("--out", type=Path, help="output CSV path (JSON sidecar written next to it)")
    runp.add_argument("--check", action="store_true", help="verify the experiment's headline claims")
    runp.add_argument("--plot", action="store_true", help="render a PNG figure next to the CSV")

    sub.add_parser("list", help="print the experiment catalog with schemas")
    return p


def _load_config(args) -> ExperimentConfig:
    raw = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text())
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    experiment = raw.get("experiment", args.experiment)
    if experiment != args.experiment:
        raise ConfigError(f"config is for '{experiment}', not '{args.experiment}'")
    unknown = set(raw) - {"experiment", "seed", "trials", "parameters", "output_path"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    return ExperimentConfig(
        experiment=args.experiment,
        seed=args.seed if args.seed is not None else int(raw.get("seed", 0)),
        trials=args.trials if args.trials is not None else raw.get("trials"),
        parameters=raw.get("parameters", {}),
        output_path=str(args.out) if args.out else raw.get("output_path"),
    )


def cmd_run(args) -> int:
    try:
        config = _load_config(args)
        table = run(config)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    out = Path(config.output_path) if config.output_path else Path(f"{config.experiment}.csv")
    written = table.write(out, plot=args.plot, experiment=config.experiment)
    for w in written:
        print(f"wrote {w}")
    if args.check:
        failures = check(config.experiment, table)
        if failures:
            for f in failures:
                print(f"CHECK FAIL: {f}", file=sys.stderr)
            return 3
        print("all checks passed")
    return 0


def cmd_list() -> int:
    for name, exp in REGISTRY.items():
        print(f"{name}")
        print(f"    {exp.description}")
        print(f"    default trials: {exp.default_trials}")
        print(f"    parameters: {json.dumps(exp.param_defaults, default=str)}")
        print(f"    columns: {', '.join(exp.columns)}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        return cmd_list()
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
