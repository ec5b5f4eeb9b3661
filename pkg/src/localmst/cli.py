"""Command-line entry point: ``localmst <command> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import LocalMSTError
from .experiments import COMMANDS, ExperimentConfig, run_experiment, write_outputs


def _n_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="localmst", description="Seeded local-search MST experiments.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat key=value file; flags override its values")
    parser.add_argument("--n", type=_n_list, help="comma-separated sizes, e.g. 50,100,200")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int, help="base seed (required unless set in --config)")
    parser.add_argument("--dist", help="uniform[:B], truncexp:RATE:UPPER or pwlinear:X/F,...")
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--start", choices=["path", "star", "clique", "random_tree"])
    parser.add_argument("--p", type=float, help="threshold for appendix/wdiam-scan (default 1/n + n^-1.1)")
    parser.add_argument("--W", type=float, help="run weight cap (default 1/ln n)")
    parser.add_argument("--L", type=int, help="run length (default max(2, floor(ln ln n)))")
    parser.add_argument("--out", help="CSV output path")
    parser.add_argument("--summary", help="JSON summary path")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--timing", action="store_true", default=None, help="add a runtime column")
    parser.add_argument("--save-config", help="write the effective config to this file")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    keys = ("n", "trials", "seed", "dist", "epsilon", "start", "p", "W", "L", "out", "summary", "workers", "timing")
    overrides = {k: getattr(args, k) for k in keys}
    items = {}
    if args.config:
        with open(args.config) as fh:
            items = ExperimentConfig.parse_items(fh.read())
    items["command"] = args.command
    items.update({k: v for k, v in overrides.items() if v is not None})
    if "seed" not in items:
        raise LocalMSTError("a base seed is required (--seed or seed= in the config)")
    return ExperimentConfig(**items)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.save_config:
            cfg.save(args.save_config)
        result = run_experiment(cfg)
    except LocalMSTError as exc:
        print(f"localmst: error: {exc}", file=sys.stderr)
        return 2
    write_outputs(result)
    if not cfg.out:
        sys.stdout.write(result.csv_text())
    if not cfg.summary:
        print(json.dumps({k: v for k, v in result.summary.items() if k != "config"}, indent=2, default=float),
              file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
