"""Command line interface: `saccel run | list | version`."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .. import __version__
from .config import ConfigError, build_config, load_config_file
from .runner import run_config
from .runners import REGISTRY


def _default_threads() -> int:
    return max(1, os.cpu_count() or 1)


def _cmd_run(args) -> int:
    file_values = load_config_file(args.config)
    name = file_values.get("experiment")
    if name not in REGISTRY:
        raise ConfigError(f"unknown experiment {name!r}; see `saccel list`")
    config = build_config(REGISTRY[name], file_values, overrides=args.set or [])
    out_dir = args.out or config.output_dir or f"runs/{config.experiment}"
    status = run_config(config, Path(out_dir), threads=args.threads)
    print(f"{config.experiment}: wrote {out_dir}/report.json (exit {status})")
    if status != 0:
        failed = [
            r["name"]
            for r in json.loads((Path(out_dir) / "report.json").read_text())
            if r["passed"] is False
        ]
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
    return status


def _cmd_list(args) -> int:
    if args.json:
        payload = [
            {
                "name": d.name,
                "claim": d.claim,
                "exploratory": d.exploratory,
                "params": {k: spec.default for k, spec in d.params.items()},
                "tolerances": dict(d.tolerances),
            }
            for d in REGISTRY.values()
        ]
        print(json.dumps(payload, indent=2))
        return 0
    width = max(len(name) for name in REGISTRY)
    for d in REGISTRY.values():
        tag = " (exploratory)" if d.exploratory else ""
        print(f"{d.name:<{width}}  {d.claim}{tag}")
        params = ", ".join(f"{k}={spec.default}" for k, spec in d.params.items())
        print(f"{'':<{width}}  params: {params}")
        if d.tolerances:
            tols = ", ".join(f"{k}={v}" for k, v in d.tolerances.items())
            print(f"{'':<{width}}  tolerances: {tols}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="saccel",
        description="Stochastic-acceleration Monte Carlo experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("--config", required=True, help="path to the JSON config")
    p_run.add_argument(
        "--set", action="append", metavar="KEY=VALUE",
        help="override a config key (JSON values; repeatable)",
    )
    p_run.add_argument("--threads", type=int, default=_default_threads())
    p_run.add_argument("--out", help="output directory (default runs/<experiment>)")

    p_list = sub.add_parser("list", help="list experiments and their parameters")
    p_list.add_argument("--json", action="store_true")

    sub.add_parser("version", help="print the package version")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list(args)
        if args.command == "version":
            print(__version__)
            return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
