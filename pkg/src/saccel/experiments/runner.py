"""Run orchestration: validate, execute, write reports and manifest."""

from __future__ import annotations

import json
import os
import subprocess
import time
from pathlib import Path

from .. import __version__
from ..stats import reports_to_json
from .config import ConfigError, ExperimentConfig, build_config
from .runners import REGISTRY, get_runner


def _version_string() -> str:
    try:
        described = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        if described.returncode == 0:
            return f"{__version__}+{described.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def run_config(
    config: ExperimentConfig,
    out_dir,
    threads: int = 1,
) -> int:
    """Execute one experiment; returns the process exit status.

    Writes `report.json` (the StatReports, byte-stable for a fixed config
    and seed), raw `*.csv` outputs, and `manifest.json` (config echo,
    version, wall time).  Status 0 iff every report with a declared
    tolerance passed; exploratory outputs never affect the status.
    """
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {out_dir} is not writable: {exc}") from None

    runner = get_runner(config.experiment)
    start = time.monotonic()
    reports = runner(config, out_dir, threads)
    wall = time.monotonic() - start

    (out_dir / "report.json").write_text(reports_to_json(reports))
    manifest = {
        "config": config.echo(),
        "threads": threads,
        "version": _version_string(),
        "wall_time_seconds": wall,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

    gated = [r for r in reports if r.tolerance is not None and r.passed is not None]
    return 0 if all(r.passed for r in gated) else 1


def run_named(
    name: str,
    out_dir,
    overrides: dict | None = None,
    master_seed: int | None = None,
    tolerances: dict | None = None,
    threads: int = 1,
) -> tuple:
    """Programmatic front end: run experiment `name` with keyword overrides.

    Returns (exit_status, reports).  Used by the acceptance suite; the CLI
    goes through config files instead.
    """
    if name not in REGISTRY:
        raise ConfigError(f"unknown experiment {name!r}")
    values: dict = dict(overrides or {})
    if master_seed is not None:
        values["master_seed"] = master_seed
    if tolerances is not None:
        values["tolerances"] = tolerances
    config = build_config(REGISTRY[name], values, env={})
    status = run_config(config, out_dir, threads)
    with open(Path(out_dir) / "report.json", "r", encoding="utf-8") as fh:
        reports = json.load(fh)
    return status, reports
