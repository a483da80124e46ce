"""
Command-line scenario runner.

    edrlab list
    edrlab run <scenario> [--config FILE] [--seed N] [--jobs N] [--out DIR] [--key value ...]

Settings are resolved as command line > config file > scenario defaults. The
config file is flat ``key = value`` text; section headers are allowed and
ignored. Reports go to ``<out>/<scenario>.json``, ``<out>/<scenario>.csv``
and ``<out>/<scenario>.long.csv``; ``--out`` defaults to ``$EDRLAB_OUT`` or
``./edrlab-out``. The exit status is 0 iff every assertion passed.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np

from .config import TOL
from .scenarios import SCENARIOS, ScenarioResult

log = logging.getLogger("edrlab")

DEFAULT_SEED = 7


class ConfigError(ValueError):
    pass


def fmt(value: Any) -> str:
    """CSV cell text; floats carry 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    return obj


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    text = Path(path).read_text()
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string("[__flat__]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    out: dict[str, str] = {}
    for section in parser.sections():
        out.update(parser[section])
    return out


def _coerce(key: str, raw: Any, default: Any) -> Any:
    try:
        if isinstance(default, bool):
            return str(raw).strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    return str(raw)


def resolve_config(scenario: str, file_values: dict[str, str], overrides: dict[str, str]) -> dict[str, Any]:
    defaults = SCENARIOS[scenario].defaults
    cfg = dict(defaults)
    for source in (file_values, overrides):
        for key, raw in source.items():
            k = key.replace("-", "_")
            if k not in defaults:
                raise ConfigError(f"unknown setting {key!r} for scenario {scenario!r}; known: {sorted(defaults)}")
            cfg[k] = _coerce(k, raw, defaults[k])
    return cfg


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    cols = list(rows[0])
    for r in rows[1:]:
        cols += [c for c in r if c not in cols]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([fmt(r.get(c, "")) for c in cols])
    return buf.getvalue()


def emit_plot_data(report: dict[str, Any] | str | os.PathLike) -> str:
    """
    Long-format CSV ``scenario,parameter,quantity,value`` from a scenario report.

    ``parameter`` holds the value of the report's sweep parameter (named in
    the JSON as ``parameter``); every other numeric or boolean column becomes
    a quantity. Accepts a report dict or the path of a written JSON report.
    """
    if not isinstance(report, dict):
        path = Path(report)
        if not path.exists():
            raise FileNotFoundError(f"report {path} does not exist")
        report = json.loads(path.read_text())
    scenario = report["scenario"]
    param = report["parameter"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario", "parameter", "quantity", "value"])
    for row in report["rows"]:
        pval = row.get(param, "")
        for key, val in row.items():
            if key == param or isinstance(val, str) or val is None:
                continue
            w.writerow([scenario, fmt(pval), key, fmt(val)])
    return buf.getvalue()


def build_report(result: ScenarioResult, cfg: dict[str, Any], seed: int) -> dict[str, Any]:
    return _jsonable(
        {
            "scenario": result.name,
            "parameter": result.parameter,
            "inputs": cfg,
            "seed": seed,
            "tolerances": asdict(TOL),
            "passed": result.passed,
            "assertions": [a.to_dict() for a in result.assertions],
            "failures": [a.to_dict() for a in result.failures],
            "summary": result.summary,
            "reports": result.reports,
            "rows": result.rows,
        }
    )


def run_scenario(name: str, cfg: dict[str, Any] | None = None, seed: int = DEFAULT_SEED, jobs: int = 1,
                 out: str | os.PathLike | None = None) -> tuple[dict[str, Any], dict[str, Path]]:
    """Run a scenario and write its report files; returns the report and the paths written."""
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; available: {', '.join(SCENARIOS)}")
    full_cfg = resolve_config(name, {}, {}) if cfg is None else {**SCENARIOS[name].defaults, **cfg}
    result = SCENARIOS[name].run(full_cfg, seed, jobs)
    report = build_report(result, full_cfg, seed)
    out_dir = Path(out if out is not None else os.environ.get("EDRLAB_OUT", "edrlab-out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out_dir / f"{name}.json",
        "csv": out_dir / f"{name}.csv",
        "long": out_dir / f"{name}.long.csv",
    }
    paths["json"].write_text(json.dumps(report, indent=2) + "\n")
    paths["csv"].write_text(rows_to_csv(result.rows))
    paths["long"].write_text(emit_plot_data(report))
    return report, paths


def _split_overrides(extra: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
        else:
            try:
                val = next(it)
            except StopIteration:
                raise ConfigError(f"missing value for --{key}") from None
        out[key] = val
    return out


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="edrlab", description="Error-disturbance scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list scenarios")
    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("scenario")
    run.add_argument("--config", help="flat key = value settings file")
    run.add_argument("--seed", type=int, default=DEFAULT_SEED)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--out", default=None)
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    if args.command == "list":
        for name, sc in SCENARIOS.items():
            print(f"{name:20s} {sc.description}")
        return 0
    if extra and args.command != "run":
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    if args.scenario not in SCENARIOS:
        print(f"unknown scenario {args.scenario!r}; available: {', '.join(SCENARIOS)}", file=sys.stderr)
        return 2
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = resolve_config(args.scenario, file_values, _split_overrides(extra))
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report, paths = run_scenario(args.scenario, cfg, args.seed, args.jobs, args.out)
    for a in report["assertions"]:
        status = "PASS" if a["passed"] else "FAIL"
        crit = f"[criterion {a['criterion']}] " if a["criterion"] else ""
        log.info("%s %s%s %s", status, crit, a["name"], a["detail"])
    log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
