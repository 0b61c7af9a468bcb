"""Command-line front end.

    leastaction <el|hopf-lax|pde|pilot|compare|figures|run> --config PATH [overrides]

PATH is a JSON scenario file or a directory of them (batch, run in name
order). Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .scenarios import (
    EXIT_INVALID,
    EXIT_NUMERICAL,
    EXIT_OK,
    MODES,
    ConfigError,
    ScenarioConfig,
    run_scenario,
    write_json,
)

SUBCOMMANDS = (*MODES, "figures", "run")


def _floats(text: str) -> list[float]:
    try:
        return [float(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leastaction",
        description="Compute and cross-check classical and Hamilton-Jacobi actions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "el": "classical action by shooting and direct minimisation; perturbed path family",
        "hopf-lax": "field action as a minimum over launch points; classical paths per launch point",
        "pde": "grid solution of the Hamilton-Jacobi equation",
        "pilot": "velocity field and piloted trajectories",
        "compare": "cross-route comparison report",
        "figures": "plot-ready CSV for el / hopf-lax / pilot configs",
        "run": "run each config in its own mode (mixed batches)",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", required=True, type=Path, help="JSON config file or directory")
        p.add_argument("--out", type=Path, help="output root; artifacts go to OUT/<name>/")
        p.add_argument("--mass", type=float)
        p.add_argument("--k", type=_floats, help="uniform force, comma-separated")
        p.add_argument("--x0", type=_floats)
        p.add_argument("--x", type=_floats)
        p.add_argument("--t", type=float)
        p.add_argument("--v0", type=_floats)
        p.add_argument("--grid-n", type=int)
        p.add_argument("--tol", type=float)
    return parser


def apply_overrides(raw: dict, args, command: str) -> dict:
    """Flag overrides on the raw config, before validation."""
    raw = json.loads(json.dumps(raw))
    if command in MODES:
        if raw.get("mode", command) != command:
            raise ConfigError("mode", f"config mode {raw.get('mode')!r} does not match subcommand {command!r}")
        raw["mode"] = command
    model = raw.setdefault("model", {})
    params = raw.setdefault("params", {})
    mode = raw.get("mode")
    if args.mass is not None:
        model["mass"] = args.mass
    if args.k is not None:
        model["potential"] = {"kind": "linear", "k": args.k}
        model["dimension"] = len(args.k)
    if args.x0 is not None:
        s0 = params.get("s0")
        if isinstance(s0, dict) and s0.get("kind") == "singular":
            s0["x0"] = args.x0
        else:
            params["x0"] = args.x0
    if args.x is not None:
        params["x"] = args.x
    if args.t is not None:
        key = {"pde": "t_final", "pilot": "t1"}.get(mode, "t")
        params[key] = args.t
    if args.v0 is not None:
        s0 = params.get("s0")
        if isinstance(s0, dict) and s0.get("kind") == "linear":
            s0["v0"] = args.v0
        else:
            params["v0"] = args.v0
    if args.grid_n is not None:
        params.setdefault("grid", {})["n"] = args.grid_n
    if args.tol is not None:
        params["tol"] = args.tol
    return raw


def _config_paths(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(path.glob("*.json"))
    return [path]


def _load(path: Path, args, command) -> ScenarioConfig:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    if not isinstance(raw, dict):
        raise ConfigError(str(path), "expected a JSON object")
    try:
        return ScenarioConfig.from_dict(apply_overrides(raw, args, command))
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc.where}", str(exc).split(": ", 1)[-1]) from None


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if not args.config.exists():
        print(f"error: {args.config}: no such file or directory", file=sys.stderr)
        return EXIT_INVALID
    paths = _config_paths(args.config)

    configs = []
    for path in paths:
        try:
            configs.append(_load(path, args, args.command))
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
    names = [c.name for c in configs]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        print(f"error: duplicate scenario names {dupes}", file=sys.stderr)
        return EXIT_INVALID

    results = []
    for cfg in configs:
        res = run_scenario(cfg, args.out, figures_only=args.command == "figures")
        status = {EXIT_OK: "ok", EXIT_INVALID: "invalid", EXIT_NUMERICAL: "numerical failure"}[res.status]
        line = f"{res.name} [{res.mode}]: {status}"
        if res.message:
            line += f" - {res.message}"
        print(line, file=sys.stderr if res.status else sys.stdout)
        results.append(res)

    if args.out is not None and results:
        root = Path(args.out)
        write_json(root / "batch_summary.json", [
            {
                "name": r.name,
                "mode": r.mode,
                "status": r.status,
                "artifacts": [Path(a).relative_to(root).as_posix() for a in r.artifacts],
                "message": r.message,
            }
            for r in results
        ])
    return max((r.status for r in results), default=EXIT_OK)


if __name__ == "__main__":
    raise SystemExit(main())
