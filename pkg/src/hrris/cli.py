"""Command-line entry points: run sweeps, validate configs, print defaults.

Exit codes: 0 success, 1 configuration error, 2 computation or output error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from .config import ExperimentConfig, default_config, parse_config, serialize_config
from .errors import HrrisError, ParseError
from .experiments import build_grid, run_experiment

THREADS_ENV = "HRRIS_THREADS"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrris",
        description="Secrecy-capacity experiments for a hybrid relay-reflecting surface link.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_cmd = sub.add_parser("run", help="execute the configured experiment sweep")
    run_cmd.add_argument("config", type=Path, help="path to a config file")
    run_cmd.add_argument("--out", type=Path, default=None, help="output directory override")
    run_cmd.add_argument("--seed", type=int, default=None, help="base seed override")
    run_cmd.add_argument("--trials", type=int, default=None, help="trials-per-cell override")
    run_cmd.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"worker threads (default: ${THREADS_ENV} or 1)",
    )

    validate_cmd = sub.add_parser("validate", help="check a config file and report its grid")
    validate_cmd.add_argument("config", type=Path, help="path to a config file")

    sub.add_parser("defaults", help="print the default config")

    serve_cmd = sub.add_parser("serve", help="start the HTTP service")
    serve_cmd.add_argument("--host", default="127.0.0.1")
    serve_cmd.add_argument("--port", type=int, default=8000)
    return parser


def _read_config(path: Path) -> ExperimentConfig:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config file: {exc}") from exc
    return parse_config(text)


def _apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["n_trials"] = args.trials
    # replace() re-runs validation, so bad overrides fail like bad keys.
    return dataclasses.replace(config, **overrides) if overrides else config


def _resolve_threads(flag: int | None) -> int:
    if flag is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None:
            return 1
        try:
            flag = int(raw)
        except ValueError:
            raise ParseError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if flag < 1:
        raise ParseError(f"thread count must be >= 1, got {flag}")
    return flag


def _cmd_run(args: argparse.Namespace) -> int:
    config = _apply_overrides(_read_config(args.config), args)
    threads = _resolve_threads(args.threads)
    output = run_experiment(
        config,
        out_dir=args.out,
        threads=threads,
        progress=lambda message: print(message, file=sys.stderr),
    )
    print(output.csv_path)
    for plot in output.plot_paths:
        print(plot)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _read_config(args.config)
    cells = build_grid(config)
    print(
        f"ok: {config.experiment} experiment, {len(cells)} grid cells, "
        f"{config.n_trials} trials per cell, seed {config.seed}"
    )
    return 0


def _cmd_defaults() -> int:
    sys.stdout.write(serialize_config(default_config()))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "defaults":
            return _cmd_defaults()
        return _cmd_serve(args)
    except ParseError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except HrrisError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
