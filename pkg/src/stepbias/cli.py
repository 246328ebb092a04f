"""Command line entry point.

Two subcommands: ``run`` executes an experiment from a JSON config and
writes CSV/SVG outputs plus a manifest; ``validate`` checks a config and
exits. Exit codes: 0 success, 1 config parse/validation failure, 2
certification failure, 3 I/O failure.
"""

import argparse
import dataclasses
import os
import sys

from .config import load_config
from .errors import (
    CertificationFailed,
    InfeasibleWindow,
    IoError,
    ParseError,
    ValidationError,
)
from .experiments import run_experiment

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CERTIFICATION = 2
EXIT_IO = 3

_RED = "\033[31m"
_GREEN = "\033[32m"
_RESET = "\033[0m"


def _use_color(stream):
    if os.environ.get("NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _emit(stream, text, color):
    if _use_color(stream):
        stream.write(f"{color}{text}{_RESET}\n")
    else:
        stream.write(text + "\n")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stepbias",
        description="Certify step-size-dependent spectral bias of gradient descent.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", required=True, help="path to the JSON config")
    run.add_argument("--output-dir", default=None, help="override the output directory")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")

    validate = sub.add_parser("validate", help="validate a JSON config and exit")
    validate.add_argument("--config", required=True, help="path to the JSON config")
    return parser


def _load(path):
    try:
        return load_config(path)
    except FileNotFoundError as exc:
        raise IoError(str(exc)) from exc


def main(argv=None):
    args = build_parser().parse_args(argv)
    out, err = sys.stdout, sys.stderr
    try:
        cfg = _load(args.config)
        if args.command == "validate":
            _emit(out, f"ok: {cfg.experiment}", _GREEN)
            return EXIT_OK
        if args.output_dir is not None:
            cfg = dataclasses.replace(cfg, output_dir=args.output_dir)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        manifest = run_experiment(cfg)
        for entry in manifest["files"]:
            _emit(out, f"wrote {cfg.output_dir}/{entry['path']}", _GREEN)
        _emit(out, f"wrote {cfg.output_dir}/manifest.json", _GREEN)
        return EXIT_OK
    except (ParseError, ValidationError) as exc:
        _emit(err, f"error: {exc}", _RED)
        return EXIT_VALIDATION
    except (CertificationFailed, InfeasibleWindow) as exc:
        _emit(err, f"error: {exc}", _RED)
        return EXIT_CERTIFICATION
    except (IoError, OSError) as exc:
        _emit(err, f"error: {exc}", _RED)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
