"""Command-line entry point: ``stylometrics <command> [--config FILE] ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .corpus import CorpusError
from .pipeline import (RUNNERS, STAGES, PipelineError, RunConfig, preflight, run_all)
from .vectorspace import EmbeddingFormatError


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key = value file (keys mirror RunConfig)")
    p.add_argument("--seed", type=int, help="random seed (default 1)")
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--force", action="store_true", help="overwrite stale stage outputs")
    p.add_argument("--jobs", type=int, help="worker processes for per-document work")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key (repeatable)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="stylometrics", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for stage in STAGES:
        sub.add_parser(stage, parents=[common], help=f"run the {stage} stage")
    sub.add_parser("all", parents=[common], help="run every stage in order")
    fx = sub.add_parser("fixture", help="write the synthetic 60-document fixture corpus")
    fx.add_argument("directory")
    fx.add_argument("--seed", type=int, default=1)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, str] = {}
    if args.config:
        from .pipeline import parse_config_file
        values.update(parse_config_file(args.config))
    for item in args.set:
        if "=" not in item:
            raise PipelineError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        values[key.strip()] = value.strip()
    for key in ("seed", "out", "jobs"):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    return RunConfig.from_mapping(values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "fixture":
        from .synthetic import write_fixture_corpus
        paths = write_fixture_corpus(args.directory, seed=args.seed)
        print(f"fixture written; run with --config {paths.config}")
        return 0
    try:
        config = load_config(args)
        if args.command == "all":
            run_all(config, args.force)
        else:
            preflight(config, args.command)
            ran = RUNNERS[args.command](config, args.force)
            print(f"{args.command}: {'done' if ran else 'cached'} -> {Path(config.out) / args.command}")
    except (PipelineError, CorpusError, EmbeddingFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
