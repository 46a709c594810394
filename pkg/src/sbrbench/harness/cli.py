"""Command-line entry point: ``sbrbench {run,tune,stability,bench,gen}``."""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import SbrError
from .config import STAGES, load_config
from .runner import run_experiment
from .synthetic import generate_synthetic_corpus, write_event_log

_ONLY = {"tune": {"tune"}, "stability": {"stability"}, "bench": {"bench"}}


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", required=True, help="experiment YAML file")
    p.add_argument("-o", "--output", help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--enable", action="append", default=[], choices=STAGES, metavar="STAGE",
                   help="turn a stage on (repeatable)")
    p.add_argument("--disable", action="append", default=[], choices=STAGES, metavar="STAGE",
                   help="turn a stage off (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbrbench", description="Session-based recommendation benchmark.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_experiment_args(sub.add_parser("run", help="full experiment with the configured stages"))
    for name in ("tune", "stability", "bench"):
        _add_experiment_args(sub.add_parser(name, help=f"run only the {name} stage"))
    gen = sub.add_parser("gen", help="write a synthetic event log")
    gen.add_argument("--out", required=True)
    gen.add_argument("--items", type=int, default=1000)
    gen.add_argument("--sessions", type=int, default=5000)
    gen.add_argument("--span-days", type=int, default=30)
    gen.add_argument("--rule-strength", type=float, default=0.0)
    gen.add_argument("--mean-length", type=float, default=5.0)
    gen.add_argument("--max-length", type=int, default=10)
    gen.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen":
            data = generate_synthetic_corpus(args.items, args.sessions, args.span_days, args.rule_strength,
                                             args.seed, args.mean_length, args.max_length)
            write_event_log(data, args.out)
            print(f"wrote {data.n_events} events in {len(data)} sessions to {args.out}")
            return 0
        try:
            config = load_config(args.config)
            config = config.with_overrides(args.output, args.seed, args.enable, args.disable,
                                           _ONLY.get(args.command))
        except (OSError, ValueError, TypeError, KeyError) as exc:
            print(f"[config] {exc}", file=sys.stderr)
            return 2
        out = run_experiment(config)
        print(f"results written to {out}")
        return 0
    except SbrError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
