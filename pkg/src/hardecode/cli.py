"""Command-line entry point: ``hardecode <subcommand> --config file.json``."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from .codes import BUILTIN_CODES
from .experiments import ConfigError, ExperimentConfig, load_config, run_experiment
from .verify import run_all

log = logging.getLogger("hardecode")

SUBCOMMAND_KIND = {
    "channel": "channel",
    "sweep": "infidelity-sweep",
    "threshold": "threshold",
    "contour": "contour",
    "twirl": "twirl-compare",
    "perturb": "perturbation",
}
MODE_DECODER = {"symmetric": "symmetric", "opt-all": "optimized-all", "opt-pauli": "optimized-pauli"}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--workers", type=int, default=1, help="worker processes for grid points")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--ties", choices=("first", "exhaustive"), help="tie handling for optimized decoding")
    p.add_argument("--mode", choices=tuple(MODE_DECODER), help="decoder override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardecode", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMAND_KIND:
        _add_common(sub.add_parser(name, help=f"run a {SUBCOMMAND_KIND[name]} experiment"))
    v = sub.add_parser("verify", help="oracle, beta-sign and closed-form self checks")
    v.add_argument("--codes", nargs="*", default=list(BUILTIN_CODES), choices=BUILTIN_CODES)
    v.add_argument("--random", type=int, default=10, help="random CPTP channels per code")
    v.add_argument("--corrupt", action="store_true", help="inject a sign fault (negative control)")
    return parser


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace, kind: str) -> ExperimentConfig:
    if cfg.kind != kind:
        raise ConfigError("kind", f"config is {cfg.kind!r} but subcommand expects {kind!r}")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.ties:
        cfg.ties = args.ties
    if args.mode:
        cfg.decoder = MODE_DECODER[args.mode]
    cfg.workers = max(1, args.workers)
    cfg.validate()
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "verify":
        results = run_all(args.codes, corrupt=args.corrupt, random_count=args.random)
        for r in results:
            print(r.line())
        return 0 if all(r.passed for r in results) else 1
    try:
        cfg = _apply_overrides(load_config(args.config), args, SUBCOMMAND_KIND[args.command])
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for path in run_experiment(cfg, args.out):
        log.info("wrote %s", path)
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
