"""Command-line entry point: one subcommand per experiment kind.

Exit codes: 0 success, 1 user/config error, 2 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import KINDS, ConfigError, ExperimentConfig, run
from .qubo import CapacityError

EXIT_OK = 0
EXIT_USER = 1
EXIT_CAPACITY = 2


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="JSON experiment config file")
    sub.add_argument("--seed", type=int, help="master seed (overrides config)")
    sub.add_argument("--out", help="output directory (overrides config)")
    sub.add_argument("--replicas", type=int, help="replica count (overrides config)")
    sub.add_argument("--quiet", action="store_true", help="suppress progress output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chemca",
        description="Probabilistic chemical cellular automata and hybrid Ising solvers",
    )
    subs = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sub = subs.add_parser(kind, help=f"run a {kind} experiment")
        _add_common(sub)
        if kind == "count":
            sub.add_argument("-n", "--side", type=int, help="grid side length")
            sub.add_argument("--cell-levels", type=int, help="cell stirrer levels")
            sub.add_argument("--iface-levels", type=int, help="interfacial stirrer levels")
            sub.add_argument("--chem-levels", type=int, help="chemical states per cell")
        if kind == "cca1d":
            sub.add_argument("--rule", help="rule label, e.g. 30-1")
            sub.add_argument("--cells", type=int, help="chain length")
            sub.add_argument("--steps", type=int, help="number of steps")
            sub.add_argument("--mode", choices=("probabilistic", "display"))
    return parser


def _assemble(args) -> dict:
    raw: dict = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
    raw["kind"] = args.kind
    if args.kind == "count":
        if args.side is not None:
            raw["n"] = args.side
        if args.cell_levels is not None:
            raw["cell_levels"] = args.cell_levels
        if args.iface_levels is not None:
            raw["iface_levels"] = args.iface_levels
        if args.chem_levels is not None:
            raw["chem_levels"] = args.chem_levels
    if args.kind == "cca1d":
        for key in ("rule", "cells", "steps", "mode"):
            val = getattr(args, key)
            if val is not None:
                raw[key] = val
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out"] = args.out
    if args.replicas is not None:
        raw["replicas"] = args.replicas
    return raw


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.from_dict(_assemble(args))
        run(cfg, quiet=args.quiet)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
