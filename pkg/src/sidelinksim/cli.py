"""Command-line entry point: ``sidelinksim --config sweep.ini --output out/``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .sweep import ConfigError, RootConfig, load_config, run_sweep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sidelinksim", description=__doc__)
    p.add_argument("--config", help="INI configuration file (defaults to the baseline highway)")
    p.add_argument("--output", help="output directory (overrides [output] directory)")
    p.add_argument("--seed", type=int, help="root seed (overrides [sim] rng_seed)")
    p.add_argument("--no-parallel", action="store_true", help="run grid cells sequentially")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else RootConfig()
    except (ConfigError, OSError) as exc:
        print(f"sidelinksim: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, sim=dataclasses.replace(cfg.sim, rng_seed=args.seed))
    outcome = run_sweep(cfg, args.output, parallel=not args.no_parallel)
    for cell, err in outcome.errors.items():
        print(f"sidelinksim: cell {cell} failed: {err}", file=sys.stderr)
    print(f"wrote {len(outcome.result.points)} points to {outcome.output_dir / 'sweep.csv'}")
    return 0 if outcome.ok else 1


if __name__ == "__main__":
    sys.exit(main())
