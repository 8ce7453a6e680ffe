"""``folia`` command line.

Exit status: 0 when every check passes, 1 when at least one fails, 2 on
configuration or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import suites
from .config import load_config
from .errors import ConfigError, DimensionMismatch, ParseError

COMMANDS = ("verify-cone", "classify", "laplacian-check", "universal-orbit", "leaf-grid")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration file")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--out", type=Path, help="directory for report and grid files")
    common.add_argument("--no-timestamp", action="store_true", help="omit wall time from the report")

    p = argparse.ArgumentParser(prog="folia", description="Foliated-bundle verification suites.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-cone", parents=[common], help="invariant cone example suite")
    cl = sub.add_parser("classify", parents=[common], help="plainness heuristics for a linear representation")
    cl.add_argument("rep_file", type=Path, help="LinearRep JSON document")
    sub.add_parser("laplacian-check", parents=[common], help="dbar-Laplacian identity suite")
    sub.add_parser("universal-orbit", parents=[common], help="Hol(D, closed D) action suite")
    sub.add_parser("leaf-grid", parents=[common], help="CSV/PGM dump of the cone function on the domain")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config, {"seed": args.seed, "out_dir": str(args.out) if args.out else None})
        out_dir = Path(cfg.out_dir) if cfg.out_dir else None
        if args.command == "verify-cone":
            report = suites.run_verify_cone(cfg)
        elif args.command == "classify":
            report = suites.run_classify(cfg, args.rep_file)
        elif args.command == "laplacian-check":
            report = suites.run_laplacian_check(cfg)
        elif args.command == "universal-orbit":
            report = suites.run_universal_orbit(cfg)
        else:
            report = suites.run_leaf_grid(cfg, out_dir)
        text = json.dumps(report.to_json(timestamp=not args.no_timestamp), indent=2) + "\n"
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / f"{args.command}.json").write_text(text)
    except (ConfigError, ParseError, DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return 1 if report.failed else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
