"""Command line entry point.

Usage::

    zmap-lab <spin-map|spin-osc|band-sweep|bias-sweep> --config <path>
             [--out <path>] [--format csv|jsonl] [--workers N] [--seed N]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
``ZMAP_LOG`` sets the log level (e.g. DEBUG, INFO); no other
environment variables are consulted.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .artifact import write_artifact
from .config import EXPERIMENTS, load_config
from .errors import ConfigError, ZmapError
from .runner import run

__all__ = ["main"]

log = logging.getLogger("zmaplab")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zmap-lab",
        description="Cycle-geometry pumping sweeps with deterministic CSV output.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="path to a key=value config file")
        p.add_argument("--out", default=None, help="output path (default <experiment>.<format>)")
        p.add_argument("--format", default=None, choices=("csv", "jsonl"),
                       help="output format (default csv)")
        p.add_argument("--workers", type=int, default=None, help="worker threads (default 1)")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved for future stochastic features; echoed only")
    return parser


def _setup_logging() -> None:
    level_name = os.environ.get("ZMAP_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = _build_parser().parse_args(argv)
    overrides = {
        "workers": args.workers,
        "out_format": args.format,
        "out_path": args.out,
        "seed": args.seed,
    }
    try:
        cfg = load_config(args.config, experiment=args.experiment, overrides=overrides)
        artifact = run(cfg)
        path = cfg.out_path or f"{cfg.experiment}.{cfg.out_format}"
        try:
            write_artifact(artifact, path, cfg.out_format)
        except OSError as exc:
            raise ConfigError(f"cannot write output file {path!r}: {exc}") from None
    except ConfigError as exc:
        print(f"zmap-lab: config error: {exc}", file=sys.stderr)
        return 2
    except ZmapError as exc:
        print(f"zmap-lab: numerical failure in {args.experiment}: {exc}", file=sys.stderr)
        return 3
    log.info("wrote %d rows to %s", len(artifact.rows), path)
    return 0


if __name__ == "__main__":  # pragma: no cover - exercised via the console script
    sys.exit(main())
