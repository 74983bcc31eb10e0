"""Command-line experiment runner.

    dispersim <subcommand> --config <path> [--out <dir>] [--threads <n>]
    dispersim plot-script --csv <path> [--out <file>]

Each experiment writes `<subcommand>.csv` (schema-tagged, 17-significant-
digit numbers, byte-identical across repeated runs) and
`<subcommand>.manifest.txt` (config echo + run diagnostics; every crossed
diagnostic threshold appears as a flag line).

Exit codes: 0 success, 2 config error, 3 resource cap, 4 accuracy
failure, 5 internal numerical failure.  Failures emit a one-line JSON
error record on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config, write_csv, write_manifest
from .errors import AccuracyError, ConfigError, NumericalError, ResourceLimitError
from .experiments import EXPERIMENTS
from .plotting import emit_plot_script

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_ACCURACY = 4
EXIT_NUMERICAL = 5


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dispersim",
        description="dispersive-decay experiments for lattice and metric-graph evolutions",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="flat key-value config file")
        p.add_argument("--out", default=".", help="output directory (default: cwd)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker count for independent parameter points")
    p = sub.add_parser("plot-script", help="emit a matplotlib script for a result CSV")
    p.add_argument("--csv", required=True, help="CSV produced by an experiment")
    p.add_argument("--out", default=None, help="script path (default: <csv>.plot.py)")
    return parser


def _fail(code: int, exc: Exception) -> int:
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(record), file=sys.stderr)
    return code


def _run_experiment(command: str, config_path: str, out_dir: str, threads: int | None) -> None:
    cfg = load_config(config_path, section=command)
    if threads is None:
        threads = cfg.get_int("threads", default=os.cpu_count() or 1)
    start = time.perf_counter()
    result = EXPERIMENTS[command](cfg, max(1, threads))
    duration = time.perf_counter() - start
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(out / f"{command}.csv", result.schema, result.columns,
                         result.rows, result.schema_tokens)
    info = {
        "tool": "dispersim",
        "version": __version__,
        "command": command,
        "duration_seconds": f"{duration:.3f}",
        "threads": str(threads),
        "csv": csv_path.name,
    }
    info.update(result.info)
    write_manifest(out / f"{command}.manifest.txt", cfg.data, info, result.flags)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "plot-script":
            emit_plot_script(args.csv, args.out)
        else:
            _run_experiment(args.command, args.config, args.out, args.threads)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except ResourceLimitError as exc:
        return _fail(EXIT_RESOURCE, exc)
    except AccuracyError as exc:
        return _fail(EXIT_ACCURACY, exc)
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return _fail(EXIT_NUMERICAL, exc)
    except ValueError as exc:
        # invalid parameter combinations surface as config errors
        return _fail(EXIT_CONFIG, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
