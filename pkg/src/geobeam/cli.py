"""``geobeam`` command line: run preset experiments and emit plot scripts."""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import (ConfigParseError, ConfigValidationError, load_file, parse_overrides,
                     resolve)
from .errors import (DomainError, GeobeamError, InsufficientUsersError, NumericError,
                     RegionTooDenseError)
from .plotscript import UnknownSchemaError, emit_plot_script

log = logging.getLogger("geobeam")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_value(row[c]) for c in columns) + "\n")
    return buf.getvalue()


def run(config_path=None, overrides=None, out_dir=None, env=None) -> tuple[Path, Path]:
    """Resolve the config, run its experiment, write CSV plus manifest; return both paths."""
    from .experiments import build, run_experiment

    file_values = load_file(config_path) if config_path else {}
    flags = dict(overrides or {})
    if out_dir is not None:
        flags["output_path"] = str(out_dir)
    cfg = resolve(file_values, flags, env)
    built = build(cfg)
    columns, rows = run_experiment(cfg, built)

    out = Path(cfg["output_path"])
    out.mkdir(parents=True, exist_ok=True)
    name = built.experiment.value.lower()
    csv_path = out / f"{name}.csv"
    text = render_csv(columns, rows)
    csv_path.write_text(text, encoding="utf-8", newline="")

    manifest = {
        "experiment": built.experiment.value,
        "geobeam_version": __version__,
        "seed": cfg["mc.seed"],
        "csv": csv_path.name,
        "csv_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "rows": len(rows),
        "precedence": "flag > env(GEOBEAM_SEED) > file > default",
        "sources": dict(sorted(cfg.sources.items())),
        "config": cfg.canonical(),
    }
    manifest_path = out / f"{name}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path, manifest_path


def _parser():
    ap = argparse.ArgumentParser(prog="geobeam", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a config file")
    r.add_argument("--config", help="key=value or .json config file")
    r.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    r.add_argument("--out", help="output directory (overrides output_path)")

    p = sub.add_parser("plot", help="write a gnuplot script for an experiment CSV")
    p.add_argument("--csv", required=True)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            csv_path, manifest = run(args.config, parse_overrides(args.overrides), args.out)
            print(csv_path)
            log.info("manifest written to %s", manifest)
        else:
            print(emit_plot_script(args.csv))
        return EXIT_OK
    except ConfigParseError as exc:
        print(f"geobeam: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigValidationError, RegionTooDenseError, UnknownSchemaError) as exc:
        print(f"geobeam: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericError, DomainError, InsufficientUsersError) as exc:
        print(f"geobeam: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GeobeamError, OSError) as exc:
        print(f"geobeam: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
