"""Gnuplot script generation for experiment CSVs; nothing is plotted in-process."""
from __future__ import annotations

import csv
from pathlib import Path

from .errors import GeobeamError


class UnknownSchemaError(GeobeamError, ValueError):
    pass


FIG2_HEADER = ["t", "q", "ratio", "std_error", "predicted", "policy"]
BEAM_GAIN_HEADER = ["M", "phi", "r", "gain"]


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace("'", "\\'")


def _fig2_script(csv_path: Path, rows) -> str:
    ts = sorted({r["t"] for r in rows}, key=float)
    policies = sorted({r["policy"] for r in rows})
    src = _esc(csv_path.name)
    lines = [
        "# generated by geobeam plot",
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        f"set output '{_esc(csv_path.stem)}.png'",
        "set xlabel 'q'",
        "set ylabel 'R_N / log(1 + P M^2)'",
        "set key left top",
        "set yrange [0:1.1]",
    ]
    plots = []
    for policy in policies:
        for t in ts:
            cond = f'(strcol(1) eq "{t}" && strcol(6) eq "{policy}")'
            plots.append(f"'{src}' every ::1 using 2:({cond} ? $3 : 1/0) "
                         f"with linespoints title 't={t} {policy}'")
    for t in ts:
        plots.append(f"'{src}' every ::1 using 2:(strcol(1) eq \"{t}\" ? $5 : 1/0) "
                     f"with lines dashtype 2 lc rgb 'gray' title 'q-t-1, t={t}'")
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def _beam_gain_script(csv_path: Path, rows) -> str:
    curves = sorted({(r["M"], r["phi"]) for r in rows}, key=lambda k: (int(k[0]), float(k[1])))
    src = _esc(csv_path.name)
    lines = [
        "# generated by geobeam plot",
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        f"set output '{_esc(csv_path.stem)}.png'",
        "set xlabel 'r [m]'",
        "set ylabel 'f(r, phi)'",
        "set logscale y",
        "set yrange [1e-6:1.5]",
    ]
    plots = [
        f"'{src}' every ::1 using 3:((strcol(1) eq \"{M}\" && strcol(2) eq \"{phi}\") ? $4 : 1/0) "
        f"with lines title 'M={M}, phi={float(phi):.4g}'"
        for M, phi in curves
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def emit_plot_script(csv_path) -> Path:
    """Write ``<csv stem>.gp`` beside the CSV and return its path."""
    csv_path = Path(csv_path)
    with csv_path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        rows = list(reader)
    if not header or not rows:
        raise UnknownSchemaError(f"{csv_path}: empty CSV")
    if header == FIG2_HEADER:
        text = _fig2_script(csv_path, rows)
    elif header == BEAM_GAIN_HEADER:
        text = _beam_gain_script(csv_path, rows)
    else:
        raise UnknownSchemaError(f"{csv_path}: no plot template for columns {header}")
    out = csv_path.with_suffix(".gp")
    out.write_text(text, encoding="utf-8")
    return out
