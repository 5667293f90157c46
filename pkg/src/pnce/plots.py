"""Emit gnuplot scripts reproducing the study figures from result CSVs.

Scripts are self-contained text: curves are enumerated from the CSV at emit
time and the data is filtered inline with gnuplot ternaries, so the output
renders with a bare ``gnuplot <script>`` next to the CSV.
"""

from __future__ import annotations

from typing import Sequence

from .errors import SchemaMismatchError
from .experiments import SweepResult
from .records import CSV_COLUMNS, parse_csv

FIGURE_KINDS = ("fig3", "fig4", "fig5", "fig6")

# 1-based gnuplot column indices into the fixed CSV schema.
_COL = {name: i + 1 for i, name in enumerate(CSV_COLUMNS)}


def _curve(csv_name: str, x_col: int, y_col: int, experiment: str,
           conditions: list[tuple[int, object]], title: str) -> str:
    guards = [f'stringcolumn({_COL["experiment"]}) eq "{experiment}"']
    guards += [f"${col}=={value}" for col, value in conditions]
    cond = " && ".join(guards)
    return f"'{csv_name}' using {x_col}:({cond} ? ${y_col} : 1/0) with linespoints title \"{title}\""


def build_plot_script(rows: Sequence[SweepResult], kind: str, csv_name: str) -> str:
    """Build a gnuplot script for one figure kind over already-parsed rows."""
    if kind not in FIGURE_KINDS:
        raise SchemaMismatchError(f"unknown figure kind {kind!r}, expected one of {FIGURE_KINDS}")

    lines = [
        f"# {kind}: generated from {csv_name}",
        'set datafile separator ","',
        "set key outside",
        "set grid",
    ]
    curves: list[str] = []

    if kind in ("fig3", "fig4"):
        experiment = "snr_sweep" if kind == "fig3" else "tap_sweep"
        data = [r for r in rows if r.experiment == experiment]
        lines += ['set xlabel "SNR (dB)"', 'set ylabel "MAE"', "set logscale y"]
        if kind == "fig3":
            for m, nb in sorted({(r.m, r.n_batch) for r in data}):
                curves.append(
                    _curve(csv_name, _COL["snr_db"], _COL["mae"], experiment,
                           [(_COL["m"], m), (_COL["n_batch"], nb)],
                           f"M={m} Nbatch={nb}")
                )
        else:
            for l_nz in sorted({r.l_nz for r in data}):
                curves.append(
                    _curve(csv_name, _COL["snr_db"], _COL["mae"], experiment,
                           [(_COL["l_nz"], l_nz)], f"Lnz={l_nz}")
                )
    else:
        experiment = "latency_bench"
        data = [r for r in rows if r.experiment == experiment]
        lines += ['set xlabel "N_batch"', 'set ylabel "processing latency (s)"']
        if kind == "fig5":
            for m in sorted({r.m for r in data}):
                curves.append(
                    _curve(csv_name, _COL["n_batch"], _COL["latency_s"], experiment,
                           [(_COL["m"], m)], f"M={m}")
                )
        else:
            for n_t, n_r in sorted({(r.n_t, r.n_r) for r in data}):
                curves.append(
                    _curve(csv_name, _COL["n_batch"], _COL["latency_s"], experiment,
                           [(_COL["nt"], n_t), (_COL["nr"], n_r)], f"{n_t}x{n_r}")
                )

    if curves:
        lines.append("plot \\")
        lines.append(", \\\n".join("  " + c for c in curves))
    else:
        lines.append("# no matching rows; nothing to plot")
    return "\n".join(lines) + "\n"


def emit_plot_script(csv_path, kind: str) -> str:
    """Build a gnuplot script for one figure kind from a result CSV on disk."""
    with open(csv_path, "r") as fh:
        rows = parse_csv(fh.read())
    return build_plot_script(rows, kind, str(csv_path))
