"""Fixed-schema CSV rendering and parsing for experiment results.

Floats are rendered with 9 significant digits and no locale separators, so
rendering is lossy below 1e-9 relative but stable: a parsed-and-re-rendered
file is byte-identical.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import SchemaMismatchError
from .experiments import SweepResult

CSV_COLUMNS = (
    "experiment",
    "backend",
    "nt",
    "nr",
    "m",
    "c",
    "l",
    "l_nz",
    "n_batch",
    "snr_db",
    "iterations",
    "seed",
    "mae",
    "latency_s",
    "samples_moved",
    "macs",
    "saturations",
)

_FLOAT_COLUMNS = {"snr_db", "mae", "latency_s"}


def _fmt_float(x: float) -> str:
    return f"{x:.9g}"


def render_row(row: SweepResult) -> str:
    return ",".join(
        [
            row.experiment,
            row.backend,
            str(row.n_t),
            str(row.n_r),
            str(row.m),
            str(row.c),
            str(row.l),
            str(row.l_nz),
            str(row.n_batch),
            _fmt_float(row.snr_db),
            str(row.iterations),
            str(row.seed),
            _fmt_float(row.mae),
            _fmt_float(row.latency_s),
            str(row.samples_moved),
            str(row.macs),
            str(row.saturations),
        ]
    )


def render_csv(rows: Iterable[SweepResult]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(render_row(r) for r in rows)
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[SweepResult]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaMismatchError("empty CSV: header row missing")
    header = tuple(lines[0].split(","))
    if header != CSV_COLUMNS:
        raise SchemaMismatchError(f"header {header} != expected {CSV_COLUMNS}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise SchemaMismatchError(f"row has {len(parts)} fields, expected {len(CSV_COLUMNS)}")
        rows.append(
            SweepResult(
                experiment=parts[0],
                backend=parts[1],
                n_t=int(parts[2]),
                n_r=int(parts[3]),
                m=int(parts[4]),
                c=int(parts[5]),
                l=int(parts[6]),
                l_nz=int(parts[7]),
                n_batch=int(parts[8]),
                snr_db=float(parts[9]),
                iterations=int(parts[10]),
                seed=int(parts[11]),
                mae=float(parts[12]),
                latency_s=float(parts[13]),
                samples_moved=int(parts[14]),
                macs=int(parts[15]),
                saturations=int(parts[16]),
            )
        )
    return rows


def write_csv(path, rows: Sequence[SweepResult]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_csv(rows))


def read_csv(path) -> list[SweepResult]:
    with open(path, "r") as fh:
        return parse_csv(fh.read())
