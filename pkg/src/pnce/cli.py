"""Command-line client for the estimation service.

Each subcommand builds a JSON request and sends it over the service API.
By default the app is mounted in-process (no network); pass ``--server`` to
talk to a remote instance started with ``pnce serve``.  Exit codes: 0 on
success, 1 on usage errors, 2 on data or validation errors.
"""

from __future__ import annotations

import argparse
import asyncio
import base64
import json
import sys
from pathlib import Path

import httpx

from . import __version__

USAGE_EXIT = 1
DATA_EXIT = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class ServiceClient:
    """Thin HTTP wrapper; in-process ASGI transport unless a server URL is given."""

    def __init__(self, server: str | None = None):
        self._client = (
            httpx.Client(base_url=server.rstrip("/"), timeout=None) if server else None
        )

    async def _asgi_post(self, path: str, payload: dict) -> httpx.Response:
        from .service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://pnce.local", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    def post(self, path: str, payload: dict) -> dict:
        if self._client is not None:
            resp = self._client.post(path, json=payload)
        else:
            resp = asyncio.run(self._asgi_post(path, payload))
        if resp.status_code != 200:
            try:
                detail = resp.json()
            except ValueError:
                detail = resp.text
            raise SystemExitError(f"service error {resp.status_code} on {path}: {detail}")
        return resp.json()

    def close(self):
        if self._client is not None:
            self._client.close()


class SystemExitError(Exception):
    """Data/validation failure; maps to exit code 2."""


def _backend_payload(args) -> dict:
    return {
        "kind": args.backend,
        "chunk_len": args.chunk_len,
        "accumulator": args.accumulator,
    }


def _pn_payload(args) -> dict:
    payload = {"degree": args.degree, "state": args.state}
    if args.taps:
        payload["taps"] = args.taps
    return payload


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise SystemExitError(f"config file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SystemExitError(f"invalid JSON in {path}: {exc}") from exc


def _tap_rows_csv(rows: list[dict]) -> str:
    lines = ["receiver,transmitter,lag,re,im"]
    for r in rows:
        lines.append(
            f"{r['receiver']},{r['transmitter']},{r['lag']},{r['re']:.9g},{r['im']:.9g}"
        )
    return "\n".join(lines) + "\n"


def _rows_to_csv_text(rows: list[dict]) -> str:
    from .experiments import SweepResult
    from .records import render_csv

    results = [
        SweepResult(
            experiment=r["experiment"],
            backend=r["backend"],
            n_t=r["nt"],
            n_r=r["nr"],
            m=r["m"],
            c=r["c"],
            l=r["l"],
            l_nz=r["l_nz"],
            n_batch=r["n_batch"],
            snr_db=r["snr_db"],
            iterations=r["iterations"],
            seed=r["seed"],
            mae=r["mae"],
            latency_s=r["latency_s"],
            samples_moved=r["samples_moved"],
            macs=r["macs"],
            saturations=r["saturations"],
        )
        for r in rows
    ]
    return render_csv(results)


def _add_server(p: argparse.ArgumentParser):
    p.add_argument("--server", default=None, help="base URL of a running service (default: in-process)")


def _add_backend(p: argparse.ArgumentParser):
    p.add_argument("--backend", default="reference64",
                   choices=["reference64", "reference32", "tensor16"])
    p.add_argument("--chunk-len", dest="chunk_len", type=int, default=256,
                   help="samples per partially-normalized chunk (tensor16)")
    p.add_argument("--accumulator", default="binary32", choices=["binary32", "binary16"])


def build_parser() -> _Parser:
    parser = _Parser(prog="pnce", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pnce {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-pn", help="emit one PN sequence on standard output")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--taps", type=int, nargs="+", default=None)
    p.add_argument("--state", type=int, default=1)
    _add_server(p)

    p = sub.add_parser("simulate", help="simulate one pilot sweep to an IQ file plus truth CSV")
    p.add_argument("--degree", type=int, default=9)
    p.add_argument("--taps", type=int, nargs="+", default=None)
    p.add_argument("--state", type=int, default=1)
    p.add_argument("--cp", type=int, default=64)
    p.add_argument("--nt", type=int, default=16)
    p.add_argument("--nr", type=int, default=16)
    p.add_argument("--nbatch", type=int, default=1)
    p.add_argument("--l", type=int, default=64)
    p.add_argument("--lnz", type=int, default=64)
    p.add_argument("--fs", type=float, default=10e6)
    p.add_argument("--snr-db", type=float, default=None, help="omit for noiseless")
    p.add_argument("--seed", type=int, default=0, help="channel seed")
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--out", required=True, help="IQ file path")
    p.add_argument("--truth-out", default=None, help="ground-truth CSV path")
    _add_server(p)

    p = sub.add_parser("estimate", help="estimate CIRs from an IQ file into a CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--degree", type=int, default=None,
                   help="override the default polynomial for the file's M")
    p.add_argument("--taps", type=int, nargs="+", default=None)
    p.add_argument("--state", type=int, default=1)
    _add_backend(p)
    _add_server(p)

    p = sub.add_parser("sweep", help="run an SNR or tap sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="override the config's output_csv")
    p.add_argument("--seed", type=int, default=None, help="override the config's seed")
    p.add_argument("--no-timing", action="store_true",
                   help="write latency as 0.0 for byte-reproducible output")
    _add_server(p)

    p = sub.add_parser("bench", help="run the latency benchmark from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-timing", action="store_true")
    _add_server(p)

    p = sub.add_parser("plot", help="emit a gnuplot script for one figure kind")
    p.add_argument("--csv", required=True)
    p.add_argument("--kind", required=True, choices=["fig3", "fig4", "fig5", "fig6"])
    p.add_argument("--out", required=True)
    _add_server(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_gen_pn(args, client: ServiceClient) -> int:
    data = client.post("/pn", {"pn": _pn_payload(args)})
    print(" ".join(str(int(c)) for c in data["chips"]))
    return 0


def _cmd_simulate(args, client: ServiceClient) -> int:
    payload = {
        "pn": _pn_payload(args),
        "pilot": {"c": args.cp, "n_t": args.nt, "n_batch": args.nbatch, "f_s": args.fs},
        "channel": {"l": args.l, "l_nz": args.lnz, "n_r": args.nr, "seed": args.seed},
        "snr": {"snr_db": args.snr_db, "noise_seed": args.noise_seed},
    }
    data = client.post("/simulate", payload)
    Path(args.out).write_bytes(base64.b64decode(data["iq_b64"]))
    if args.truth_out:
        Path(args.truth_out).write_text(_tap_rows_csv(data["truth"]))
    print(f"wrote {data['frame_count']} frame(s) to {args.out}", file=sys.stderr)
    return 0


def _cmd_estimate(args, client: ServiceClient) -> int:
    path = Path(args.infile)
    if not path.exists():
        raise SystemExitError(f"IQ file not found: {args.infile}")
    payload = {
        "iq_b64": base64.b64encode(path.read_bytes()).decode("ascii"),
        "backend": _backend_payload(args),
    }
    if args.degree is not None:
        payload["pn"] = _pn_payload(args)
    data = client.post("/estimate", payload)
    Path(args.out).write_text(_tap_rows_csv(data["estimates"]))
    if data["saturations"]:
        print(f"warning: {data['saturations']} saturated estimate(s)", file=sys.stderr)
    return 0


def _sweep_like(args, client: ServiceClient, endpoint: str, wrap_key: str) -> int:
    config = _load_json(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.no_timing:
        config["record_latency"] = False
    out = args.out or config.get("output_csv")
    if not out:
        raise SystemExitError("no output path: set output_csv in the config or pass --out")
    data = client.post(endpoint, {wrap_key: config})
    Path(out).write_text(_rows_to_csv_text(data["rows"]))
    print(f"wrote {len(data['rows'])} row(s) to {out}", file=sys.stderr)
    return 0


def _cmd_sweep(args, client: ServiceClient) -> int:
    return _sweep_like(args, client, "/sweep", "config")


def _cmd_bench(args, client: ServiceClient) -> int:
    config = _load_json(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.no_timing:
        config["record_latency"] = False
    out = args.out or config.get("output_csv")
    if not out:
        raise SystemExitError("no output path: set output_csv in the config or pass --out")
    data = client.post("/bench", {"config": config})
    Path(out).write_text(_rows_to_csv_text(data["rows"]))
    print(f"wrote {len(data['rows'])} row(s) to {out}", file=sys.stderr)
    return 0


def _cmd_plot(args, client: ServiceClient) -> int:
    path = Path(args.csv)
    if not path.exists():
        raise SystemExitError(f"CSV file not found: {args.csv}")
    data = client.post(
        "/plot", {"csv": path.read_text(), "kind": args.kind, "csv_name": str(path)}
    )
    Path(args.out).write_text(data["script"])
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("pnce.service.app:app", host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "gen-pn": _cmd_gen_pn,
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "sweep": _cmd_sweep,
    "bench": _cmd_bench,
    "plot": _cmd_plot,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return USAGE_EXIT

    if args.command == "serve":
        return _cmd_serve(args)

    client = ServiceClient(server=args.server)
    try:
        return _COMMANDS[args.command](args, client)
    except SystemExitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return DATA_EXIT
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
