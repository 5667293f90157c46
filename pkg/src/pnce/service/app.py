"""FastAPI service wrapping the estimation core.

Every CLI subcommand maps onto one endpoint here; payloads are JSON with
IQ frame bytes carried base64-encoded.  Package errors surface as HTTP 400
with the error class name, validation errors as FastAPI's usual 422.
"""

from __future__ import annotations

import base64
import binascii
import dataclasses

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..channel import ChannelSpec, SnrSpec, simulate_frame
from ..errors import InvalidConfigError, PnceError
from ..experiments import (
    ExperimentConfig,
    bench_rows,
    process_frames,
    run_latency_bench,
    run_snr_sweep,
    run_tap_sweep,
)
from ..halfprec import BackendConfig
from ..iqfile import IqFileHeader, read_iq_bytes, write_iq_bytes
from ..pilots import PilotConfig, build_batch_plan
from ..pn import LfsrSpec, PnSequence, default_spec, generate_mseq
from ..plots import build_plot_script
from ..records import parse_csv
from . import schemas


def _lfsr_spec(model: schemas.LfsrModel) -> LfsrSpec:
    if model.taps is None:
        return default_spec(model.degree, state=model.state)
    return LfsrSpec(degree=model.degree, taps=tuple(model.taps), state=model.state)


def _backend(model: schemas.BackendModel) -> BackendConfig:
    return BackendConfig(
        kind=model.kind, chunk_len=model.chunk_len, accumulator=model.accumulator
    )


def _tap_rows(taps: np.ndarray) -> list[schemas.TapRow]:
    n_r, n_t, l = taps.shape
    rows = []
    for r in range(n_r):
        for t in range(n_t):
            for lag in range(l):
                v = taps[r, t, lag]
                rows.append(
                    schemas.TapRow(receiver=r, transmitter=t, lag=lag, re=v.real, im=v.imag)
                )
    return rows


def _experiment_config(cfg: schemas.RunConfigModel) -> ExperimentConfig:
    return ExperimentConfig(
        n_t=cfg.nt,
        n_r=cfg.nr,
        pn_lengths=tuple(cfg.pn_lengths),
        c=cfg.cp,
        l=cfg.l,
        l_nz=tuple(cfg.l_nz),
        n_batch=tuple(cfg.n_batch),
        snr_db=tuple(cfg.snr_db),
        iterations=cfg.iterations,
        seed=cfg.seed,
        backend=_backend(cfg.backend),
        f_s=cfg.f_s,
        emit_per_iteration=cfg.per_iteration,
        record_latency=cfg.record_latency,
    )


def _row_models(rows) -> list[schemas.RowModel]:
    out = []
    for r in rows:
        d = dataclasses.asdict(r)
        d["nt"] = d.pop("n_t")
        d["nr"] = d.pop("n_r")
        out.append(schemas.RowModel(**d))
    return out


def _decode_iq(b64: str) -> bytes:
    try:
        return base64.b64decode(b64, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise InvalidConfigError(f"iq_b64 is not valid base64: {exc}") from exc


def create_app() -> FastAPI:
    app = FastAPI(
        title="pnce",
        version=__version__,
        description="PN-sequence correlation channel estimation service",
    )

    @app.exception_handler(PnceError)
    async def _pnce_error(request: Request, exc: PnceError):
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/healthz", response_model=schemas.HealthResponse)
    def healthz():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/pn", response_model=schemas.PnResponse)
    def gen_pn(req: schemas.PnRequest):
        spec = _lfsr_spec(req.pn)
        seq = generate_mseq(spec)
        return schemas.PnResponse(
            m=seq.m,
            degree=spec.degree,
            taps=list(spec.taps),
            chips=[float(c) for c in seq.chips],
        )

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest):
        seq = generate_mseq(_lfsr_spec(req.pn))
        pilot = PilotConfig(
            m=seq.m,
            c=req.pilot.c,
            n_t=req.pilot.n_t,
            n_batch=req.pilot.n_batch,
            l=req.channel.l,
            f_s=req.pilot.f_s,
        )
        chan = ChannelSpec(
            l=req.channel.l,
            l_nz=req.channel.l_nz,
            n_t=req.pilot.n_t,
            n_r=req.channel.n_r,
            seed=req.channel.seed,
        )
        snr = SnrSpec(snr_db=req.snr.snr_db_value(), noise_seed=req.snr.noise_seed)
        truth, frames = simulate_frame(pilot, chan, snr, seq)
        header = IqFileHeader(
            n_t=pilot.n_t,
            n_r=chan.n_r,
            p=pilot.p,
            l=pilot.l,
            m=pilot.m,
            c=pilot.c,
            n_batch=pilot.n_batch,
            frame_count=len(frames),
            seed=chan.seed,
        )
        raw = write_iq_bytes(header, frames)
        return schemas.SimulateResponse(
            iq_b64=base64.b64encode(raw).decode("ascii"),
            truth=_tap_rows(truth.taps),
            m=pilot.m,
            p=pilot.p,
            frame_count=len(frames),
        )

    @app.post("/estimate", response_model=schemas.EstimateResponse)
    def estimate(req: schemas.EstimateRequest):
        header, frames = read_iq_bytes(_decode_iq(req.iq_b64))
        if req.pn is not None:
            seq = generate_mseq(_lfsr_spec(req.pn))
        else:
            degree = (header.m + 1).bit_length() - 1
            if (1 << degree) - 1 != header.m:
                raise InvalidConfigError(f"file M={header.m} is not 2**k - 1")
            seq = generate_mseq(default_spec(degree))
        if seq.m != header.m:
            raise InvalidConfigError(f"PN length {seq.m} != file M {header.m}")
        pilot = PilotConfig(
            m=header.m, c=header.c, n_t=header.n_t,
            n_batch=header.n_batch, l=header.l, f_s=1.0,
        )
        plan = build_batch_plan(pilot)
        if plan.n_batches != header.frame_count:
            raise InvalidConfigError(
                f"file holds {header.frame_count} frames but the plan needs {plan.n_batches}"
            )
        est = process_frames(seq, pilot, plan, frames, _backend(req.backend))
        return schemas.EstimateResponse(
            estimates=_tap_rows(est.taps),
            backend=est.backend,
            saturations=est.saturations,
        )

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest):
        cfg = _experiment_config(req.config)
        if req.config.kind == "snr":
            rows = run_snr_sweep(cfg)
        else:
            rows = run_tap_sweep(cfg)
        return schemas.SweepResponse(rows=_row_models(rows))

    @app.post("/bench", response_model=schemas.SweepResponse)
    def bench(req: schemas.BenchRequest):
        c = req.config
        cfg = ExperimentConfig(
            n_t=c.nt,
            n_r=c.nr,
            pn_lengths=tuple(c.pn_lengths),
            c=c.cp,
            l=c.l,
            l_nz=(c.l_nz,),
            n_batch=tuple(c.n_batch),
            snr_db=(c.snr_db,),
            iterations=1,
            seed=c.seed,
            backend=_backend(c.backend),
            f_s=c.f_s,
        )
        report = run_latency_bench(cfg, reps=c.reps, warmup=c.warmup)
        return schemas.SweepResponse(
            rows=_row_models(bench_rows(report, record_latency=c.record_latency))
        )

    @app.post("/plot", response_model=schemas.PlotResponse)
    def plot(req: schemas.PlotRequest):
        rows = parse_csv(req.csv)
        return schemas.PlotResponse(script=build_plot_script(rows, req.kind, req.csv_name))

    return app


app = create_app()
