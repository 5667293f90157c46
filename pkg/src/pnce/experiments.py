"""Monte-Carlo experiment harness: SNR sweeps, tap sweeps, and latency benches.

Every sweep point averages MAE over independently seeded channel/noise
draws.  Per-iteration seeds derive from the master seed through a
SeedSequence keyed on the grid point, so iterations may run concurrently
(cap workers with the PNCE_THREADS environment variable) and results are
independent of execution order.
"""

from __future__ import annotations

import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import ChannelSpec, ReceivedFrame, SnrSpec, simulate_frame
from .errors import InvalidConfigError, SaturationDetectedError
from .estimator import CirEstimate, batched_lag_rows, correlate_rows, remove_cp
from .halfprec import BackendConfig, REFERENCE64
from .metrics import mae
from .pilots import BatchPlan, PilotConfig, build_batch_plan
from .pn import PnSequence, default_spec, generate_mseq

DEFAULT_SNR_GRID_DB = tuple(float(s) for s in range(-10, 31, 5))


def worker_count() -> int:
    """Worker cap from PNCE_THREADS (default 1: run iterations serially)."""
    raw = os.environ.get("PNCE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InvalidConfigError(f"PNCE_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InvalidConfigError(f"PNCE_THREADS must be a positive integer, got {raw!r}")
    return n


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid definition for the sweep and bench drivers (desk-scale defaults)."""

    n_t: int = 16
    n_r: int = 16
    pn_lengths: tuple[int, ...] = (511, 1023, 2047)
    c: int = 64
    l: int = 64
    l_nz: tuple[int, ...] = (64,)
    n_batch: tuple[int, ...] = (1,)
    snr_db: tuple[float, ...] = DEFAULT_SNR_GRID_DB
    iterations: int = 50
    seed: int = 0
    backend: BackendConfig = REFERENCE64
    f_s: float = 10e6
    emit_per_iteration: bool = False
    record_latency: bool = True

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidConfigError("iterations must be >= 1")
        for m in self.pn_lengths:
            degree = (m + 1).bit_length() - 1
            if (1 << degree) - 1 != m:
                raise InvalidConfigError(f"PN length {m} is not 2**k - 1")
        if not self.pn_lengths or not self.l_nz or not self.n_batch or not self.snr_db:
            raise InvalidConfigError("grid lists must be non-empty")


@dataclass(frozen=True)
class SweepResult:
    """One result row; mirrors the CSV schema column for column."""

    experiment: str
    backend: str
    n_t: int
    n_r: int
    m: int
    c: int
    l: int
    l_nz: int
    n_batch: int
    snr_db: float
    iterations: int
    seed: int
    mae: float
    latency_s: float
    samples_moved: int
    macs: int
    saturations: int


@dataclass
class WorkCounters:
    """Deterministic work accounting alongside wall-clock timing.

    samples_moved counts received pilot samples ingested (P per batch per
    receiver, the frame volume that drives host-to-device transfer time);
    macs counts correlation multiply-accumulates (rows x M per receiver
    column).
    """

    samples_moved: int = 0
    macs: int = 0


@dataclass
class BenchPoint:
    """Latency statistics for one (M, N_batch, scale, backend) point."""

    backend: str
    n_t: int
    n_r: int
    m: int
    c: int
    l: int
    l_nz: int
    n_batch: int
    snr_db: float
    reps: int
    mean_s: float
    std_s: float
    median_s: float
    samples_moved: int
    macs: int
    seed: int
    times_s: tuple[float, ...] = field(repr=False, default=())


@dataclass
class LatencyReport:
    points: list[BenchPoint]


_SEQ_CACHE: dict[int, PnSequence] = {}


def sequence_for_length(m: int) -> PnSequence:
    """Built-in m-sequence of length m (cached; lengths must be 2**k - 1)."""
    if m not in _SEQ_CACHE:
        degree = (m + 1).bit_length() - 1
        _SEQ_CACHE[m] = generate_mseq(default_spec(degree))
    return _SEQ_CACHE[m]


def _derive_seeds(master: int, *key: int) -> tuple[int, int]:
    ss = np.random.SeedSequence([master, *key])
    chan_seed, noise_seed = ss.generate_state(2, dtype=np.uint64)
    return int(chan_seed), int(noise_seed)


def correlator_rows_for_plan(
    seq: PnSequence, plan: BatchPlan, l: int
) -> list[np.ndarray]:
    """Static correlator state: one stacked lag-window row matrix per batch.

    Batches with identical shift sets share one matrix (all full batches
    do), mirroring a deployment that loads the circulant once and streams
    received frames through it.
    """
    by_shifts: dict[tuple[int, ...], np.ndarray] = {}
    rows_per_batch = []
    for batch in plan.batches:
        key = tuple(a.shift for a in batch)
        if key not in by_shifts:
            by_shifts[key] = batched_lag_rows(seq, batch, l)
        rows_per_batch.append(by_shifts[key])
    return rows_per_batch


def process_frames(
    seq: PnSequence,
    cfg: PilotConfig,
    plan: BatchPlan,
    frames: Sequence[ReceivedFrame],
    backend: BackendConfig,
    counters: WorkCounters | None = None,
    rows_per_batch: Sequence[np.ndarray] | None = None,
) -> CirEstimate:
    """Estimate all CIRs of one frame set: CP removal, correlation, assembly.

    This is the timed processing path; ``rows_per_batch`` carries the
    prebuilt correlator matrices (built on the fly when omitted).  A
    saturated (r, batch) estimate is counted and scored as all-zero taps
    rather than aborting the sweep.
    """
    if rows_per_batch is None:
        rows_per_batch = correlator_rows_for_plan(seq, plan, cfg.l)
    taps = np.zeros((frames[0].n_r, cfg.n_t, cfg.l), dtype=np.complex128)
    saturations = 0
    for batch, frame, rows in zip(plan.batches, frames, rows_per_batch):
        body = np.ascontiguousarray(remove_cp(frame.samples, cfg.c, cfg.m).T)
        if counters is not None:
            counters.samples_moved += frame.n_r * cfg.p
            counters.macs += rows.shape[0] * cfg.m * frame.n_r
        try:
            flat = correlate_rows(rows, body, backend, norm_len=cfg.m)
        except SaturationDetectedError:
            saturations += frame.n_r * len(batch)
            continue
        for i, a in enumerate(batch):
            taps[:, a.transmitter, :] = flat[i * cfg.l : (i + 1) * cfg.l, :].T
    return CirEstimate(taps=taps, backend=backend.kind, norm=1.0 / cfg.m, saturations=saturations)


def _run_one_iteration(
    cfg: ExperimentConfig,
    pilot: PilotConfig,
    seq: PnSequence,
    plan: BatchPlan,
    rows_per_batch: Sequence[np.ndarray],
    l_nz: int,
    snr_db: float,
    chan_seed: int,
    noise_seed: int,
) -> tuple[float, float, int, WorkCounters]:
    chan = ChannelSpec(l=cfg.l, l_nz=l_nz, n_t=cfg.n_t, n_r=cfg.n_r, seed=chan_seed)
    snr = SnrSpec(snr_db=snr_db, noise_seed=noise_seed)
    truth, frames = simulate_frame(pilot, chan, snr, seq)
    counters = WorkCounters()
    start = time.perf_counter()
    est = process_frames(
        seq, pilot, plan, frames, cfg.backend, counters, rows_per_batch=rows_per_batch
    )
    elapsed = time.perf_counter() - start
    return mae(truth, est), elapsed, est.saturations, counters


def _sweep_point(
    cfg: ExperimentConfig,
    experiment: str,
    m: int,
    n_batch: int,
    l_nz: int,
    snr_db: float,
    seed_key: tuple[int, ...],
) -> list[SweepResult]:
    pilot = PilotConfig(m=m, c=cfg.c, n_t=cfg.n_t, n_batch=n_batch, l=cfg.l, f_s=cfg.f_s)
    seq = sequence_for_length(m)
    plan = build_batch_plan(pilot)
    rows_per_batch = correlator_rows_for_plan(seq, plan, cfg.l)
    seeds = [_derive_seeds(cfg.seed, *seed_key, it) for it in range(cfg.iterations)]

    def one(it: int):
        chan_seed, noise_seed = seeds[it]
        return _run_one_iteration(
            cfg, pilot, seq, plan, rows_per_batch, l_nz, snr_db, chan_seed, noise_seed
        )

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, range(cfg.iterations)))
    else:
        outcomes = [one(it) for it in range(cfg.iterations)]

    maes = [o[0] for o in outcomes]
    times = [o[1] for o in outcomes]
    saturations = sum(o[2] for o in outcomes)
    counters = outcomes[0][3]
    mean_mae = math.fsum(maes) / len(maes)
    mean_latency = (math.fsum(times) / len(times)) if cfg.record_latency else 0.0

    def row(experiment_name, iterations, seed, row_mae, row_latency, row_sat) -> SweepResult:
        return SweepResult(
            experiment=experiment_name,
            backend=cfg.backend.kind,
            n_t=cfg.n_t,
            n_r=cfg.n_r,
            m=m,
            c=cfg.c,
            l=cfg.l,
            l_nz=l_nz,
            n_batch=n_batch,
            snr_db=snr_db,
            iterations=iterations,
            seed=seed,
            mae=row_mae,
            latency_s=row_latency,
            samples_moved=counters.samples_moved,
            macs=counters.macs,
            saturations=row_sat,
        )

    rows = [row(experiment, cfg.iterations, cfg.seed, mean_mae, mean_latency, saturations)]
    if cfg.emit_per_iteration:
        for it, (m_it, t_it, sat_it, _) in enumerate(outcomes):
            rows.append(
                row(
                    f"{experiment}:iter",
                    1,
                    seeds[it][0],
                    m_it,
                    t_it if cfg.record_latency else 0.0,
                    sat_it,
                )
            )
    return rows


def run_snr_sweep(cfg: ExperimentConfig) -> list[SweepResult]:
    """MAE vs SNR over the (PN length, N_batch) grid.

    Channel seeds are shared across the SNR axis within an iteration (the
    noise seed varies), so error-floor comparisons are paired.
    """
    results = []
    for m in cfg.pn_lengths:
        for n_batch in cfg.n_batch:
            for si, snr_db in enumerate(cfg.snr_db):
                results.extend(
                    _sweep_point(
                        cfg,
                        "snr_sweep",
                        m,
                        n_batch,
                        cfg.l_nz[0],
                        snr_db,
                        seed_key=(m, n_batch, cfg.l_nz[0], si),
                    )
                )
    return results


def run_tap_sweep(cfg: ExperimentConfig) -> list[SweepResult]:
    """MAE vs SNR while varying the tap count; M and N_batch fixed to the grid heads."""
    m = cfg.pn_lengths[0]
    n_batch = cfg.n_batch[0]
    results = []
    for l_nz in cfg.l_nz:
        for si, snr_db in enumerate(cfg.snr_db):
            results.extend(
                _sweep_point(
                    cfg,
                    "tap_sweep",
                    m,
                    n_batch,
                    l_nz,
                    snr_db,
                    seed_key=(m, n_batch, l_nz, si),
                )
            )
    return results


def run_latency_bench(
    cfg: ExperimentConfig, reps: int = 10, warmup: int = 2
) -> LatencyReport:
    """Wall-clock per-frame processing time over the (M, N_batch) grid.

    One frame covers all N_t pilots (N_t / N_batch batch transmissions).
    Repetitions after ``warmup`` are timed single-threaded; the report
    carries mean, standard deviation, and median alongside the work
    counters.
    """
    if reps < 1:
        raise InvalidConfigError("reps must be >= 1")
    points = []
    for m in cfg.pn_lengths:
        for n_batch in cfg.n_batch:
            pilot = PilotConfig(m=m, c=cfg.c, n_t=cfg.n_t, n_batch=n_batch, l=cfg.l, f_s=cfg.f_s)
            seq = sequence_for_length(m)
            plan = build_batch_plan(pilot)
            rows_per_batch = correlator_rows_for_plan(seq, plan, cfg.l)
            chan_seed, noise_seed = _derive_seeds(cfg.seed, m, n_batch, 0)
            chan = ChannelSpec(l=cfg.l, l_nz=cfg.l_nz[0], n_t=cfg.n_t, n_r=cfg.n_r, seed=chan_seed)
            snr = SnrSpec(snr_db=cfg.snr_db[0], noise_seed=noise_seed)
            _, frames = simulate_frame(pilot, chan, snr, seq)
            times = []
            counters = WorkCounters()
            for rep in range(warmup + reps):
                rep_counters = WorkCounters()
                start = time.perf_counter()
                process_frames(
                    seq, pilot, plan, frames, cfg.backend, rep_counters,
                    rows_per_batch=rows_per_batch,
                )
                elapsed = time.perf_counter() - start
                if rep >= warmup:
                    times.append(elapsed)
                    counters = rep_counters
            points.append(
                BenchPoint(
                    backend=cfg.backend.kind,
                    n_t=cfg.n_t,
                    n_r=cfg.n_r,
                    m=m,
                    c=cfg.c,
                    l=cfg.l,
                    l_nz=cfg.l_nz[0],
                    n_batch=n_batch,
                    snr_db=cfg.snr_db[0],
                    reps=len(times),
                    mean_s=statistics.fmean(times),
                    std_s=statistics.stdev(times) if len(times) > 1 else 0.0,
                    median_s=statistics.median(times),
                    samples_moved=counters.samples_moved,
                    macs=counters.macs,
                    seed=cfg.seed,
                    times_s=tuple(times),
                )
            )
    return LatencyReport(points=points)


def bench_rows(report: LatencyReport, record_latency: bool = True) -> list[SweepResult]:
    """Flatten a LatencyReport into CSV-schema rows (mae column zeroed)."""
    rows = []
    for p in report.points:
        rows.append(
            SweepResult(
                experiment="latency_bench",
                backend=p.backend,
                n_t=p.n_t,
                n_r=p.n_r,
                m=p.m,
                c=p.c,
                l=p.l,
                l_nz=p.l_nz,
                n_batch=p.n_batch,
                snr_db=p.snr_db,
                iterations=p.reps,
                seed=p.seed,
                mae=0.0,
                latency_s=p.mean_s if record_latency else 0.0,
                samples_moved=p.samples_moved,
                macs=p.macs,
                saturations=0,
            )
        )
    return rows
