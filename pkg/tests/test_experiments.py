"""Tests for the Monte-Carlo sweep and latency bench drivers."""

import math

import numpy as np
import pytest

from pnce.errors import InvalidConfigError
from pnce.experiments import (
    ExperimentConfig,
    bench_rows,
    run_latency_bench,
    run_snr_sweep,
    run_tap_sweep,
    sequence_for_length,
)
from pnce.halfprec import BackendConfig


def small_config(**overrides):
    defaults = dict(
        n_t=4,
        n_r=4,
        pn_lengths=(511,),
        c=64,
        l=64,
        l_nz=(16,),
        n_batch=(1,),
        snr_db=(0.0, 10.0),
        iterations=3,
        seed=99,
        record_latency=True,
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


class TestConfig:
    def test_rejects_bad_pn_length(self):
        with pytest.raises(InvalidConfigError):
            small_config(pn_lengths=(500,))

    def test_rejects_zero_iterations(self):
        with pytest.raises(InvalidConfigError):
            small_config(iterations=0)

    def test_sequence_cache_lengths(self):
        assert sequence_for_length(511).m == 511
        assert sequence_for_length(2047).m == 2047


class TestRunSnrSweep:
    def test_grid_cardinality(self):
        rows = run_snr_sweep(small_config(pn_lengths=(511,), n_batch=(1, 2), snr_db=(0.0, 10.0, 20.0)))
        assert len(rows) == 6  # 1 M x 2 batch x 3 SNR aggregates
        assert all(r.experiment == "snr_sweep" for r in rows)
        assert all(r.iterations == 3 for r in rows)

    def test_determinism(self):
        cfg = small_config()
        a = run_snr_sweep(cfg)
        b = run_snr_sweep(cfg)
        assert [(r.mae, r.saturations) for r in a] == [(r.mae, r.saturations) for r in b]

    def test_mae_decreases_with_snr(self):
        rows = run_snr_sweep(small_config(snr_db=(-10.0, 30.0), iterations=5))
        low = next(r for r in rows if r.snr_db == -10.0)
        high = next(r for r in rows if r.snr_db == 30.0)
        assert high.mae < low.mae

    def test_per_iteration_rows(self):
        rows = run_snr_sweep(small_config(emit_per_iteration=True, snr_db=(5.0,)))
        aggregates = [r for r in rows if r.experiment == "snr_sweep"]
        details = [r for r in rows if r.experiment == "snr_sweep:iter"]
        assert len(aggregates) == 1 and len(details) == 3
        assert aggregates[0].mae == pytest.approx(
            math.fsum(d.mae for d in details) / len(details)
        )

    def test_no_timing_zeroes_latency(self):
        rows = run_snr_sweep(small_config(record_latency=False, snr_db=(5.0,)))
        assert all(r.latency_s == 0.0 for r in rows)

    def test_noiseless_point_below_sidelobe_bound(self):
        # noiseless regime: mean per-lag error is bounded by the average
        # sidelobe magnitude; at desk scale the MAE sits far below L_nz * amax / M
        from pnce.channel import tap_power_cap

        cfg = small_config(snr_db=(math.inf,), iterations=3, l_nz=(16,))
        rows = run_snr_sweep(cfg)
        amax = math.sqrt(tap_power_cap(cfg.n_t, 16))
        assert rows[0].mae <= 16 * amax / 511


class TestRunTapSweep:
    def test_rows_sorted_by_lnz_then_snr(self):
        rows = run_tap_sweep(small_config(l_nz=(1, 16), snr_db=(0.0, 10.0)))
        keys = [(r.l_nz, r.snr_db) for r in rows]
        assert keys == sorted(keys)

    def test_lnz_grid_produces_curves(self):
        rows = run_tap_sweep(small_config(l_nz=(1, 4, 16, 64), snr_db=(10.0,)))
        assert sorted({r.l_nz for r in rows}) == [1, 4, 16, 64]

    def test_boundary_lnz_equals_l(self):
        rows = run_tap_sweep(small_config(l_nz=(64,), snr_db=(10.0,)))
        assert rows[0].l_nz == rows[0].l == 64


class TestRunLatencyBench:
    def test_counters_and_stats(self):
        cfg = small_config(n_t=4, n_r=4, n_batch=(1, 2), snr_db=(10.0,))
        report = run_latency_bench(cfg, reps=3, warmup=1)
        assert len(report.points) == 2
        for p in report.points:
            assert p.reps == 3
            assert p.median_s > 0
            assert p.samples_moved == p.n_r * (p.c + p.m) * math.ceil(p.n_t / p.n_batch)
            assert p.macs == p.n_r * p.n_t * p.l * p.m

    def test_samples_moved_scales_inversely_with_batching(self):
        cfg = small_config(n_t=4, n_r=2, n_batch=(1, 2, 4), snr_db=(10.0,))
        report = run_latency_bench(cfg, reps=2, warmup=0)
        moved = {p.n_batch: p.samples_moved for p in report.points}
        p_len = 64 + 511
        for nb, sm in moved.items():
            assert sm == 2 * p_len * 4 // nb

    def test_bench_rows_schema(self):
        cfg = small_config(n_batch=(1,), snr_db=(10.0,))
        report = run_latency_bench(cfg, reps=2, warmup=0)
        rows = bench_rows(report)
        assert rows[0].experiment == "latency_bench"
        assert rows[0].mae == 0.0
        assert rows[0].latency_s > 0

    def test_rejects_zero_reps(self):
        with pytest.raises(InvalidConfigError):
            run_latency_bench(small_config(), reps=0)


class TestBatchingConsistency:
    def test_mae_ratio_across_batching_bounded(self):
        # multiplexing shifts the MAE but the spread stays within a factor
        # of two where noise participates (at very high SNR the cross-TX
        # sidelobe sum alone sits right at the factor-4 variance ratio)
        maes = {}
        for nb in (1, 2, 4):
            cfg = small_config(
                n_t=8, n_r=8, l_nz=(64,), n_batch=(nb,),
                snr_db=(0.0, 10.0), iterations=12,
            )
            for r in run_snr_sweep(cfg):
                maes[(nb, r.snr_db)] = r.mae
        for snr in (0.0, 10.0):
            vals = [maes[(nb, snr)] for nb in (1, 2, 4)]
            assert max(vals) / min(vals) <= 2.0


class TestBackendsInSweep:
    def test_tensor16_sweep_runs(self):
        cfg = small_config(
            backend=BackendConfig(kind="tensor16"),
            snr_db=(10.0,),
            iterations=2,
        )
        rows = run_snr_sweep(cfg)
        assert rows[0].backend == "tensor16"
        assert rows[0].saturations == 0
        assert rows[0].mae > 0

    def test_thread_env_consistency(self, monkeypatch):
        cfg = small_config(snr_db=(5.0,), iterations=4)
        serial = run_snr_sweep(cfg)
        monkeypatch.setenv("PNCE_THREADS", "4")
        threaded = run_snr_sweep(cfg)
        assert [r.mae for r in serial] == [r.mae for r in threaded]

    def test_bad_thread_env(self, monkeypatch):
        monkeypatch.setenv("PNCE_THREADS", "zero")
        with pytest.raises(InvalidConfigError):
            run_snr_sweep(small_config(snr_db=(5.0,)))
