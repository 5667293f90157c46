"""Tests for pilot frame construction, batching, and overhead arithmetic."""

import numpy as np
import pytest

from pnce.errors import InvalidConfigError
from pnce.pilots import (
    PilotConfig,
    build_batch_plan,
    build_pilot,
    cyclic_separation,
    max_batch,
    propagation_time,
    shift_for_transmitter,
)
from pnce.pn import circular_shift, default_spec, generate_mseq


@pytest.fixture(scope="module")
def seq511():
    return generate_mseq(default_spec(9))


def cfg(m=511, c=64, n_t=16, n_batch=1, l=64, f_s=10e6):
    return PilotConfig(m=m, c=c, n_t=n_t, n_batch=n_batch, l=l, f_s=f_s)


class TestMaxBatch:
    @pytest.mark.parametrize("m,c,expected", [(2047, 128, 15), (511, 64, 7), (511, 511, 1)])
    def test_values(self, m, c, expected):
        assert max_batch(m, c) == expected

    def test_invalid(self):
        with pytest.raises(InvalidConfigError):
            max_batch(511, 0)
        with pytest.raises(InvalidConfigError):
            max_batch(511, 512)


class TestPilotConfig:
    def test_rejects_cp_shorter_than_cir(self):
        with pytest.raises(InvalidConfigError):
            cfg(c=32, l=64)

    def test_rejects_oversized_batch(self):
        with pytest.raises(InvalidConfigError):
            cfg(m=511, c=64, n_batch=16)  # floor(511/64) = 7

    def test_p_is_c_plus_m(self):
        assert cfg().p == 575


class TestShiftForTransmitter:
    def test_eq8_with_floor(self):
        c4 = cfg(m=2047, c=128, n_batch=4)
        assert shift_for_transmitter(5, c4) == 511  # floor(2047/4) * (5 mod 4)
        assert shift_for_transmitter(0, c4) == 0

    def test_m511_nbatch2(self):
        c2 = cfg(m=511, c=64, n_batch=2)
        assert shift_for_transmitter(3, c2) == 255

    def test_out_of_range_transmitter(self):
        with pytest.raises(InvalidConfigError):
            shift_for_transmitter(16, cfg())


class TestBuildPilot:
    def test_cp_is_copy_of_tail(self, seq511):
        small = generate_mseq(default_spec(3))  # M = 7
        frame = build_pilot(small, shift=0, c=3)
        assert len(frame) == 10
        np.testing.assert_array_equal(frame.samples[:3], frame.samples[-3:])

    def test_body_is_shifted_sequence(self, seq511):
        frame = build_pilot(seq511, shift=255, c=64)
        assert frame.shift == 255
        np.testing.assert_array_equal(frame.samples[:64], frame.samples[-64:])
        np.testing.assert_array_equal(frame.samples[64:], circular_shift(seq511, 255).chips)

    def test_shift_at_m_rejected(self, seq511):
        from pnce.errors import ShiftOutOfRangeError

        with pytest.raises(ShiftOutOfRangeError):
            build_pilot(seq511, shift=511, c=64)

    def test_cp_removal_recovers_body(self, seq511):
        for shift in (0, 17, 510):
            frame = build_pilot(seq511, shift=shift, c=64)
            np.testing.assert_array_equal(
                frame.samples[64:], circular_shift(seq511, shift).chips
            )


class TestBuildBatchPlan:
    def test_sequential_degenerate(self):
        plan = build_batch_plan(cfg(n_t=16, n_batch=1))
        assert plan.n_batches == 16
        assert all(len(b) == 1 and b[0].shift == 0 for b in plan.batches)

    def test_four_by_four(self):
        plan = build_batch_plan(cfg(m=2047, c=128, n_t=16, n_batch=4))
        assert plan.n_batches == 4
        for batch in plan.batches:
            assert sorted(a.shift for a in batch) == [0, 511, 1022, 1533]
            shifts = [a.shift for a in batch]
            for i in range(len(shifts)):
                for j in range(i + 1, len(shifts)):
                    assert cyclic_separation(shifts[i], shifts[j], 2047) >= 128

    def test_every_transmitter_exactly_once(self):
        plan = build_batch_plan(cfg(m=2047, c=128, n_t=14, n_batch=4))
        seen = [a.transmitter for batch in plan.batches for a in batch]
        assert sorted(seen) == list(range(14))
        assert len(plan.batches[-1]) == 2  # 14 = 3*4 + 2

    def test_overfull_batch_rejected(self):
        with pytest.raises(InvalidConfigError):
            build_batch_plan(cfg(m=511, c=64, n_t=16, n_batch=16))

    @pytest.mark.parametrize("m,c,l", [(511, 64, 64), (1023, 128, 100), (2047, 128, 128)])
    def test_separation_property(self, m, c, l):
        # every admissible n_batch keeps pairwise cyclic separation >= L
        for n_batch in range(1, max_batch(m, c) + 1):
            plan = build_batch_plan(cfg(m=m, c=c, l=l, n_t=2 * n_batch, n_batch=n_batch))
            for batch in plan.batches:
                shifts = [a.shift for a in batch]
                for i in range(len(shifts)):
                    for j in range(i + 1, len(shifts)):
                        assert cyclic_separation(shifts[i], shifts[j], m) >= l


class TestPropagationTime:
    def test_sequential_16tx(self):
        assert propagation_time(cfg(m=511, c=64, n_t=16, n_batch=1)) == pytest.approx(0.92e-3)

    def test_batched_reduction(self):
        t1 = propagation_time(cfg(m=511, c=64, n_t=16, n_batch=1))
        t4 = propagation_time(cfg(m=511, c=64, n_t=16, n_batch=4))
        assert t4 == t1 / 4  # exact: dividing by a power of two

    def test_unit_case(self):
        one = PilotConfig(m=511, c=64, n_t=1, n_batch=1, l=64, f_s=575.0)
        assert propagation_time(one) == 1.0

    @pytest.mark.parametrize("n_batch", [1, 2, 4])
    def test_reduction_is_exact_for_every_config(self, n_batch):
        base = cfg(m=2047, c=128, n_t=16, n_batch=1)
        batched = cfg(m=2047, c=128, n_t=16, n_batch=n_batch)
        assert propagation_time(batched) == propagation_time(base) / n_batch
