"""Tests for m-sequence generation and circular-sequence utilities."""

import numpy as np
import pytest

from pnce.errors import (
    InvalidSpecError,
    LagOutOfRangeError,
    NotMaximalLengthError,
    ShiftOutOfRangeError,
    ZeroStateError,
)
from pnce.pn import (
    LfsrSpec,
    PnSequence,
    circular_autocorrelation,
    circular_shift,
    default_spec,
    generate_mseq,
)


class TestLfsrSpec:
    def test_zero_state_rejected(self):
        with pytest.raises(ZeroStateError):
            LfsrSpec(degree=9, taps=(9, 5), state=0)

    def test_taps_must_include_degree(self):
        with pytest.raises(InvalidSpecError):
            LfsrSpec(degree=9, taps=(5, 3), state=1)

    def test_taps_out_of_range(self):
        with pytest.raises(InvalidSpecError):
            LfsrSpec(degree=9, taps=(10, 9), state=1)

    def test_degree_too_small(self):
        with pytest.raises(InvalidSpecError):
            LfsrSpec(degree=1, taps=(1,), state=1)

    def test_state_too_wide(self):
        with pytest.raises(InvalidSpecError):
            LfsrSpec(degree=3, taps=(3, 2), state=8)

    def test_unknown_degree_has_no_default(self):
        with pytest.raises(InvalidSpecError):
            default_spec(23)


class TestGenerateMseq:
    def test_table_i_lengths(self):
        # the three study pilot lengths
        for degree, m in [(9, 511), (10, 1023), (11, 2047)]:
            seq = generate_mseq(default_spec(degree))
            assert seq.m == m
            assert set(np.unique(seq.chips)) == {-1.0, 1.0}

    def test_degree9_taps_9_5_gives_511(self):
        seq = generate_mseq(LfsrSpec(degree=9, taps=(9, 5), state=1))
        assert seq.m == 511

    def test_non_primitive_polynomial_rejected(self):
        # x^9 + x + 1 has period 73, not 511
        with pytest.raises(NotMaximalLengthError):
            generate_mseq(LfsrSpec(degree=9, taps=(9, 1), state=1))

    def test_degree2_sequence_and_autocorrelation(self):
        # hand enumeration of the 3-state LFSR: states 1 -> 2 -> 3 -> 1,
        # output bits (MSB) 0, 1, 1 -> chips +1, -1, -1
        seq = generate_mseq(LfsrSpec(degree=2, taps=(2, 1), state=1))
        assert seq.m == 3
        np.testing.assert_array_equal(seq.chips, [1.0, -1.0, -1.0])
        r = [circular_autocorrelation(seq, n) for n in range(3)]
        np.testing.assert_allclose(r, [1.0, -1 / 3, -1 / 3], atol=1e-15)

    def test_deterministic(self):
        a = generate_mseq(default_spec(9))
        b = generate_mseq(default_spec(9))
        np.testing.assert_array_equal(a.chips, b.chips)

    @pytest.mark.parametrize("degree", [9, 10, 11])
    def test_balance(self, degree):
        seq = generate_mseq(default_spec(degree))
        pos = int((seq.chips > 0).sum())
        neg = int((seq.chips < 0).sum())
        assert abs(pos - neg) == 1

    @pytest.mark.parametrize("degree", [2, 3, 5, 9])
    def test_period_rerun_reproduces_sequence_twice(self, degree):
        spec = default_spec(degree)
        seq = generate_mseq(spec)
        # run the same register 2M steps by concatenating two generations
        k, mask = spec.degree, (1 << spec.degree) - 1
        tap_mask = 0
        for t in spec.taps:
            tap_mask |= 1 << (t - 1)
        state = spec.state
        bits = []
        for _ in range(2 * seq.m):
            bits.append((state >> (k - 1)) & 1)
            fb = (state & tap_mask).bit_count() & 1
            state = ((state << 1) | fb) & mask
        chips = 1.0 - 2.0 * np.array(bits)
        np.testing.assert_array_equal(chips[: seq.m], seq.chips)
        np.testing.assert_array_equal(chips[seq.m :], seq.chips)


class TestCircularAutocorrelation:
    @pytest.mark.parametrize("degree", [9, 10, 11])
    def test_two_valued_everywhere(self, degree):
        seq = generate_mseq(default_spec(degree))
        m = seq.m
        assert circular_autocorrelation(seq, 0) == 1.0
        spot = np.array([circular_autocorrelation(seq, n) for n in (1, 17, m // 2, m - 1)])
        np.testing.assert_allclose(spot, -1.0 / m, atol=1e-12, rtol=0)

    def test_lag_out_of_range(self):
        seq = generate_mseq(default_spec(9))
        with pytest.raises(LagOutOfRangeError):
            circular_autocorrelation(seq, 511)
        with pytest.raises(LagOutOfRangeError):
            circular_autocorrelation(seq, -1)

    def test_constant_sequence(self):
        seq = PnSequence(chips=np.ones(3))
        assert circular_autocorrelation(seq, 1) == 1.0


class TestCircularShift:
    def test_identity(self):
        seq = generate_mseq(default_spec(9))
        np.testing.assert_array_equal(circular_shift(seq, 0).chips, seq.chips)

    def test_shift_out_of_range(self):
        seq = generate_mseq(default_spec(9))
        with pytest.raises(ShiftOutOfRangeError):
            circular_shift(seq, 511)
        with pytest.raises(ShiftOutOfRangeError):
            circular_shift(seq, -3)

    def test_composition_adds_mod_m(self):
        seq = generate_mseq(default_spec(9))
        rng = np.random.default_rng(7)
        for _ in range(20):
            a, b = rng.integers(0, seq.m, size=2)
            lhs = circular_shift(circular_shift(seq, int(a)), int(b))
            rhs = circular_shift(seq, int((a + b) % seq.m))
            np.testing.assert_array_equal(lhs.chips, rhs.chips)

    def test_delay_semantics(self):
        seq = generate_mseq(default_spec(3))
        shifted = circular_shift(seq, 2)
        m = seq.m
        for i in range(m):
            assert shifted.chips[i] == seq.chips[(i - 2) % m]
