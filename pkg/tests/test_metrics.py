"""Tests for the MAE metric and the frequency-domain oracle."""

import numpy as np
import pytest

from pnce.errors import DimensionMismatchError, LengthMismatchError
from pnce.metrics import mae, oracle_circular_correlate
from pnce.pn import default_spec, generate_mseq


@pytest.fixture(scope="module")
def seq511():
    return generate_mseq(default_spec(9))


class TestMae:
    def test_identity_is_zero(self):
        rng = np.random.default_rng(1)
        taps = rng.standard_normal((2, 3, 8)) + 1j * rng.standard_normal((2, 3, 8))
        assert mae(taps, taps) == 0.0

    def test_constant_offset(self):
        truth = np.zeros((1, 1, 4), dtype=complex)
        est = np.full((1, 1, 4), 0.3 - 0.4j)  # magnitude 0.5 everywhere
        assert mae(truth, est) == pytest.approx(0.5)

    def test_hand_sum(self):
        truth = np.array([[[1.0 + 0j, 0.0 + 0j]]])
        est = np.array([[[1.0 + 0j, 0.5j]]])
        assert mae(truth, est) == pytest.approx(0.25)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            mae(np.zeros((1, 1, 4)), np.zeros((1, 1, 5)))


class TestOracle:
    def test_own_sequence(self, seq511):
        corr = oracle_circular_correlate(seq511.chips.astype(complex), seq511)
        np.testing.assert_allclose(corr.real[0], 1.0, atol=1e-12)
        np.testing.assert_allclose(corr.real[1:], -1 / 511, atol=1e-12)
        np.testing.assert_allclose(corr.imag, 0.0, atol=1e-12)

    def test_zeros(self, seq511):
        corr = oracle_circular_correlate(np.zeros(511, dtype=complex), seq511)
        np.testing.assert_array_equal(corr, np.zeros(511, dtype=complex))

    def test_length_mismatch(self, seq511):
        with pytest.raises(LengthMismatchError):
            oracle_circular_correlate(np.zeros(512, dtype=complex), seq511)

    def test_lag_convention_matches_circulant(self, seq511):
        # a body delayed by d must peak at lag d under both routes
        d = 37
        y = np.roll(seq511.chips, d).astype(complex)
        corr = oracle_circular_correlate(y, seq511)
        assert int(np.argmax(corr.real)) == d
