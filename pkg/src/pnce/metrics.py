"""Error metrics and the independent frequency-domain correlation oracle."""

from __future__ import annotations

import numpy as np

from .channel import ChannelRealization
from .errors import DimensionMismatchError, LengthMismatchError
from .estimator import CirEstimate
from .pn import PnSequence


def _as_taps(x) -> np.ndarray:
    if isinstance(x, (ChannelRealization, CirEstimate)):
        return x.taps
    return np.asarray(x)


def mae(truth, est) -> float:
    """Mean absolute tap error: average of |est - truth| over lags and antenna pairs."""
    t = _as_taps(truth)
    e = _as_taps(est)
    if t.shape != e.shape:
        raise DimensionMismatchError(f"shape mismatch: truth {t.shape} vs estimate {e.shape}")
    return float(np.mean(np.abs(e - t)))


def oracle_circular_correlate(y: np.ndarray, seq: PnSequence) -> np.ndarray:
    """Full-length circular correlation via the DFT, scaled by 1/M.

    Computes (1/M) * IDFT(conj(DFT(s)) * DFT(y)), whose lag-d output equals
    row d of the partial circulant dotted with y.  Serves as the independent
    oracle for the matrix-multiply estimator path.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.shape[-1] != seq.m:
        raise LengthMismatchError(f"y has {y.shape[-1]} samples, sequence has {seq.m}")
    spectrum = np.conj(np.fft.fft(seq.chips)) * np.fft.fft(y)
    return np.fft.ifft(spectrum) / seq.m
