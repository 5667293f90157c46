"""Circulant-correlation channel estimation with interchangeable backends.

The estimator multiplies the first L rows (or the batched shift windows) of
the PN circulant against the CP-stripped received body and scales by 1/M.
Backends: reference64 (float64), reference32 (float32), and tensor16 (the
emulated half-precision tiled MMA from :mod:`pnce.halfprec`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    FrameTooShortError,
    PlanMismatchError,
    RowsOutOfRangeError,
)
from .halfprec import BackendConfig, REFERENCE64, mma_correlate
from .pilots import BatchAssignment, cyclic_separation
from .pn import PnSequence


@dataclass(frozen=True, eq=False)
class CirEstimate:
    """Estimated CIRs: taps[r, t] is the length-L estimate for pair (r, t).

    ``norm`` records the 1/M normalization already applied by the correlator.
    """

    taps: np.ndarray  # (n_r, n_t, l) complex128
    backend: str
    norm: float
    saturations: int = 0


def remove_cp(samples: np.ndarray, c: int, m: int) -> np.ndarray:
    """Drop the cyclic prefix: keep samples C..C+M-1 (last axis)."""
    samples = np.asarray(samples)
    if samples.shape[-1] < c + m:
        raise FrameTooShortError(
            f"frame has {samples.shape[-1]} samples, need at least C+M={c + m}"
        )
    return samples[..., c : c + m]


def build_partial_circulant(seq: PnSequence, rows: int) -> np.ndarray:
    """First ``rows`` rows of the PN correlation circulant.

    Row i is the sequence cyclically delayed by i, so row i dotted with a
    received body picks out correlation lag i.  Entries are +-1.
    """
    m = seq.m
    if not 1 <= rows <= m:
        raise RowsOutOfRangeError(f"rows {rows} outside [1, {m}]")
    return _lag_rows(seq, np.arange(rows))


def _lag_rows(seq: PnSequence, lags: np.ndarray) -> np.ndarray:
    m = seq.m
    idx = (np.arange(m)[None, :] - np.asarray(lags)[:, None]) % m
    return seq.chips[idx]


def correlate_rows(
    rows: np.ndarray, y: np.ndarray, backend: BackendConfig, norm_len: int
) -> np.ndarray:
    """Dispatch (rows, M) x (M,) or (M, cols) correlation to a backend, scaled by 1/norm_len.

    The row matrix is real, so all backends run the real and imaginary
    parts of ``y`` as two real matrix products.
    """
    y = np.asarray(y)
    if backend.kind == "reference64":
        re = rows @ np.ascontiguousarray(y.real)
        im = rows @ np.ascontiguousarray(y.imag)
        return (re + 1j * im) / norm_len
    if backend.kind == "reference32":
        rows32 = rows.astype(np.float32)
        re = rows32 @ y.real.astype(np.float32) / np.float32(norm_len)
        im = rows32 @ y.imag.astype(np.float32) / np.float32(norm_len)
        return re.astype(np.float64) + 1j * im.astype(np.float64)
    return mma_correlate(rows, y, backend, norm_len=norm_len)


def estimate_sequential(
    y: np.ndarray,
    seq: PnSequence,
    l: int,
    backend: BackendConfig = REFERENCE64,
) -> np.ndarray:
    """Correlation estimate of the first L CIR lags from one received body."""
    y = np.asarray(y, dtype=np.complex128)
    if y.shape[-1] != seq.m:
        raise DimensionMismatchError(f"received body has {y.shape[-1]} samples, expected M={seq.m}")
    rows = build_partial_circulant(seq, l)
    return correlate_rows(rows, y, backend, norm_len=seq.m)


def validate_batch_separation(batch: Sequence[BatchAssignment], m: int, l: int) -> None:
    shifts = [a.shift for a in batch]
    for i in range(len(shifts)):
        for j in range(i + 1, len(shifts)):
            sep = cyclic_separation(shifts[i], shifts[j], m)
            if sep < l:
                raise PlanMismatchError(
                    f"shifts {shifts[i]} and {shifts[j]} separated by {sep} < L={l}"
                )


def batched_lag_rows(seq: PnSequence, batch: Sequence[BatchAssignment], l: int) -> np.ndarray:
    """Stacked correlation rows for every transmitter's lag window [shift, shift+L)."""
    lags = np.concatenate([(a.shift + np.arange(l)) % seq.m for a in batch])
    return _lag_rows(seq, lags)


def estimate_batched(
    y: np.ndarray,
    seq: PnSequence,
    batch: Sequence[BatchAssignment],
    l: int,
    backend: BackendConfig = REFERENCE64,
) -> dict[int, np.ndarray]:
    """De-multiplexed CIR estimates for every transmitter of one batch.

    Computes the full correlation at each transmitter's shift offset and
    slices out the lag window [shift_t, shift_t + L).
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.shape[-1] != seq.m:
        raise DimensionMismatchError(f"received body has {y.shape[-1]} samples, expected M={seq.m}")
    if not batch:
        raise PlanMismatchError("empty batch")
    validate_batch_separation(batch, seq.m, l)
    rows = batched_lag_rows(seq, batch, l)
    flat = correlate_rows(rows, y, backend, norm_len=seq.m)
    return {a.transmitter: flat[i * l : (i + 1) * l] for i, a in enumerate(batch)}
