"""Software emulation of half-precision tiled matrix-multiply-accumulate.

Mirrors the arithmetic of 4x4 Tensor-Core fragments: both operands are
rounded to IEEE 754 binary16, products are formed exactly, and partial sums
are kept at a configurable accumulator precision.  The contraction axis is
split into chunks of ``chunk_len`` samples; each chunk's partial sum is
scaled by the 1/M correlation normalization before entering a binary32
running total, which is the early-saturation mitigation: normalizing after
partial multiplication instead of after the complete product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, SaturationDetectedError

TILE = 4

BINARY16_MAX = 65504.0

_KINDS = ("reference64", "reference32", "tensor16")
_ACCUMULATORS = ("binary32", "binary16")


@dataclass(frozen=True)
class BackendConfig:
    """Correlator backend selection.

    kind: reference64 | reference32 | tensor16.  ``chunk_len`` is the number
    of contraction samples per partially-normalized chunk (None means one
    chunk spanning the whole padded axis, i.e. no chunked normalization);
    ``accumulator`` selects the within-chunk partial-sum precision for the
    tensor16 emulation.
    """

    kind: str = "reference64"
    tile: int = TILE
    chunk_len: int | None = 256
    accumulator: str = "binary32"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidConfigError(f"unknown backend kind {self.kind!r}")
        if self.accumulator not in _ACCUMULATORS:
            raise InvalidConfigError(f"unknown accumulator {self.accumulator!r}")
        if self.tile != TILE:
            raise InvalidConfigError(f"tile size is fixed at {TILE}")
        if self.chunk_len is not None:
            if self.chunk_len < self.tile or self.chunk_len % self.tile != 0:
                raise InvalidConfigError(
                    f"chunk_len must be a positive multiple of {self.tile}, got {self.chunk_len}"
                )


REFERENCE64 = BackendConfig(kind="reference64")
REFERENCE32 = BackendConfig(kind="reference32")
TENSOR16 = BackendConfig(kind="tensor16")


def quantize_binary16(x: float) -> float:
    """Nearest IEEE 754 binary16 value under round-to-nearest-even, widened.

    Values beyond the binary16 finite range map to signed infinity, which
    downstream chunk checks report as saturation.
    """
    with np.errstate(over="ignore"):
        return float(np.float16(x))


def _to_half(a: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return a.astype(np.float16)


def _pad_to_tile(n: int) -> int:
    return -(-n // TILE) * TILE


def _chunk_edges(padded: int, chunk_len: int | None) -> list[tuple[int, int]]:
    if chunk_len is None:
        return [(0, padded)]
    edges = []
    start = 0
    while start < padded:
        edges.append((start, min(start + chunk_len, padded)))
        start = edges[-1][1]
    return edges


def _mma_real(a16: np.ndarray, x16: np.ndarray, backend: BackendConfig, norm_len: int) -> np.ndarray:
    """Emulated GEMM of a binary16 (rows, K) matrix with a (K, cols) matrix.

    Inputs are already padded to tile multiples.  Returns float64 (rows, cols).
    """
    a64 = a16.astype(np.float64)
    x64 = x16.astype(np.float64)
    rows, k = a64.shape
    cols = x64.shape[1]
    scale = np.float32(1.0 / norm_len)
    total = np.zeros((rows, cols), dtype=np.float32)
    for lo, hi in _chunk_edges(k, backend.chunk_len):
        if backend.accumulator == "binary32":
            # Products of binary16 values are exact well inside float64, and
            # for +-1 pilot rows the whole chunk dot is exact, so a single
            # rounding to binary32 stands in for the fp32-accumulate fragment
            # independent of tile scheduling.
            acc = (a64[:, lo:hi] @ x64[lo:hi]).astype(np.float32)
        else:
            acc16 = np.zeros((rows, cols), dtype=np.float16)
            for s in range(lo, hi, TILE):
                step = a64[:, s : s + TILE] @ x64[s : s + TILE]
                with np.errstate(over="ignore", invalid="ignore"):
                    acc16 = (acc16.astype(np.float64) + step).astype(np.float16)
            acc = acc16.astype(np.float32)
        if not np.isfinite(acc).all():
            raise SaturationDetectedError(
                f"non-finite {backend.accumulator} partial in chunk [{lo}, {hi})"
            )
        total = total + acc * scale
    if not np.isfinite(total).all():
        raise SaturationDetectedError("non-finite binary32 running total")
    return total.astype(np.float64)


def mma_correlate(a: np.ndarray, y: np.ndarray, backend: BackendConfig, norm_len: int) -> np.ndarray:
    """Half-precision emulated (rows, M) x (M, cols) correlation, scaled by 1/norm_len.

    The real matrix multiplies the real and imaginary parts of ``y`` as two
    real GEMMs.  Rows and the contraction axis are zero-padded to multiples
    of the 4-wide tile, which provably leaves results unchanged.
    """
    if backend.kind != "tensor16":
        raise InvalidConfigError(f"mma_correlate requires the tensor16 backend, got {backend.kind}")
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    y = np.asarray(y, dtype=np.complex128)
    squeeze = y.ndim == 1
    y2 = y[:, None] if squeeze else y
    rows, m = a.shape
    if y2.shape[0] != m:
        raise InvalidConfigError(f"operand lengths differ: A has {m} columns, y has {y2.shape[0]}")
    kp = _pad_to_tile(m)
    if backend.chunk_len is not None and backend.chunk_len > kp:
        raise InvalidConfigError(f"chunk_len {backend.chunk_len} exceeds padded length {kp}")
    rp = _pad_to_tile(rows)

    a16 = np.zeros((rp, kp), dtype=np.float16)
    a16[:rows, :m] = _to_half(a)
    re16 = np.zeros((kp, y2.shape[1]), dtype=np.float16)
    im16 = np.zeros_like(re16)
    re16[:m] = _to_half(y2.real)
    im16[:m] = _to_half(y2.imag)

    out = (
        _mma_real(a16, re16, backend, norm_len)
        + 1j * _mma_real(a16, im16, backend, norm_len)
    )[:rows]
    return out[:, 0] if squeeze else out


def tiled_mma_gemm(a: np.ndarray, y: np.ndarray, backend: BackendConfig) -> np.ndarray:
    """Correlate a real (rows, M) matrix against a length-M complex vector.

    Convenience wrapper over :func:`mma_correlate` with the 1/M scaling
    taken from the unpadded contraction length.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    return mma_correlate(a, y, backend, norm_len=a.shape[1])
