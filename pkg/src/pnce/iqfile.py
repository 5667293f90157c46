"""Versioned binary IQ frame files.

Layout (all integers little-endian):

    magic   4 bytes  b"PNCE"
    version u16      1
    n_t, n_r, p, l, m, c, n_batch, frame_count   u32 each
    seed    u64
    payload frame_count frames; each frame is n_r receivers of
            (p + l - 1) samples, receiver-major, every sample an
            interleaved float32 (I, Q) pair.

Samples are stored at float32 precision; writing is lossy for wider inputs
and reading widens back to complex128, so file-level round trips are
byte-exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadMagicError, InvalidConfigError, TruncatedFileError, VersionMismatchError
from .channel import ReceivedFrame

MAGIC = b"PNCE"
VERSION = 1
_HEADER = struct.Struct("<4sH8IQ")


@dataclass(frozen=True)
class IqFileHeader:
    n_t: int
    n_r: int
    p: int
    l: int
    m: int
    c: int
    n_batch: int
    frame_count: int
    seed: int
    version: int = VERSION

    def __post_init__(self):
        if self.p != self.c + self.m:
            raise InvalidConfigError(f"P={self.p} must equal C+M={self.c + self.m}")
        if self.version != VERSION:
            raise VersionMismatchError(f"unsupported version {self.version}")

    @property
    def samples_per_receiver(self) -> int:
        return self.p + self.l - 1

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC,
            self.version,
            self.n_t,
            self.n_r,
            self.p,
            self.l,
            self.m,
            self.c,
            self.n_batch,
            self.frame_count,
            self.seed,
        )


def write_iq_bytes(header: IqFileHeader, frames: Sequence[ReceivedFrame]) -> bytes:
    """Serialize frames to the IQ byte layout."""
    if len(frames) != header.frame_count:
        raise InvalidConfigError(
            f"header declares {header.frame_count} frames, got {len(frames)}"
        )
    chunks = [header.pack()]
    for frame in frames:
        if frame.samples.shape != (header.n_r, header.samples_per_receiver):
            raise InvalidConfigError(
                f"frame shape {frame.samples.shape} != "
                f"({header.n_r}, {header.samples_per_receiver})"
            )
        iq = np.empty((header.n_r, header.samples_per_receiver, 2), dtype="<f4")
        iq[..., 0] = frame.samples.real.astype(np.float32)
        iq[..., 1] = frame.samples.imag.astype(np.float32)
        chunks.append(iq.tobytes())
    return b"".join(chunks)


def read_iq_bytes(raw: bytes) -> tuple[IqFileHeader, list[ReceivedFrame]]:
    """Parse the IQ byte layout back into frames (widened to complex128)."""
    if len(raw) < _HEADER.size:
        raise TruncatedFileError(
            f"file ends at byte {len(raw)}, header needs {_HEADER.size} bytes"
        )
    magic, version, n_t, n_r, p, l, m, c, n_batch, frame_count, seed = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}")
    header = IqFileHeader(
        n_t=n_t, n_r=n_r, p=p, l=l, m=m, c=c,
        n_batch=n_batch, frame_count=frame_count, seed=seed,
    )
    frame_bytes = header.n_r * header.samples_per_receiver * 8
    frames = []
    offset = _HEADER.size
    for bi in range(frame_count):
        end = offset + frame_bytes
        if len(raw) < end:
            raise TruncatedFileError(
                f"file ends at byte {len(raw)}, frame {bi} needs bytes [{offset}, {end})"
            )
        iq = np.frombuffer(raw, dtype="<f4", count=frame_bytes // 4, offset=offset)
        iq = iq.reshape(header.n_r, header.samples_per_receiver, 2)
        samples = iq[..., 0].astype(np.float64) + 1j * iq[..., 1].astype(np.float64)
        frames.append(ReceivedFrame(samples=samples, batch_index=bi))
        offset = end
    return header, frames


def write_iq(path, header: IqFileHeader, frames: Sequence[ReceivedFrame]) -> None:
    with open(path, "wb") as fh:
        fh.write(write_iq_bytes(header, frames))


def read_iq(path) -> tuple[IqFileHeader, list[ReceivedFrame]]:
    with open(path, "rb") as fh:
        return read_iq_bytes(fh.read())
