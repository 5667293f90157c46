"""Cyclic-prefixed pilot frames, batching bounds, and pilot overhead."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidConfigError
from .pn import PnSequence, circular_shift


@dataclass(frozen=True)
class PilotConfig:
    """Pilot transmission parameters.

    m: PN sequence length (samples); c: cyclic-prefix length; n_t: transmit
    antennas; n_batch: transmitters multiplexed per batch; l: maximum CIR
    length; f_s: sampling rate in samples/second.
    """

    m: int
    c: int
    n_t: int
    n_batch: int
    l: int
    f_s: float

    def __post_init__(self):
        if self.n_t < 1:
            raise InvalidConfigError(f"n_t must be >= 1, got {self.n_t}")
        if self.f_s <= 0:
            raise InvalidConfigError(f"f_s must be positive, got {self.f_s}")
        if not 1 <= self.l <= self.c <= self.m:
            raise InvalidConfigError(
                f"need 1 <= L <= C <= M to absorb ISI, got L={self.l} C={self.c} M={self.m}"
            )
        if not 1 <= self.n_batch <= max_batch(self.m, self.c):
            raise InvalidConfigError(
                f"n_batch={self.n_batch} outside [1, floor(M/C)={max_batch(self.m, self.c)}]"
            )

    @property
    def p(self) -> int:
        """Pilot frame length C + M."""
        return self.c + self.m


@dataclass(frozen=True, eq=False)
class PilotFrame:
    """One transmitter's C + M sample pilot: cyclic prefix plus shifted PN body."""

    samples: np.ndarray
    transmitter: int
    shift: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.shape[0]


class BatchAssignment(NamedTuple):
    transmitter: int
    shift: int


@dataclass(frozen=True)
class BatchPlan:
    """Assignment of transmitters to simultaneous-transmission batches."""

    batches: tuple[tuple[BatchAssignment, ...], ...]
    m: int
    l: int

    @property
    def n_batches(self) -> int:
        return len(self.batches)


def max_batch(m: int, c: int) -> int:
    """Largest number of transmitters that can share one pilot frame: floor(M/C)."""
    if c < 1 or c > m:
        raise InvalidConfigError(f"need 1 <= C <= M, got C={c} M={m}")
    return m // c


def shift_for_transmitter(t: int, cfg: PilotConfig) -> int:
    """Circular shift floor(M / N_batch) * (t mod N_batch) for transmitter t.

    The quotient is floored so shifts stay integral; flooring preserves the
    >= L pairwise separation whenever n_batch <= floor(M/C) and C >= L.
    """
    if not 0 <= t < cfg.n_t:
        raise InvalidConfigError(f"transmitter {t} outside [0, {cfg.n_t})")
    return (cfg.m // cfg.n_batch) * (t % cfg.n_batch)


def build_pilot(seq: PnSequence, shift: int, c: int, transmitter: int = 0) -> PilotFrame:
    """Shift the PN body and prepend its last C samples as the cyclic prefix."""
    m = seq.m
    if not 1 <= c <= m:
        raise InvalidConfigError(f"need 1 <= C <= M, got C={c} M={m}")
    body = circular_shift(seq, shift).chips
    samples = np.concatenate([body[-c:], body])
    return PilotFrame(samples=samples, transmitter=transmitter, shift=shift)


def cyclic_separation(a: int, b: int, m: int) -> int:
    """Minimum distance between two shifts on the length-m circle."""
    d = abs(a - b) % m
    return min(d, m - d)


def build_batch_plan(cfg: PilotConfig) -> BatchPlan:
    """Assign transmitters 0..N_t-1 to ceil(N_t / N_batch) batches in index order.

    Consecutive transmitters share a batch so the within-batch shifts
    floor(M/N_batch) * (t mod N_batch) are distinct; the final batch is
    smaller when N_t is not divisible by N_batch.
    """
    batches = []
    for start in range(0, cfg.n_t, cfg.n_batch):
        batch = tuple(
            BatchAssignment(t, shift_for_transmitter(t, cfg))
            for t in range(start, min(start + cfg.n_batch, cfg.n_t))
        )
        batches.append(batch)
    plan = BatchPlan(batches=tuple(batches), m=cfg.m, l=cfg.l)
    for batch in plan.batches:
        shifts = [a.shift for a in batch]
        for i in range(len(shifts)):
            for j in range(i + 1, len(shifts)):
                sep = cyclic_separation(shifts[i], shifts[j], cfg.m)
                if sep < cfg.l:
                    raise InvalidConfigError(
                        f"shifts {shifts[i]} and {shifts[j]} separated by {sep} < L={cfg.l}"
                    )
    return plan


def propagation_time(cfg: PilotConfig) -> float:
    """Pilot overhead (P * N_t) / (F_s * N_batch) in seconds.

    With n_batch = 1 this is the sequential transmission time; batching
    divides it by exactly N_batch.
    """
    return (cfg.p * cfg.n_t) / (cfg.f_s * cfg.n_batch)
