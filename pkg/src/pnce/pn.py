"""Maximal-length PN sequence generation and circular-sequence utilities.

Sequences are generated by a Fibonacci LFSR and mapped to bipolar chips
(bit 0 -> +1.0, bit 1 -> -1.0).  A generated m-sequence of degree k has
period M = 2**k - 1, is balanced to within one chip, and has the two-valued
circular autocorrelation R[0] = 1, R[n] = -1/M for 1 <= n < M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidSpecError,
    LagOutOfRangeError,
    NotMaximalLengthError,
    ShiftOutOfRangeError,
    ZeroStateError,
)

# Known-primitive feedback polynomials (exponents with a nonzero coefficient,
# the constant term implied).  Validated by the period check at generation.
PRIMITIVE_TAPS: dict[int, tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 3),
    11: (11, 2),
}


@dataclass(frozen=True)
class LfsrSpec:
    """Fibonacci LFSR definition: feedback taps and a nonzero start state.

    ``taps`` are the exponents of the feedback polynomial and must include
    the degree itself.  The register is a ``degree``-bit integer; stage i
    is bit i-1, the output is stage ``degree``, and the feedback bit (the
    XOR of all tapped stages) enters stage 1.
    """

    degree: int
    taps: tuple[int, ...]
    state: int = 1

    def __post_init__(self):
        if self.degree < 2:
            raise InvalidSpecError(f"degree must be >= 2, got {self.degree}")
        taps = tuple(sorted(set(int(t) for t in self.taps), reverse=True))
        object.__setattr__(self, "taps", taps)
        if not taps or any(t < 1 or t > self.degree for t in taps):
            raise InvalidSpecError(f"taps must lie in [1, {self.degree}], got {taps}")
        if self.degree not in taps:
            raise InvalidSpecError(f"tap set must include the degree {self.degree}")
        if self.state == 0:
            raise ZeroStateError("initial LFSR state must be nonzero")
        if not 0 < self.state < (1 << self.degree):
            raise InvalidSpecError(
                f"state must be a nonzero {self.degree}-bit value, got {self.state}"
            )

    @property
    def period_target(self) -> int:
        return (1 << self.degree) - 1


def default_spec(degree: int, state: int = 1) -> LfsrSpec:
    """LfsrSpec for a built-in primitive polynomial of the given degree."""
    try:
        taps = PRIMITIVE_TAPS[degree]
    except KeyError:
        raise InvalidSpecError(
            f"no built-in primitive polynomial of degree {degree}; supply taps explicitly"
        ) from None
    return LfsrSpec(degree=degree, taps=taps, state=state)


@dataclass(frozen=True, eq=False)
class PnSequence:
    """Bipolar chip sequence with its originating LFSR spec.

    ``spec`` is None for ad-hoc sequences built in tests; only sequences
    produced by :func:`generate_mseq` carry the m-sequence guarantees.
    """

    chips: np.ndarray
    spec: LfsrSpec | None = None

    def __post_init__(self):
        chips = np.asarray(self.chips, dtype=np.float64)
        chips.setflags(write=False)
        object.__setattr__(self, "chips", chips)

    def __len__(self) -> int:
        return self.chips.shape[0]

    @property
    def m(self) -> int:
        return self.chips.shape[0]


def generate_mseq(spec: LfsrSpec) -> PnSequence:
    """Run the LFSR for one full period and return the bipolar chip sequence.

    Raises NotMaximalLengthError when the observed state period is not
    2**k - 1, which is what certifies primitivity here.
    """
    k = spec.degree
    mask = (1 << k) - 1
    tap_mask = 0
    for t in spec.taps:
        tap_mask |= 1 << (t - 1)

    state = spec.state
    bits = []
    # The LFSR map is a bijection on nonzero states, so the orbit returns to
    # the start state within 2**k - 1 steps.
    for _ in range(1 << k):
        bits.append((state >> (k - 1)) & 1)
        fb = (state & tap_mask).bit_count() & 1
        state = ((state << 1) | fb) & mask
        if state == spec.state:
            break
    period = len(bits)
    if period != spec.period_target:
        raise NotMaximalLengthError(
            f"LFSR period {period} != {spec.period_target} for taps {spec.taps}; "
            "feedback polynomial is not primitive"
        )
    chips = 1.0 - 2.0 * np.array(bits, dtype=np.float64)
    return PnSequence(chips=chips, spec=spec)


def circular_autocorrelation(seq: PnSequence, lag: int) -> float:
    """(1/M) * sum_m s[m] * s[(m + lag) mod M] for a real chip sequence."""
    m = seq.m
    if not 0 <= lag < m:
        raise LagOutOfRangeError(f"lag {lag} outside [0, {m})")
    return float(np.dot(seq.chips, np.roll(seq.chips, -lag)) / m)


def circular_shift(seq: PnSequence, shift: int) -> PnSequence:
    """Cyclically delay the sequence by ``shift`` chips.

    The chip at index 0 moves to index ``shift``; composing two shifts adds
    modulo M.  A pilot delayed by ``shift`` produces correlation peaks in
    the lag window starting at ``shift``, which is what the batched
    correlator de-multiplexes on.
    """
    m = seq.m
    if not 0 <= shift < m:
        raise ShiftOutOfRangeError(f"shift {shift} outside [0, {m})")
    return PnSequence(chips=np.roll(seq.chips, shift), spec=seq.spec)
