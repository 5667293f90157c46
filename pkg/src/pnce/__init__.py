"""PN-sequence correlation channel estimation for massive MIMO at desk scale."""

from .channel import (
    NOISELESS,
    ChannelRealization,
    ChannelSpec,
    ReceivedFrame,
    SnrSpec,
    add_awgn,
    apply_channel,
    draw_channel,
    simulate_frame,
    tap_power_cap,
)
from .errors import PnceError
from .estimator import (
    CirEstimate,
    build_partial_circulant,
    estimate_batched,
    estimate_sequential,
    remove_cp,
)
from .experiments import (
    ExperimentConfig,
    LatencyReport,
    SweepResult,
    run_latency_bench,
    run_snr_sweep,
    run_tap_sweep,
)
from .halfprec import (
    BackendConfig,
    REFERENCE32,
    REFERENCE64,
    TENSOR16,
    quantize_binary16,
    tiled_mma_gemm,
)
from .metrics import mae, oracle_circular_correlate
from .pilots import (
    BatchPlan,
    PilotConfig,
    PilotFrame,
    build_batch_plan,
    build_pilot,
    max_batch,
    propagation_time,
    shift_for_transmitter,
)
from .pn import LfsrSpec, PnSequence, circular_autocorrelation, circular_shift, generate_mseq

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
