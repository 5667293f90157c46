"""Pydantic request/response models for the estimation service."""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LfsrModel(StrictModel):
    degree: int = Field(ge=2)
    taps: Optional[list[int]] = None
    state: int = 1


class BackendModel(StrictModel):
    kind: Literal["reference64", "reference32", "tensor16"] = "reference64"
    chunk_len: Optional[int] = 256
    accumulator: Literal["binary32", "binary16"] = "binary32"


class PnRequest(StrictModel):
    pn: LfsrModel


class PnResponse(StrictModel):
    m: int
    degree: int
    taps: list[int]
    chips: list[float]


class PilotModel(StrictModel):
    c: int = Field(ge=1)
    n_t: int = Field(ge=1)
    n_batch: int = Field(ge=1, default=1)
    f_s: float = Field(gt=0, default=10e6)


class ChannelModel(StrictModel):
    l: int = Field(ge=1)
    l_nz: int = Field(ge=1)
    n_r: int = Field(ge=1)
    seed: int = 0


class SnrModel(StrictModel):
    snr_db: Optional[float] = None  # None means noiseless
    noise_seed: int = 0

    def snr_db_value(self) -> float:
        return math.inf if self.snr_db is None else self.snr_db


class SimulateRequest(StrictModel):
    pn: LfsrModel
    pilot: PilotModel
    channel: ChannelModel
    snr: SnrModel = SnrModel()


class TapRow(StrictModel):
    receiver: int
    transmitter: int
    lag: int
    re: float
    im: float


class SimulateResponse(StrictModel):
    iq_b64: str
    truth: list[TapRow]
    m: int
    p: int
    frame_count: int


class EstimateRequest(StrictModel):
    iq_b64: str
    backend: BackendModel = BackendModel()
    pn: Optional[LfsrModel] = None  # default: built-in polynomial for the file's M


class EstimateResponse(StrictModel):
    estimates: list[TapRow]
    backend: str
    saturations: int


class RunConfigModel(StrictModel):
    """JSON experiment configuration; unknown keys are rejected."""

    kind: Literal["snr", "tap"] = "snr"
    nt: int = 16
    nr: int = 16
    pn_lengths: list[int] = [511, 1023, 2047]
    cp: int = 64
    l: int = 64
    l_nz: list[int] = [64]
    n_batch: list[int] = [1]
    snr_db: list[float] = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    iterations: int = Field(ge=1, default=50)
    seed: int = 0
    backend: BackendModel = BackendModel()
    f_s: float = 10e6
    per_iteration: bool = False
    record_latency: bool = True
    output_csv: Optional[str] = None


class SweepRequest(StrictModel):
    config: RunConfigModel


class RowModel(StrictModel):
    experiment: str
    backend: str
    nt: int
    nr: int
    m: int
    c: int
    l: int
    l_nz: int
    n_batch: int
    snr_db: float
    iterations: int
    seed: int
    mae: float
    latency_s: float
    samples_moved: int
    macs: int
    saturations: int


class SweepResponse(StrictModel):
    rows: list[RowModel]


class BenchConfigModel(StrictModel):
    nt: int = 16
    nr: int = 16
    pn_lengths: list[int] = [2047]
    cp: int = 64
    l: int = 64
    l_nz: int = 64
    n_batch: list[int] = [1, 2, 4, 8]
    snr_db: float = 10.0
    seed: int = 0
    backend: BackendModel = BackendModel()
    f_s: float = 10e6
    reps: int = Field(ge=1, default=10)
    warmup: int = Field(ge=0, default=2)
    record_latency: bool = True
    output_csv: Optional[str] = None


class BenchRequest(StrictModel):
    config: BenchConfigModel


class PlotRequest(StrictModel):
    csv: str
    kind: Literal["fig3", "fig4", "fig5", "fig6"]
    csv_name: str = "results.csv"  # path the emitted script will read data from


class PlotResponse(StrictModel):
    script: str


class HealthResponse(StrictModel):
    status: str
    version: str
