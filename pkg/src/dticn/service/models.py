"""Pydantic request/response models for the experiment service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

ScenarioName = Literal[
    "vanilla1", "vanilla2", "vanilla3",
    "delay-tolerant", "delay_tolerant",
    "reflexive-push", "reflexive_push",
]


class RunOptions(BaseModel):
    """Optional knobs beyond the core scenario axes; defaults mirror the presets."""

    interval_mean_s: float = 60.0
    interval_jitter_s: float = 10.0
    workload_start_s: float = 5.0
    internet_delay_s: float = 0.020
    loss_model: Literal["per_link_direction", "end_to_end"] = "per_link_direction"
    symbol_time_ms: float = 1.024
    so: int = 3
    mo: int = 5
    bo: int = 5
    channels: int = 16
    cfp_slots: int = 7
    node_prefix: str = "/n1"
    phone_home_target: str = "/consumer/inbox"
    wait_estimate_s: float | None = None
    internet_allowance_s: float = 0.32
    retry_ring_capacity: int = 8
    retry_ring_timeout_s: float | None = None
    final_ack: bool = True
    cs_capacity: int = 1024
    drain_s: float = 300.0
    ideal_lora: bool = False


class RunRequest(BaseModel):
    scenario: ScenarioName
    retx: Literal["inr", "cr"] = "inr"
    loss: float = Field(0.0, ge=0.0, le=1.0)
    requests: int = Field(1000, ge=0, le=200_000)
    seed: int = 1
    include_transactions: bool = True
    options: RunOptions = Field(default_factory=RunOptions)


class RunSummary(BaseModel):
    scenario: str
    retx_mode: str
    loss: float
    seed: int
    requests: int
    success_rate: float | None
    outcomes: dict[str, int]
    completion_quantiles: dict[str, float | None]
    tx_per_content: dict[str, float | None]


class RunResponse(BaseModel):
    summary: RunSummary
    report: dict[str, Any]


class SweepRequest(BaseModel):
    scenario: ScenarioName
    retx: Literal["inr", "cr"] = "inr"
    loss: float = Field(0.0, ge=0.0, le=1.0)
    requests: int = Field(200, ge=0, le=200_000)
    seeds: list[int] = Field(min_length=1, max_length=500)
    options: RunOptions = Field(default_factory=RunOptions)


class SweepAggregate(BaseModel):
    metric: str
    mean: float
    std: float
    ci99_halfwidth: float


class SweepResponse(BaseModel):
    scenario: str
    retx_mode: str
    loss: float
    seeds: list[int]
    per_seed: list[RunSummary]
    aggregates: list[SweepAggregate]


class EnergyResponse(BaseModel):
    protocol: str
    energy_mj_per_msf: float
    lifetime_days: float


class ScenarioInfo(BaseModel):
    name: str
    cli_name: str
    retx_modes: list[str]
    timers: dict[str, str]
