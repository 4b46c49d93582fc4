"""FastAPI service wrapping the simulator: runs, seed sweeps, energy queries.

Runs share nothing mutable, so concurrent requests are safe; each /run builds
a fresh simulation instance.
"""

from __future__ import annotations

import math
from typing import Any

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..energy import EnergyModel
from ..metrics import MetricsReport
from ..scenarios import SCENARIOS, ConfigError, config_from_values, node_timer_table
from ..simulation import run as run_simulation
from .models import (
    EnergyResponse,
    RunRequest,
    RunResponse,
    RunSummary,
    ScenarioInfo,
    SweepAggregate,
    SweepRequest,
    SweepResponse,
)

app = FastAPI(
    title="dticn experiment service",
    description="Delay-tolerant ICN over a slotted long-range link: scenario runs and analysis",
    version=__version__,
)


def _build_config(scenario: str, retx: str, loss: float, requests: int, seed: int, options) -> Any:
    values: dict[str, Any] = {
        "scenario": scenario,
        "retx": retx,
        "loss": loss,
        "requests": requests,
        "seed": seed,
    }
    values.update(options.model_dump(exclude_none=True))
    try:
        return config_from_values(values)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _summarize(report: MetricsReport) -> RunSummary:
    return RunSummary(
        scenario=report.scenario,
        retx_mode=report.retx_mode,
        loss=report.loss,
        seed=report.seed,
        requests=report.requests,
        success_rate=report.success_rate(),
        outcomes=report.outcome_counts(),
        completion_quantiles=report.completion_quantiles(),
        tx_per_content=report.tx_per_content(),
    )


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok", "version": __version__}


@app.get("/scenarios", response_model=list[ScenarioInfo])
def scenarios() -> list[ScenarioInfo]:
    out = []
    for name in SCENARIOS:
        timers = node_timer_table(name, "inr")
        out.append(
            ScenarioInfo(
                name=name,
                cli_name=name.replace("_", "-"),
                retx_modes=["inr", "cr"],
                timers={
                    role: f"pit={tc.pit_timeout_s:g}s retx={tc.retx_attempts}:{tc.retx_interval_s:g}"
                    for role, tc in timers.items()
                },
            )
        )
    return out


@app.post("/run", response_model=RunResponse)
def run_scenario(request: RunRequest) -> RunResponse:
    config = _build_config(
        request.scenario, request.retx, request.loss, request.requests, request.seed,
        request.options,
    )
    report = run_simulation(config)
    payload = report.to_dict()
    if not request.include_transactions:
        payload["transactions"] = []
    return RunResponse(summary=_summarize(report), report=payload)


@app.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    per_seed: list[RunSummary] = []
    for seed in request.seeds:
        config = _build_config(
            request.scenario, request.retx, request.loss, request.requests, seed, request.options
        )
        per_seed.append(_summarize(run_simulation(config)))

    def aggregate(metric: str, values: list[float]) -> SweepAggregate:
        n = len(values)
        mean = sum(values) / n
        var = sum((v - mean) ** 2 for v in values) / (n - 1) if n > 1 else 0.0
        std = math.sqrt(var)
        return SweepAggregate(
            metric=metric, mean=mean, std=std,
            ci99_halfwidth=2.576 * std / math.sqrt(n) if n > 1 else 0.0,
        )

    aggregates = []
    rates = [s.success_rate for s in per_seed if s.success_rate is not None]
    if rates:
        aggregates.append(aggregate("success_rate", rates))
    totals = [s.tx_per_content.get("total") for s in per_seed]
    totals = [t for t in totals if t is not None]
    if totals:
        aggregates.append(aggregate("tx_per_content_total", totals))
    p50s = [s.completion_quantiles.get("p50") for s in per_seed]
    p50s = [p for p in p50s if p is not None]
    if p50s:
        aggregates.append(aggregate("completion_p50_s", p50s))
    return SweepResponse(
        scenario=per_seed[0].scenario if per_seed else request.scenario,
        retx_mode=request.retx,
        loss=request.loss,
        seeds=list(request.seeds),
        per_seed=per_seed,
        aggregates=aggregates,
    )


@app.get("/energy", response_model=list[EnergyResponse])
def energy_all() -> list[EnergyResponse]:
    model = EnergyModel()
    return [
        EnergyResponse(
            protocol=p,
            energy_mj_per_msf=model.energy_mj_per_msf[p],
            lifetime_days=model.lifetime_days(p),
        )
        for p in model.protocols()
    ]


@app.get("/energy/{protocol}", response_model=EnergyResponse)
def energy_one(protocol: str) -> EnergyResponse:
    model = EnergyModel()
    try:
        lifetime = model.lifetime_days(protocol)
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    return EnergyResponse(
        protocol=protocol,
        energy_mj_per_msf=model.energy_mj_per_msf[protocol],
        lifetime_days=lifetime,
    )
