"""Shared helpers: cached scenario runs so many tests can share one simulation."""

from __future__ import annotations

from functools import lru_cache

import pytest

from dticn.metrics import MetricsReport
from dticn.scenarios import ScenarioConfig
from dticn.simulation import Simulation


@lru_cache(maxsize=64)
def _run_cached(key: tuple) -> tuple[MetricsReport, Simulation]:
    config = ScenarioConfig(**dict(key))
    sim = Simulation(config)
    report = sim.run()
    return report, sim


def run_scenario(**kwargs) -> MetricsReport:
    return _run_cached(tuple(sorted(kwargs.items())))[0]


def run_scenario_with_sim(**kwargs) -> tuple[MetricsReport, Simulation]:
    return _run_cached(tuple(sorted(kwargs.items())))


@pytest.fixture
def small_run():
    return run_scenario(scenario="vanilla3", retx_mode="cr", requests=50, seed=11)
