"""Experiment configuration: scenario presets, per-node timer tables, and the
flat key=value config-file format used by the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .dsme import DsmeConfig
from .forwarder import TimerConfig

SCENARIOS = ("vanilla1", "vanilla2", "vanilla3", "delay_tolerant", "reflexive_push")
RETX_MODES = ("inr", "cr")
LOSS_MODELS = ("per_link_direction", "end_to_end")

# CLI spellings for scenario names.
SCENARIO_ALIASES = {
    "vanilla1": "vanilla1",
    "vanilla2": "vanilla2",
    "vanilla3": "vanilla3",
    "delay-tolerant": "delay_tolerant",
    "delay_tolerant": "delay_tolerant",
    "reflexive-push": "reflexive_push",
    "reflexive_push": "reflexive_push",
}


class ConfigError(ValueError):
    """Raised for invalid experiment configuration (CLI exit code 2)."""


def node_timer_table(scenario: str, retx_mode: str) -> dict[str, TimerConfig]:
    """Per-role PIT/retransmission parameters.

    Every scenario but reflexive push lifts the gateway and node PIT timers
    into the long-delay domain (60 s, about two multi-superframes) and
    disables retransmissions on the long-range hop. The in-network (inr) and
    consumer (cr) variants differ only in whether the mid-path forwarder
    re-sends pending Interests.
    """
    fwd_retx = (3, 1.0) if retx_mode == "inr" else (0, 0.0)
    if scenario == "vanilla1":
        return {
            "consumer": TimerConfig(4.0, 3, 1.0),
            "forwarder": TimerConfig(4.0, *fwd_retx),
            "gateway": TimerConfig(60.0),
            "node": TimerConfig(60.0),
        }
    if scenario == "vanilla2":
        return {
            "consumer": TimerConfig(60.0, 3, 15.0),
            "forwarder": TimerConfig(4.0, *fwd_retx),
            "gateway": TimerConfig(60.0),
            "node": TimerConfig(60.0),
        }
    if scenario == "vanilla3":
        return {
            "consumer": TimerConfig(60.0, 3, 15.0),
            "forwarder": TimerConfig(60.0, *fwd_retx),
            "gateway": TimerConfig(60.0),
            "node": TimerConfig(60.0),
        }
    if scenario == "delay_tolerant":
        return {
            "consumer": TimerConfig(4.0, 3, 1.0),
            "forwarder": TimerConfig(4.0, *fwd_retx),
            "gateway": TimerConfig(60.0),
            "node": TimerConfig(60.0),
        }
    if scenario == "reflexive_push":
        return {
            "consumer": TimerConfig(4.0, 3, 1.0),
            "forwarder": TimerConfig(4.0, *fwd_retx),
            "gateway": TimerConfig(4.0, 3, 1.0),
            "node": TimerConfig(60.0),
        }
    raise ConfigError(f"unknown scenario: {scenario}")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "vanilla1"
    retx_mode: str = "inr"
    loss: float = 0.0
    loss_model: str = "per_link_direction"
    requests: int = 1000
    seed: int = 1
    interval_mean_s: float = 60.0
    interval_jitter_s: float = 10.0
    workload_start_s: float = 5.0
    internet_delay_s: float = 0.020
    dsme: DsmeConfig = field(default_factory=DsmeConfig)
    node_prefix: str = "/n1"
    phone_home_target: str = "/consumer/inbox"
    wait_estimate_s: float | None = None  # None: static worst case from the MAC timing
    internet_allowance_s: float = 0.32
    retry_ring_capacity: int = 8
    retry_ring_timeout_s: float | None = None
    final_ack: bool = True
    cs_capacity: int = 1024
    drain_s: float = 300.0
    ideal_lora: bool = False  # replace the long-range hop with a fast link (overhead baseline)
    trace: bool = False  # structured (time, node, action, packet) log on the recorder
    timer_overrides: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.retx_mode not in RETX_MODES:
            raise ConfigError(f"retx mode must be one of {RETX_MODES}, got {self.retx_mode!r}")
        if self.loss_model not in LOSS_MODELS:
            raise ConfigError(f"loss model must be one of {LOSS_MODELS}")
        if not 0.0 <= self.loss <= 1.0:
            raise ConfigError("loss must be a probability in [0, 1]")
        if self.requests < 0:
            raise ConfigError("requests cannot be negative")
        if self.interval_mean_s <= 0 or self.interval_jitter_s < 0:
            raise ConfigError("bad request interval")
        if self.interval_jitter_s > self.interval_mean_s:
            raise ConfigError("interval jitter larger than the mean")
        if self.retry_ring_capacity < 1:
            raise ConfigError("retry ring needs capacity >= 1")

    def timers(self) -> dict[str, TimerConfig]:
        table = node_timer_table(self.scenario, self.retx_mode)
        table.update(self.timer_overrides)
        return table


_CONFIG_KEYS: dict[str, Any] = {
    "scenario": str,
    "retx": str,
    "loss": float,
    "loss_model": str,
    "requests": int,
    "seed": int,
    "interval_mean_s": float,
    "interval_jitter_s": float,
    "workload_start_s": float,
    "internet_delay_s": float,
    "symbol_time_ms": float,
    "so": int,
    "mo": int,
    "bo": int,
    "channels": int,
    "cfp_slots": int,
    "node_prefix": str,
    "phone_home_target": str,
    "wait_estimate_s": float,
    "internet_allowance_s": float,
    "retry_ring_capacity": int,
    "retry_ring_timeout_s": float,
    "final_ack": bool,
    "cs_capacity": int,
    "drain_s": float,
    "ideal_lora": bool,
    "trace": bool,
}


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Parse the flat ``key = value`` experiment file format."""
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        caster = _CONFIG_KEYS[key]
        try:
            values[key] = _parse_bool(value) if caster is bool else caster(value)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def config_from_values(values: dict[str, Any]) -> ScenarioConfig:
    """Build a ScenarioConfig from flat config keys (file and/or CLI flags)."""
    dsme_kwargs: dict[str, Any] = {}
    if "symbol_time_ms" in values:
        dsme_kwargs["symbol_time_s"] = values.pop("symbol_time_ms") / 1000.0
    for key, attr in (("so", "so"), ("mo", "mo"), ("bo", "bo"), ("channels", "channels")):
        if key in values:
            dsme_kwargs[attr] = values.pop(key)
    if "cfp_slots" in values:
        dsme_kwargs["cfp_slots_per_superframe"] = values.pop("cfp_slots")

    kwargs: dict[str, Any] = {}
    if "scenario" in values:
        raw = values.pop("scenario")
        if raw not in SCENARIO_ALIASES:
            raise ConfigError(f"unknown scenario {raw!r}")
        kwargs["scenario"] = SCENARIO_ALIASES[raw]
    if "retx" in values:
        kwargs["retx_mode"] = str(values.pop("retx")).lower()
    kwargs.update(values)
    try:
        if dsme_kwargs:
            kwargs["dsme"] = DsmeConfig(**dsme_kwargs)
        return ScenarioConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
