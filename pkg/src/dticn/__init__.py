"""Delay-tolerant ICN over a slotted long-range link: protocol library,
deterministic simulator, experiment service, and CLI."""

from .core import Name, Packet, PacketKind, Payload, PayloadKind, interest, data, wire_size
from .dsme import DsmeConfig, DsmeTiming, derive_timing
from .energy import EnergyModel, lifetime_days
from .forwarder import Forwarder, TimerConfig
from .metrics import MetricsReport, emit
from .scenarios import SCENARIOS, ConfigError, ScenarioConfig
from .simulation import run

__all__ = [
    "Name",
    "Packet",
    "PacketKind",
    "Payload",
    "PayloadKind",
    "interest",
    "data",
    "wire_size",
    "DsmeConfig",
    "DsmeTiming",
    "derive_timing",
    "EnergyModel",
    "lifetime_days",
    "Forwarder",
    "TimerConfig",
    "MetricsReport",
    "emit",
    "SCENARIOS",
    "ConfigError",
    "ScenarioConfig",
    "run",
]

__version__ = "0.1.0"
