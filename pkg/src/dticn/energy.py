"""Analytic energy and lifetime model for the battery-powered long-range node.

Inputs are measured per-multi-superframe energies for each protocol variant;
lifetime follows from draining one AA cell at that rate. This is a
post-processing model, not a per-packet radio simulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

MSF_DURATION_S = 30.72
SECONDS_PER_DAY = 86400.0
JOULES_PER_MAH_VOLT = 3.6

DEFAULT_ENERGY_MJ_PER_MSF = {
    "vanilla_no_mac": 1247.46,
    "vanilla_mac": 51.42,
    "delay_tolerant": 51.42,
    "reflexive_push": 30.83,
}


@dataclass(frozen=True)
class EnergyModel:
    energy_mj_per_msf: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_ENERGY_MJ_PER_MSF)
    )
    battery_capacity_mah: float = 2800.0
    battery_voltage_v: float = 3.3
    msf_duration_s: float = MSF_DURATION_S

    def protocols(self) -> list[str]:
        return list(self.energy_mj_per_msf)

    def energy_per_day_j(self, protocol: str) -> float:
        try:
            per_msf_mj = self.energy_mj_per_msf[protocol]
        except KeyError:
            raise KeyError(f"unknown protocol {protocol!r}; known: {self.protocols()}") from None
        return per_msf_mj / 1000.0 * (SECONDS_PER_DAY / self.msf_duration_s)

    def battery_energy_j(self) -> float:
        return self.battery_capacity_mah * self.battery_voltage_v * JOULES_PER_MAH_VOLT

    def lifetime_days(self, protocol: str) -> float:
        return self.battery_energy_j() / self.energy_per_day_j(protocol)


def lifetime_days(protocol: str, model: EnergyModel | None = None) -> float:
    return (model or EnergyModel()).lifetime_days(protocol)
