"""Slotframe timing for the DSME-style MAC driving the long-range link.

All long delays in the simulator originate here: a node owns one
Interest/data slot pair (or one push slot) per multi-superframe, so a packet
queued at the gateway waits up to a full multi-superframe for its next
transmission opportunity.

The multi-superframe duration is anchored at 30.72 s for the default
configuration (symbol time 1.024 ms, SO=3, MO=BO=5); other configurations
scale proportionally from that anchor rather than from the raw
960 * 2^MO-symbol arithmetic, which would land at 31.46 s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

ANCHOR_MULTISUPERFRAME_S = 30.72
ANCHOR_MO = 5
ANCHOR_SYMBOL_TIME_S = 1.024e-3
SLOTS_PER_SUPERFRAME = 16  # beacon + CAP + CFP
_EPS = 1e-9


@dataclass(frozen=True)
class DsmeConfig:
    symbol_time_s: float = ANCHOR_SYMBOL_TIME_S
    so: int = 3
    mo: int = 5
    bo: int = 5
    channels: int = 16
    cfp_slots_per_superframe: int = 7

    def __post_init__(self) -> None:
        for order, label in ((self.so, "so"), (self.mo, "mo"), (self.bo, "bo")):
            if not 0 <= order <= 15:
                raise ValueError(f"{label} must be in [0, 15], got {order}")
        if self.so > self.mo:
            raise ValueError("superframe order must not exceed multi-superframe order")
        if self.mo > self.bo:
            raise ValueError("multi-superframe order must not exceed beacon order")
        if self.symbol_time_s <= 0:
            raise ValueError("symbol time must be positive")
        if self.channels < 1 or self.cfp_slots_per_superframe < 1:
            raise ValueError("need at least one channel and one CFP slot")
        if self.cfp_slots_per_superframe > SLOTS_PER_SUPERFRAME - 2:
            raise ValueError("CFP cannot fill the whole superframe")


@dataclass(frozen=True)
class DsmeTiming:
    superframe_s: float
    multisuperframe_s: float
    superframes_per_msf: int
    slot_s: float
    total_cells: int


def derive_timing(config: DsmeConfig) -> DsmeTiming:
    """Derive all slotframe durations from the MAC orders."""
    superframes_per_msf = 2 ** (config.mo - config.so)
    msf = (
        ANCHOR_MULTISUPERFRAME_S
        * 2.0 ** (config.mo - ANCHOR_MO)
        * (config.symbol_time_s / ANCHOR_SYMBOL_TIME_S)
    )
    superframe = msf / superframes_per_msf
    slot = superframe / SLOTS_PER_SUPERFRAME
    cells = superframes_per_msf * config.cfp_slots_per_superframe * config.channels
    return DsmeTiming(
        superframe_s=superframe,
        multisuperframe_s=msf,
        superframes_per_msf=superframes_per_msf,
        slot_s=slot,
        total_cells=cells,
    )


@dataclass(frozen=True)
class SlotAssignment:
    """One node's transmission opportunities, as offsets from multi-superframe start.

    The data slot directly follows the Interest slot inside the same
    superframe, so a request that reaches the node is answered before the
    superframe ends. CAP opportunities (registration only) repeat every
    superframe.
    """

    node_id: str
    interest_slot_offset_s: float
    data_slot_offset_s: float
    push_slot_offset_s: float
    cap_offset_s: float


def assign_slots(node_id: str, timing: DsmeTiming, config: DsmeConfig, rng: Random) -> SlotAssignment:
    """Pick a node's cells uniformly at random from the CFP grid."""
    cfp = config.cfp_slots_per_superframe
    cfp_first = SLOTS_PER_SUPERFRAME - cfp  # beacon + CAP occupy the front
    sf_index = rng.randrange(timing.superframes_per_msf)
    # Interest slot needs the adjacent data slot to stay inside the superframe.
    if cfp >= 2:
        interest_slot = cfp_first + rng.randrange(cfp - 1)
    else:
        interest_slot = cfp_first
    push_sf = rng.randrange(timing.superframes_per_msf)
    push_slot = cfp_first + rng.randrange(cfp)
    sf0 = sf_index * timing.superframe_s
    return SlotAssignment(
        node_id=node_id,
        interest_slot_offset_s=sf0 + interest_slot * timing.slot_s,
        data_slot_offset_s=sf0 + (interest_slot + 1) * timing.slot_s,
        push_slot_offset_s=push_sf * timing.superframe_s + push_slot * timing.slot_s,
        cap_offset_s=1 * timing.slot_s,  # first CAP slot after the beacon
    )


def _next_occurrence(now: float, offset: float, period: float) -> float:
    """Smallest t >= now with t == offset (mod period), tolerant to fp noise.

    The grid extends below zero so a run can pre-roll (registration) before
    measurement starts at t = 0.
    """
    k = math.ceil((now - offset) / period - _EPS)
    t = offset + k * period
    if t < now - _EPS:
        t += period
    return t


def next_interest_tx(now: float, assignment: SlotAssignment, timing: DsmeTiming) -> float:
    """Next downlink Interest opportunity at or after ``now``.

    A packet queued at the gateway departs at this time and is delivered at
    departure + slot duration: the transmission completes within its slot.
    """
    return _next_occurrence(now, assignment.interest_slot_offset_s, timing.multisuperframe_s)


def next_data_tx(interest_rx_time: float, assignment: SlotAssignment, timing: DsmeTiming) -> float:
    """Uplink data opportunity paired with an Interest delivered at ``interest_rx_time``.

    The node hears the Interest when its slot ends, which is exactly when the
    adjacent data slot begins; misaligned times are rejected.
    """
    t = _next_occurrence(interest_rx_time, assignment.data_slot_offset_s, timing.multisuperframe_s)
    if t - interest_rx_time > timing.slot_s + _EPS:
        raise ValueError(
            f"time {interest_rx_time:.6f} is not aligned with the Interest slot of {assignment.node_id}"
        )
    return t


def next_push_tx(now: float, assignment: SlotAssignment, timing: DsmeTiming) -> float:
    """Next unsolicited-data opportunity; one per node per multi-superframe."""
    return _next_occurrence(now, assignment.push_slot_offset_s, timing.multisuperframe_s)


def next_cap_tx(now: float, assignment: SlotAssignment, timing: DsmeTiming) -> float:
    """Next contention-access opportunity (registration traffic only)."""
    return _next_occurrence(now, assignment.cap_offset_s, timing.superframe_s)
