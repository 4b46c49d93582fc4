"""Names, packets, and faces shared by every node in the simulator.

Packets are structured values, not encodings: wire sizes exist only so
airtime, overhead, and energy accounting can count bytes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

INTEREST_WIRE_BYTES = 31
DATA_WIRE_BYTES = 36

# Opaque per-node face handle. Face 0 is reserved for the local application.
FaceId = int
APP_FACE: FaceId = 0


@dataclass(frozen=True, order=True)
class Name:
    """Hierarchical content identifier, rendered as "/seg1/seg2/..."."""

    components: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("a name needs at least one component")
        for c in self.components:
            if not c or "/" in c:
                raise ValueError(f"bad name component: {c!r}")

    @classmethod
    def parse(cls, text: str) -> "Name":
        parts = [p for p in text.split("/") if p]
        return cls(tuple(parts))

    def __str__(self) -> str:
        return "/" + "/".join(self.components)

    def child(self, *segments: str) -> "Name":
        return Name(self.components + tuple(segments))

    def is_prefix_of(self, other: "Name") -> bool:
        n = len(self.components)
        return n <= len(other.components) and other.components[:n] == self.components


def is_prefix_of(prefix: Name, name: Name) -> bool:
    """True iff every component of ``prefix`` leads ``name``; reflexive."""
    return prefix.is_prefix_of(name)


class PacketKind(enum.Enum):
    INTEREST = "interest"
    DATA = "data"


class PayloadKind(enum.Enum):
    VALUE = "value"
    ACK = "ack"
    NACK = "nack"
    WAIT = "wait"


@dataclass(frozen=True)
class Payload:
    kind: PayloadKind
    value: int | None = None
    wait_s: float | None = None

    @classmethod
    def make_value(cls, value: int) -> "Payload":
        return cls(PayloadKind.VALUE, value=value)

    @classmethod
    def ack(cls) -> "Payload":
        return cls(PayloadKind.ACK)

    @classmethod
    def nack(cls) -> "Payload":
        return cls(PayloadKind.NACK)

    @classmethod
    def wait(cls, estimate_s: float) -> "Payload":
        if estimate_s <= 0:
            raise ValueError("wait estimate must be positive")
        return cls(PayloadKind.WAIT, wait_s=estimate_s)


@dataclass(frozen=True)
class Packet:
    """One Interest or Data unit.

    ``announced_name`` rides on reflexive indication Interests and carries the
    content name the receiver may pull back; ``register`` marks the overloaded
    Interest a node uses to claim its prefix at the gateway.
    """

    kind: PacketKind
    name: Name
    nonce: int | None = None
    lifetime_s: float | None = None
    reflexive: bool = False
    announced_name: Name | None = None
    register: bool = False
    payload: Payload | None = None
    no_cache: bool = False

    def __post_init__(self) -> None:
        if self.kind is PacketKind.DATA:
            if self.payload is None:
                raise ValueError("data packets carry a payload")
            if self.payload.kind in (PayloadKind.WAIT, PayloadKind.NACK) and not self.no_cache:
                raise ValueError("wait/nack data must be marked no_cache")
        else:
            if self.payload is not None:
                raise ValueError("interests carry no payload")

    @property
    def wire_size(self) -> int:
        return INTEREST_WIRE_BYTES if self.kind is PacketKind.INTEREST else DATA_WIRE_BYTES

    def is_interest(self) -> bool:
        return self.kind is PacketKind.INTEREST

    def is_data(self) -> bool:
        return self.kind is PacketKind.DATA


def wire_size(packet: Packet) -> int:
    """Accounting size in bytes; depends on kind only."""
    return packet.wire_size


def interest(
    name: Name,
    nonce: int,
    lifetime_s: float,
    reflexive: bool = False,
    announced_name: Name | None = None,
    register: bool = False,
) -> Packet:
    return Packet(
        kind=PacketKind.INTEREST,
        name=name,
        nonce=nonce,
        lifetime_s=lifetime_s,
        reflexive=reflexive,
        announced_name=announced_name,
        register=register,
    )


def data(name: Name, payload: Payload, no_cache: bool | None = None) -> Packet:
    # Wait/Nack are never cacheable; Acks follow the same rule so control
    # responses can never shadow real content in any store.
    if no_cache is None:
        no_cache = payload.kind is not PayloadKind.VALUE
    if payload.kind in (PayloadKind.WAIT, PayloadKind.NACK):
        no_cache = True
    return Packet(kind=PacketKind.DATA, name=name, payload=payload, no_cache=no_cache)
