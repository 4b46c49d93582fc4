"""Gateway behaviors layered on a forwarder: registration, custodial caching,
delay-tolerant retrieval (WAIT/NACK server), and phone-home initiation.

The custodial fetch toward the long-range node uses a PIT entry with an empty
downstream set: the WAIT already answered the consumer side, so the fetched
value is silently cached instead of being pushed at stale reverse-path state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from .core import FaceId, Name, Packet, PacketKind, Payload, data, interest
from .dsme import DsmeTiming
from .forwarder import Action, Drop, Send
from .node import Node

DEFAULT_INTERNET_ALLOWANCE_S = 0.32


class GatewayMode(enum.Enum):
    VANILLA = "vanilla"
    DELAY_TOLERANT = "delay_tolerant"
    REFLEXIVE_PUSH = "reflexive_push"


@dataclass
class Registration:
    prefix: Name
    lora_face: FaceId
    registered_at: float
    expires_at: float | None = None


def static_wait_estimate(
    timing: DsmeTiming, internet_allowance_s: float = DEFAULT_INTERNET_ALLOWANCE_S
) -> float:
    """Worst-case time until a fetched value is ready at the gateway."""
    return timing.multisuperframe_s + 2.0 * timing.slot_s + internet_allowance_s


class Gateway:
    def __init__(
        self,
        node: Node,
        mode: GatewayMode,
        nonce_fn: Callable[[], int],
        wait_estimate_s: float,
        phone_home_target: Name | None = None,
    ) -> None:
        self.node = node
        self.mode = mode
        self.nonce_fn = nonce_fn
        self.wait_estimate_s = wait_estimate_s
        self.phone_home_target = phone_home_target
        self.registrations: dict[Name, Registration] = {}
        self.lora_faces: set[FaceId] = set()
        self.internet_faces: set[FaceId] = set()
        self.indications_sent = 0
        self.indications_acked = 0
        node.hook = self
        node.app = self

    # -- node hook --------------------------------------------------------

    def handle(self, face: FaceId, pkt: Packet, now: float) -> list[Action] | None:
        if pkt.kind is PacketKind.INTEREST:
            if pkt.register and face in self.lora_faces:
                return self.handle_registration(face, pkt, now)
            if self.mode is GatewayMode.DELAY_TOLERANT and face in self.internet_faces:
                return self.on_consumer_interest(face, pkt, now)
            return None
        if face in self.lora_faces and pkt.name not in self.node.forwarder.pit:
            return self.on_unsolicited_data(face, pkt, now)
        return None

    # -- registration -------------------------------------------------------

    def handle_registration(self, face: FaceId, pkt: Packet, now: float) -> list[Action]:
        prefix = pkt.name
        existing = self.registrations.get(prefix)
        if existing is not None and existing.lora_face != face:
            return [Send(face, data(prefix, Payload.nack()))]
        if existing is None:
            self.registrations[prefix] = Registration(prefix, face, now)
            self.node.forwarder.fib_add(prefix, face)
        else:
            existing.registered_at = now
        return [Send(face, data(prefix, Payload.ack()))]

    def registration_for(self, name: Name) -> Registration | None:
        best: Registration | None = None
        for reg in self.registrations.values():
            if reg.prefix.is_prefix_of(name):
                if best is None or len(reg.prefix.components) > len(best.prefix.components):
                    best = reg
        return best

    # -- delay-tolerant retrieval ---------------------------------------------

    def on_consumer_interest(self, face: FaceId, pkt: Packet, now: float) -> list[Action]:
        cached = self.node.forwarder.cs_lookup(pkt.name, now)
        if cached is not None:
            return [Send(face, cached)]
        reg = self.registration_for(pkt.name)
        if reg is None:
            return [Send(face, data(pkt.name, Payload.nack()))]
        actions: list[Action] = []
        if pkt.name not in self.node.forwarder.pit:
            fetch = interest(
                pkt.name,
                nonce=self.nonce_fn(),
                lifetime_s=self.node.forwarder.config.pit_timeout_s,
            )
            self.node.forwarder.create_custodial_entry(fetch, reg.lora_face, now)
            actions.append(Send(reg.lora_face, fetch))
        # Repeated or retransmitted requests for a pending name get a fresh
        # wait hint; the single in-flight fetch shields the long-range link.
        actions.append(Send(face, data(pkt.name, Payload.wait(self.estimate_wait(now)))))
        return actions

    def estimate_wait(self, now: float) -> float:
        return self.wait_estimate_s

    # -- custodial ingest and phone-home ----------------------------------------

    def on_unsolicited_data(self, face: FaceId, pkt: Packet, now: float) -> list[Action]:
        reg = self.registration_for(pkt.name)
        if reg is None or reg.lora_face != face:
            return [Drop(pkt, "unauthorized")]
        self.node.forwarder.cs_insert(pkt, now)
        if self.mode is GatewayMode.REFLEXIVE_PUSH:
            self.init_phone_home(pkt.name, now)
        return []

    def init_phone_home(self, content_name: Name, now: float) -> None:
        if self.phone_home_target is None:
            raise ValueError("phone-home destination not provisioned")
        indication = interest(
            self.phone_home_target.child(*content_name.components),
            nonce=self.nonce_fn(),
            lifetime_s=self.node.forwarder.config.pit_timeout_s,
            reflexive=True,
            announced_name=content_name,
        )
        self.indications_sent += 1
        self.node.app_express_interest(indication)

    # -- gateway-local app deliveries -----------------------------------------

    def on_interest(self, pkt: Packet, face: FaceId) -> None:  # pragma: no cover - unused
        pass

    def on_data(self, pkt: Packet) -> None:
        if pkt.payload is not None and pkt.payload.kind.value == "ack":
            self.indications_acked += 1
