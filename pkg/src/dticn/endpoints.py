"""Consumer and producer application behaviors for the five scenarios.

The consumer issues one Interest per content item at workload times; node-level
retransmission engines handle timer-driven re-sends, while wait-hint retries
(delay-tolerant mode) and reflexive responses (push mode) live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import TYPE_CHECKING

from .core import FaceId, Name, Packet, PacketKind, Payload, PayloadKind, data, interest
from .forwarder import Action, DeliverToApp
from .node import Node

if TYPE_CHECKING:
    from .metrics import Recorder


@dataclass(frozen=True)
class Workload:
    """Unique, monotone content names requested/produced at jittered intervals."""

    requests: int
    interval_mean_s: float = 60.0
    interval_jitter_s: float = 10.0
    start_s: float = 5.0

    def times(self, rng: Random) -> list[float]:
        out: list[float] = []
        t = self.start_s
        for _ in range(self.requests):
            out.append(t)
            t += rng.uniform(
                self.interval_mean_s - self.interval_jitter_s,
                self.interval_mean_s + self.interval_jitter_s,
            )
        return out


@dataclass
class _RingSlot:
    name: Name
    due_at: float
    live: bool = True


class RetryRing:
    """Bounded circular list of future re-requests.

    Keeps per-name retry state out of long-lived PIT entries. A new insert
    overwrites whatever occupies the next slot; overwriting a still-live entry
    abandons that transaction. Entries carry no timeout unless one is
    configured (``entry_timeout_s``).
    """

    def __init__(self, capacity: int = 8, entry_timeout_s: float | None = None) -> None:
        if capacity < 1:
            raise ValueError("ring capacity must be at least 1")
        self.capacity = capacity
        self.entry_timeout_s = entry_timeout_s
        self._slots: list[_RingSlot | None] = [None] * capacity
        self._write = 0
        self._by_name: dict[Name, _RingSlot] = {}

    def insert(self, name: Name, due_at: float, now: float) -> Name | None:
        """Store a re-request; returns the name of an overwritten live entry, if any."""
        evicted: Name | None = None
        old = self._slots[self._write]
        if old is not None and old.live and not self._timed_out(old, now):
            evicted = old.name
        if old is not None:
            old.live = False
            self._by_name.pop(old.name, None)
        slot = _RingSlot(name, due_at)
        self._slots[self._write] = slot
        self._by_name[name] = slot
        self._write = (self._write + 1) % self.capacity
        return evicted

    def _timed_out(self, slot: _RingSlot, now: float) -> bool:
        if self.entry_timeout_s is None:
            return False
        return now >= slot.due_at + self.entry_timeout_s

    def take_due(self, name: Name) -> bool:
        """Consume the entry for ``name``; False if it was overwritten meanwhile."""
        slot = self._by_name.pop(name, None)
        if slot is None or not slot.live:
            return False
        slot.live = False
        return True

    def cancel(self, name: Name) -> None:
        slot = self._by_name.pop(name, None)
        if slot is not None:
            slot.live = False

    def has(self, name: Name) -> bool:
        slot = self._by_name.get(name)
        return slot is not None and slot.live

    def live_count(self) -> int:
        return sum(1 for s in self._slots if s is not None and s.live)


class ConsumerApp:
    """Internet-side requester; also answers reflexive indications in push mode."""

    def __init__(
        self,
        node: Node,
        recorder: "Recorder",
        consumer_lifetime_s: float,
        nonce_fn,
        ring: RetryRing | None = None,
        final_ack: bool = True,
    ) -> None:
        self.node = node
        self.recorder = recorder
        self.lifetime_s = consumer_lifetime_s
        self.nonce_fn = nonce_fn
        self.ring = ring
        self.final_ack = final_ack
        self._completed: set[Name] = set()
        self._failed: set[Name] = set()
        self._indication_name: dict[Name, Name] = {}
        node.app = self

    # -- request generation -----------------------------------------------

    def start_requests(self, names_and_times: list[tuple[Name, float]]) -> None:
        for name, at in names_and_times:
            self.node.engine.schedule(at, self._issue, name, True)

    def _issue(self, name: Name, record: bool) -> None:
        if record:
            self.recorder.create_transaction(name, self.node.engine.now, "consumer")
        self._express(name)

    def _express(self, name: Name) -> None:
        pkt = interest(name, nonce=self.nonce_fn(), lifetime_s=self.lifetime_s)
        self.node.app_express_interest(pkt)

    # -- deliveries ---------------------------------------------------------

    def on_data(self, pkt: Packet) -> None:
        now = self.node.engine.now
        payload = pkt.payload
        assert payload is not None
        if payload.kind is PayloadKind.VALUE:
            self._on_value(pkt.name, now)
        elif payload.kind is PayloadKind.WAIT:
            self._on_wait(pkt.name, payload.wait_s or 0.0, now)
        elif payload.kind is PayloadKind.NACK:
            if pkt.name not in self._completed and pkt.name not in self._failed:
                self._failed.add(pkt.name)
                self.recorder.fail_transaction(pkt.name, now, "nack")
        # Acks are producer-side control traffic; a consumer ignores them.

    def _on_value(self, name: Name, now: float) -> None:
        if name in self._completed:
            return
        self._completed.add(name)
        if self.ring is not None:
            self.ring.cancel(name)
        self.recorder.complete_transaction(name, now)
        indication = self._indication_name.pop(name, None)
        if indication is not None and self.final_ack:
            self.node.app_put_data(data(indication, Payload.ack()))

    def _on_wait(self, name: Name, estimate_s: float, now: float) -> None:
        if self.ring is None or name in self._completed or name in self._failed:
            return
        if self.ring.has(name):
            return  # duplicate hint for an already-armed retry
        evicted = self.ring.insert(name, now + estimate_s, now)
        if evicted is not None:
            self.recorder.abandon_transaction(evicted, now)
        self.node.engine.schedule(now + estimate_s, self._ring_fire, name)

    def _ring_fire(self, name: Name) -> None:
        if name in self._completed or name in self._failed:
            return
        if not self.ring.take_due(name):
            return  # overwritten: abandoned, never re-requested
        self._express(name)

    # -- reflexive push ----------------------------------------------------------

    def on_interest(self, pkt: Packet, face: FaceId) -> None:
        if not pkt.reflexive or pkt.announced_name is None:
            return
        content = pkt.announced_name
        if content in self._completed:
            # Duplicate indication after completion: re-acknowledge only.
            if self.final_ack:
                self.node.app_put_data(data(pkt.name, Payload.ack()))
            return
        self._indication_name[content] = pkt.name
        rfx = interest(content, nonce=self.nonce_fn(), lifetime_s=self.lifetime_s)
        self.node.app_express_interest(rfx)


class ProducerApp:
    """Long-range sensor node: registers a prefix, answers Interests with fresh
    values (pull) or pushes generated items as local unsolicited data (push)."""

    def __init__(
        self,
        node: Node,
        recorder: "Recorder",
        prefix: Name,
        lora_face: FaceId,
        nonce_fn,
        value_rng: Random,
    ) -> None:
        self.node = node
        self.recorder = recorder
        self.prefix = prefix
        self.lora_face = lora_face
        self.nonce_fn = nonce_fn
        self.value_rng = value_rng
        self.registered = False
        self.registration_lifetime_s = 60.0
        node.app = self
        node.hook = self
        node.forwarder.add_app_prefix(prefix)

    def handle(self, face: FaceId, pkt: Packet, now: float) -> list[Action] | None:
        # Registration replies bypass the PIT (the request did too).
        if (
            pkt.kind is PacketKind.DATA
            and pkt.name == self.prefix
            and pkt.payload is not None
            and pkt.payload.kind in (PayloadKind.ACK, PayloadKind.NACK)
        ):
            return [DeliverToApp(pkt, face)]
        return None

    def register(self) -> None:
        pkt = interest(
            self.prefix,
            nonce=self.nonce_fn(),
            lifetime_s=self.registration_lifetime_s,
            register=True,
        )
        self.node.send_direct(self.lora_face, pkt)

    def start_pushes(self, names_and_times: list[tuple[Name, float]]) -> None:
        for name, at in names_and_times:
            self.node.engine.schedule(at, self._push, name)

    def _push(self, name: Name) -> None:
        now = self.node.engine.now
        self.recorder.create_transaction(name, now, "producer")
        pkt = data(name, Payload.make_value(self.value_rng.getrandbits(32)))
        self.node.send_direct(self.lora_face, pkt)

    # -- deliveries ---------------------------------------------------------

    def on_interest(self, pkt: Packet, face: FaceId) -> None:
        value = data(pkt.name, Payload.make_value(self.value_rng.getrandbits(32)))
        self.node.app_put_data(value)

    def on_data(self, pkt: Packet) -> None:
        payload = pkt.payload
        if payload is not None and payload.kind is PayloadKind.ACK and pkt.name == self.prefix:
            self.registered = True
