"""ICN forwarding engine: PIT, FIB, CS, and the Interest/Data pipeline.

Every node in a simulation (consumer, forwarder, gateway, long-range node)
runs one instance with its own timer configuration. Retransmissions are
performed by the PIT engine: while an entry is pending, the node re-sends the
stored Interest upstream with a fresh nonce on the configured schedule.
Arriving Interests that hit an active entry are aggregated (suppressed)
regardless of origin; entry expiry is silent and exact.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .core import APP_FACE, FaceId, Name, Packet, PacketKind, interest

_EPS = 1e-9


@dataclass(frozen=True)
class TimerConfig:
    """Per-node PIT lifetime and retransmission schedule.

    ``retx_attempts`` of 0 disables in-network retransmission for entries
    created on this node; the first re-send fires ``retx_interval_s`` after
    the original transmission.
    """

    pit_timeout_s: float
    retx_attempts: int = 0
    retx_interval_s: float = 0.0

    def __post_init__(self) -> None:
        if self.pit_timeout_s <= 0:
            raise ValueError("PIT timeout must be positive")
        if self.retx_attempts < 0:
            raise ValueError("retransmission attempts cannot be negative")
        if self.retx_attempts > 0 and self.retx_interval_s <= 0:
            raise ValueError("retransmissions need a positive interval")

    @classmethod
    def parse(cls, pit_timeout_s: float, spec: str) -> "TimerConfig":
        """Build from the compact ``attempts:interval`` notation, e.g. "3:1"."""
        attempts_text, _, interval_text = spec.partition(":")
        attempts = int(attempts_text)
        interval = float(interval_text) if interval_text else 0.0
        return cls(pit_timeout_s, attempts, interval)


@dataclass
class PitEntry:
    name: Name
    downstream_faces: set[FaceId]
    created_at: float
    expires_at: float
    retx_remaining: int
    next_retx_at: float | None
    upstream_face: FaceId | None
    pending_interest: Packet
    data_sent_faces: set[FaceId] = field(default_factory=set)


@dataclass
class FibEntry:
    prefix: Name
    face: FaceId
    temporary: bool = False
    expires_at: float | None = None


@dataclass
class CsEntry:
    packet: Packet
    inserted_at: float
    last_used_at: float


# -- actions handed back to the node for dispatch -----------------------------


@dataclass(frozen=True)
class Send:
    face: FaceId
    packet: Packet


@dataclass(frozen=True)
class DeliverToApp:
    packet: Packet
    face: FaceId


@dataclass(frozen=True)
class InstallTempFib:
    name: Name
    face: FaceId


@dataclass(frozen=True)
class Drop:
    packet: Packet
    reason: str


Action = Send | DeliverToApp | InstallTempFib | Drop

DEFAULT_CS_CAPACITY = 1024


class Forwarder:
    def __init__(
        self,
        node_id: str,
        config: TimerConfig,
        nonce_fn: Callable[[], int],
        cs_capacity: int = DEFAULT_CS_CAPACITY,
    ) -> None:
        self.node_id = node_id
        self.config = config
        self.nonce_fn = nonce_fn
        self.pit: dict[Name, PitEntry] = {}
        self.fib: list[FibEntry] = []
        self.cs: "OrderedDict[Name, CsEntry]" = OrderedDict()
        self.cs_capacity = cs_capacity
        self.app_prefixes: list[Name] = []
        self.flow_balance_violations = 0
        self._face_config: dict[FaceId, TimerConfig] = {}

    # -- configuration ---------------------------------------------------

    def configure(self, config: TimerConfig, face: FaceId | None = None) -> None:
        if face is None:
            self.config = config
        else:
            self._face_config[face] = config

    def set_cs_capacity(self, capacity: int) -> None:
        if capacity < 0:
            raise ValueError("capacity cannot be negative")
        self.cs_capacity = capacity
        while len(self.cs) > capacity:
            self.cs.popitem(last=False)

    def add_app_prefix(self, prefix: Name) -> None:
        self.app_prefixes.append(prefix)

    def fib_add(
        self,
        prefix: Name,
        face: FaceId,
        temporary: bool = False,
        expires_at: float | None = None,
    ) -> None:
        for entry in self.fib:
            if entry.prefix == prefix and entry.face == face and not entry.temporary:
                raise ValueError(f"duplicate FIB entry {prefix} -> face {face}")
        self.fib.append(FibEntry(prefix, face, temporary, expires_at))

    # -- lookups -----------------------------------------------------------

    def fib_lookup(self, name: Name, now: float) -> FibEntry | None:
        best: FibEntry | None = None
        for entry in self.fib:
            if entry.temporary and entry.expires_at is not None and entry.expires_at <= now:
                continue
            if entry.prefix.is_prefix_of(name):
                if best is None or len(entry.prefix.components) > len(best.prefix.components):
                    best = entry
        return best

    def cs_lookup(self, name: Name, now: float) -> Packet | None:
        entry = self.cs.get(name)
        if entry is None:
            return None
        entry.last_used_at = now
        self.cs.move_to_end(name)
        return entry.packet

    def cs_insert(self, packet: Packet, now: float) -> None:
        if packet.no_cache or self.cs_capacity == 0:
            return
        self.cs[packet.name] = CsEntry(packet, now, now)
        self.cs.move_to_end(packet.name)
        while len(self.cs) > self.cs_capacity:
            self.cs.popitem(last=False)

    def app_owns(self, name: Name) -> bool:
        return any(p.is_prefix_of(name) for p in self.app_prefixes)

    def _config_for(self, upstream: FaceId | None) -> TimerConfig:
        if upstream is not None and upstream in self._face_config:
            return self._face_config[upstream]
        return self.config

    # -- pipeline ----------------------------------------------------------

    def on_interest(self, face: FaceId, pkt: Packet, now: float) -> list[Action]:
        assert pkt.kind is PacketKind.INTEREST
        actions: list[Action] = []

        cached = self.cs_lookup(pkt.name, now)
        if cached is not None:
            return [Send(face, cached)]

        entry = self.pit.get(pkt.name)
        if entry is not None:
            # Aggregation: the new downstream face is recorded, nothing is
            # forwarded, and the entry's clock is untouched.
            entry.downstream_faces.add(face)
            return []

        if pkt.reflexive and pkt.announced_name is not None and face != APP_FACE:
            self.install_temp_fib(pkt.announced_name, face, now, pkt.lifetime_s)
            actions.append(InstallTempFib(pkt.announced_name, face))

        if self.app_owns(pkt.name):
            self._create_pit_entry(pkt, {face}, upstream=None, now=now)
            actions.append(DeliverToApp(pkt, face))
            return actions

        route = self.fib_lookup(pkt.name, now)
        if route is None or route.face == face:
            actions.append(Drop(pkt, "no-route"))
            return actions

        self._create_pit_entry(pkt, {face}, upstream=route.face, now=now)
        actions.append(Send(route.face, pkt))
        return actions

    def create_custodial_entry(self, pkt: Packet, upstream: FaceId, now: float) -> PitEntry:
        """PIT state with no downstream consumers, used by custodial fetches."""
        return self._create_pit_entry(pkt, set(), upstream=upstream, now=now)

    def _create_pit_entry(
        self, pkt: Packet, downstream: set[FaceId], upstream: FaceId | None, now: float
    ) -> PitEntry:
        config = self._config_for(upstream)
        can_retx = upstream is not None and config.retx_attempts > 0
        entry = PitEntry(
            name=pkt.name,
            downstream_faces=set(downstream),
            created_at=now,
            expires_at=now + config.pit_timeout_s,
            retx_remaining=config.retx_attempts if can_retx else 0,
            next_retx_at=now + config.retx_interval_s if can_retx else None,
            upstream_face=upstream,
            pending_interest=pkt,
        )
        self.pit[pkt.name] = entry
        return entry

    def on_data(self, face: FaceId, pkt: Packet, now: float) -> list[Action]:
        assert pkt.kind is PacketKind.DATA
        entry = self.pit.get(pkt.name)
        if entry is None:
            return [Drop(pkt, "unsolicited")]

        actions: list[Action] = []
        for downstream in sorted(entry.downstream_faces):
            if downstream == face:
                continue
            if downstream in entry.data_sent_faces:
                self.flow_balance_violations += 1
                continue
            entry.data_sent_faces.add(downstream)
            if downstream == APP_FACE:
                actions.append(DeliverToApp(pkt, face))
            else:
                actions.append(Send(downstream, pkt))
        del self.pit[pkt.name]
        self.cs_insert(pkt, now)
        self._remove_temp_fib(pkt.name)
        return actions

    # -- timers ------------------------------------------------------------

    def tick(self, now: float) -> list[Action]:
        """Expire PIT/temporary-FIB state and emit due retransmissions."""
        actions: list[Action] = []
        for name in [n for n, e in self.pit.items() if e.expires_at <= now + _EPS]:
            del self.pit[name]  # silent expiry
        for entry in list(self.pit.values()):
            while (
                entry.next_retx_at is not None
                and entry.retx_remaining > 0
                and entry.next_retx_at <= now + _EPS
            ):
                resend = self._fresh_emission(entry.pending_interest)
                entry.pending_interest = resend
                entry.retx_remaining -= 1
                config = self._config_for(entry.upstream_face)
                entry.next_retx_at = (
                    entry.next_retx_at + config.retx_interval_s if entry.retx_remaining else None
                )
                if entry.upstream_face is not None:
                    actions.append(Send(entry.upstream_face, resend))
        self.fib = [
            e
            for e in self.fib
            if not (e.temporary and e.expires_at is not None and e.expires_at <= now + _EPS)
        ]
        return actions

    def next_timer(self) -> float | None:
        times: list[float] = []
        for entry in self.pit.values():
            times.append(entry.expires_at)
            if entry.next_retx_at is not None and entry.retx_remaining > 0:
                times.append(entry.next_retx_at)
        for fib_entry in self.fib:
            if fib_entry.temporary and fib_entry.expires_at is not None:
                times.append(fib_entry.expires_at)
        return min(times) if times else None

    def _fresh_emission(self, pkt: Packet) -> Packet:
        return interest(
            name=pkt.name,
            nonce=self.nonce_fn(),
            lifetime_s=pkt.lifetime_s or self.config.pit_timeout_s,
            reflexive=pkt.reflexive,
            announced_name=pkt.announced_name,
            register=pkt.register,
        )

    # -- temporary FIB state -------------------------------------------------

    def install_temp_fib(
        self, name: Name, face: FaceId, now: float, lifetime_s: float | None
    ) -> None:
        ttl = lifetime_s if lifetime_s is not None else self.config.pit_timeout_s
        for entry in self.fib:
            if entry.temporary and entry.prefix == name and entry.face == face:
                entry.expires_at = now + ttl
                return
        self.fib.append(FibEntry(name, face, temporary=True, expires_at=now + ttl))

    def _remove_temp_fib(self, name: Name) -> None:
        self.fib = [e for e in self.fib if not (e.temporary and e.prefix == name)]

    # -- introspection for tests and invariants ------------------------------

    def temp_fib_entries(self) -> list[FibEntry]:
        return [e for e in self.fib if e.temporary]

    def cs_packets(self) -> Iterable[Packet]:
        return (entry.packet for entry in self.cs.values())
