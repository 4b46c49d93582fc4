"""Link models: fast lossy Internet hops and the slotted long-range hop.

Transmission counters tick at departure time, so retransmissions and packets
that the loss process eats are still counted. The long-range link is
collision-free by construction (exclusive cells) and therefore lossless.
"""

from __future__ import annotations

from random import Random
from typing import TYPE_CHECKING

from .core import FaceId, Packet, PacketKind
from .dsme import (
    DsmeTiming,
    SlotAssignment,
    next_cap_tx,
    next_data_tx,
    next_interest_tx,
    next_push_tx,
)
from .engine import Engine
from .node import Node

if TYPE_CHECKING:
    from .metrics import Recorder


class InternetLink:
    """Bidirectional point-to-point link with fixed one-way delay and optional loss."""

    def __init__(
        self,
        name: str,
        engine: Engine,
        recorder: "Recorder",
        node_a: Node,
        node_b: Node,
        delay_s: float = 0.020,
        loss_prob: float | dict[str, float] = 0.0,
        loss_rng: Random | None = None,
    ) -> None:
        self.name = name
        self.engine = engine
        self.recorder = recorder
        self.delay_s = delay_s
        if isinstance(loss_prob, dict):
            self.loss_from = dict(loss_prob)
        else:
            self.loss_from = {node_a.node_id: loss_prob, node_b.node_id: loss_prob}
        self.loss_rng = loss_rng or Random(0)
        self.face_a = node_a.bind_face(self)
        self.face_b = node_b.bind_face(self)
        self._peers = {node_a.node_id: (node_b, self.face_b), node_b.node_id: (node_a, self.face_a)}

    def send(self, from_node: Node, pkt: Packet) -> None:
        now = self.engine.now
        to_node, to_face = self._peers[from_node.node_id]
        self.recorder.count_departure(self.name, from_node, pkt, now)
        loss = self.loss_from.get(from_node.node_id, 0.0)
        if loss > 0.0 and self.loss_rng.random() < loss:
            self.recorder.count_loss(self.name, from_node.node_id, now)
            return
        self.recorder.count_delivery(self.name, from_node.node_id, now + self.delay_s)
        self.engine.schedule(now + self.delay_s, to_node.receive, to_face, pkt)


class IdealLink(InternetLink):
    """Fast lossless stand-in for the long-range hop (baseline overhead runs)."""

    def __init__(self, name, engine, recorder, node_a, node_b, delay_s=0.001):
        super().__init__(name, engine, recorder, node_a, node_b, delay_s=delay_s, loss_prob=0.0)


class LoraLink:
    """Gateway <-> long-range node link driven by the slot schedule.

    Downlink Interests depart at the node's next Interest slot; an aligned
    uplink reply uses the adjacent data slot of the same superframe; anything
    else from the node waits for its push slot. Registration traffic rides the
    contention-access period. A packet is delivered one slot after departure.
    """

    def __init__(
        self,
        name: str,
        engine: Engine,
        recorder: "Recorder",
        gateway: Node,
        lora_node: Node,
        timing: DsmeTiming,
        assignment: SlotAssignment,
    ) -> None:
        self.name = name
        self.engine = engine
        self.recorder = recorder
        self.timing = timing
        self.assignment = assignment
        self.gateway = gateway
        self.lora_node = lora_node
        self.gateway_face = gateway.bind_face(self)
        self.node_face = lora_node.bind_face(self)

    def send(self, from_node: Node, pkt: Packet) -> None:
        now = self.engine.now
        if from_node.node_id == self.gateway.node_id:
            if pkt.kind is PacketKind.INTEREST:
                depart = next_interest_tx(now, self.assignment, self.timing)
            else:
                depart = next_cap_tx(now, self.assignment, self.timing)
            to_node, to_face = self.lora_node, self.node_face
        else:
            if pkt.kind is PacketKind.INTEREST:
                depart = next_cap_tx(now, self.assignment, self.timing)
            else:
                try:
                    depart = next_data_tx(now, self.assignment, self.timing)
                except ValueError:
                    depart = next_push_tx(now, self.assignment, self.timing)
            to_node, to_face = self.gateway, self.gateway_face
        self.engine.schedule(depart, self._transmit, from_node, to_node, to_face, pkt)

    def _transmit(self, from_node: Node, to_node: Node, to_face: FaceId, pkt: Packet) -> None:
        now = self.engine.now
        self.recorder.count_departure(self.name, from_node, pkt, now)
        arrival = now + self.timing.slot_s
        self.recorder.count_delivery(self.name, from_node.node_id, arrival)
        self.engine.schedule(arrival, to_node.receive, to_face, pkt)
