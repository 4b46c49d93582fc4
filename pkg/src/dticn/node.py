"""Node shell tying a forwarder to links, an application, and engine timers."""

from __future__ import annotations

from typing import TYPE_CHECKING, Protocol

from .core import APP_FACE, FaceId, Packet, PacketKind
from .engine import Engine
from .forwarder import Action, DeliverToApp, Drop, Forwarder, InstallTempFib, Send

if TYPE_CHECKING:
    from .metrics import Recorder

_EPS = 1e-9


class App(Protocol):
    def on_interest(self, pkt: Packet, face: FaceId) -> None: ...

    def on_data(self, pkt: Packet) -> None: ...


class NodeHook(Protocol):
    def handle(self, face: FaceId, pkt: Packet, now: float) -> list[Action] | None: ...


class Link(Protocol):
    def send(self, from_node: "Node", pkt: Packet) -> None: ...


class Node:
    def __init__(
        self,
        node_id: str,
        role: str,
        engine: Engine,
        forwarder: Forwarder,
        recorder: "Recorder",
    ) -> None:
        self.node_id = node_id
        self.role = role
        self.engine = engine
        self.forwarder = forwarder
        self.recorder = recorder
        self.app: App | None = None
        self.hook: NodeHook | None = None
        self._links: dict[FaceId, Link] = {}
        self._next_face: FaceId = APP_FACE + 1
        self._tick_at: float | None = None

    def bind_face(self, link: Link) -> FaceId:
        face = self._next_face
        self._next_face += 1
        self._links[face] = link
        return face

    # -- packet entry points -------------------------------------------------

    def receive(self, face: FaceId, pkt: Packet) -> None:
        now = self.engine.now
        if self.hook is not None:
            handled = self.hook.handle(face, pkt, now)
            if handled is not None:
                self._dispatch(handled)
                self._arm_timer()
                return
        if pkt.kind is PacketKind.INTEREST:
            actions = self.forwarder.on_interest(face, pkt, now)
        else:
            actions = self.forwarder.on_data(face, pkt, now)
        self._dispatch(actions)
        self._arm_timer()

    def app_express_interest(self, pkt: Packet) -> None:
        actions = self.forwarder.on_interest(APP_FACE, pkt, self.engine.now)
        self._dispatch(actions)
        self._arm_timer()

    def app_put_data(self, pkt: Packet) -> None:
        actions = self.forwarder.on_data(APP_FACE, pkt, self.engine.now)
        self._dispatch(actions)
        self._arm_timer()

    def send_direct(self, face: FaceId, pkt: Packet) -> None:
        """Bypass the pipeline: registration traffic and unsolicited pushes."""
        self._links[face].send(self, pkt)

    # -- internals -------------------------------------------------------------

    def _dispatch(self, actions: list[Action]) -> None:
        now = self.engine.now
        for action in actions:
            if isinstance(action, Send):
                self.recorder.log_action(now, self.node_id, "send", action.packet)
                if action.face == APP_FACE:
                    self._deliver_to_app(action.packet, APP_FACE)
                else:
                    self._links[action.face].send(self, action.packet)
            elif isinstance(action, DeliverToApp):
                self.recorder.log_action(now, self.node_id, "deliver", action.packet)
                self._deliver_to_app(action.packet, action.face)
            elif isinstance(action, Drop):
                self.recorder.log_action(now, self.node_id, f"drop:{action.reason}", action.packet)
                self.recorder.count_drop(self.node_id, action.reason, now)
            elif isinstance(action, InstallTempFib):
                # State change already applied inside the forwarder.
                self.recorder.log_action(now, self.node_id, "install-temp-fib", None)

    def _deliver_to_app(self, pkt: Packet, face: FaceId) -> None:
        if self.app is None:
            self.recorder.count_drop(self.node_id, "no-app", self.engine.now)
            return
        if pkt.kind is PacketKind.INTEREST:
            self.app.on_interest(pkt, face)
        else:
            self.app.on_data(pkt)

    def _arm_timer(self) -> None:
        due = self.forwarder.next_timer()
        if due is None:
            return
        if self._tick_at is not None and self._tick_at <= due + _EPS:
            return
        self._tick_at = due
        self.engine.schedule(max(due, self.engine.now), self._on_tick)

    def _on_tick(self) -> None:
        self._tick_at = None
        actions = self.forwarder.tick(self.engine.now)
        self._dispatch(actions)
        self._arm_timer()
