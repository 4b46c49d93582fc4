"""Topology construction and scenario execution.

One run builds the line topology consumer - forwarder - gateway - node,
registers the node's prefix during a pre-roll phase at negative simulation
time, plays the workload from t = 0 onward, drains, and returns a metrics
report. A run is a pure function of (config, seed): identical inputs give a
bit-identical report.
"""

from __future__ import annotations

import hashlib
from random import Random

from .core import Name
from .dsme import assign_slots, derive_timing
from .endpoints import ConsumerApp, ProducerApp, RetryRing, Workload
from .engine import Engine
from .forwarder import Forwarder
from .gateway import Gateway, GatewayMode, static_wait_estimate
from .links import IdealLink, InternetLink, LoraLink
from .metrics import LORA_LINK_NAME, MetricsReport, Recorder, build_report
from .node import Node
from .scenarios import ScenarioConfig

_GATEWAY_MODES = {
    "vanilla1": GatewayMode.VANILLA,
    "vanilla2": GatewayMode.VANILLA,
    "vanilla3": GatewayMode.VANILLA,
    "delay_tolerant": GatewayMode.DELAY_TOLERANT,
    "reflexive_push": GatewayMode.REFLEXIVE_PUSH,
}


def derived_stream(seed: int, label: str) -> Random:
    """Independent deterministic random stream: one master seed, many streams."""
    digest = hashlib.blake2s(f"{seed}:{label}".encode()).digest()
    return Random(int.from_bytes(digest[:8], "big"))


class Simulation:
    def __init__(self, config: ScenarioConfig) -> None:
        self.config = config
        self.timing = derive_timing(config.dsme)
        # Pre-roll long enough for CAP registration to finish well before t=0.
        self.start_time = -2.0 * self.timing.multisuperframe_s
        self.engine = Engine(start=self.start_time)
        self.recorder = Recorder(measure_from=0.0, trace=config.trace)
        self._build()

    # -- construction -------------------------------------------------------

    def _build(self) -> None:
        cfg = self.config
        timers = cfg.timers()
        self.nodes: dict[str, Node] = {}
        for role in ("consumer", "forwarder", "gateway", "node"):
            forwarder = Forwarder(
                node_id=role,
                config=timers[role],
                nonce_fn=_nonce_fn(cfg.seed, role),
                cs_capacity=cfg.cs_capacity,
            )
            self.nodes[role] = Node(role, role, self.engine, forwarder, self.recorder)

        consumer, forwarder, gateway, node = (
            self.nodes["consumer"],
            self.nodes["forwarder"],
            self.nodes["gateway"],
            self.nodes["node"],
        )

        if cfg.loss_model == "per_link_direction":
            loss1: float | dict = cfg.loss
            loss2: float | dict = cfg.loss
        else:  # end_to_end: a packet crossing the fast segment sees one draw
            loss1, loss2 = cfg.loss, 0.0
        self.link_cf = InternetLink(
            "consumer-forwarder",
            self.engine,
            self.recorder,
            consumer,
            forwarder,
            delay_s=cfg.internet_delay_s,
            loss_prob=loss1,
            loss_rng=derived_stream(cfg.seed, "loss:consumer-forwarder"),
        )
        self.link_fg = InternetLink(
            "forwarder-gateway",
            self.engine,
            self.recorder,
            forwarder,
            gateway,
            delay_s=cfg.internet_delay_s,
            loss_prob=loss2,
            loss_rng=derived_stream(cfg.seed, "loss:forwarder-gateway"),
        )
        self.assignment = assign_slots(
            "node", self.timing, cfg.dsme, derived_stream(cfg.seed, "slots")
        )
        if cfg.ideal_lora:
            self.link_lora = IdealLink(
                LORA_LINK_NAME, self.engine, self.recorder, gateway, node
            )
            gateway_lora_face = self.link_lora.face_a
            node_lora_face = self.link_lora.face_b
        else:
            self.link_lora = LoraLink(
                LORA_LINK_NAME,
                self.engine,
                self.recorder,
                gateway,
                node,
                self.timing,
                self.assignment,
            )
            gateway_lora_face = self.link_lora.gateway_face
            node_lora_face = self.link_lora.node_face

        prefix = Name.parse(cfg.node_prefix)
        phone_target = Name.parse(cfg.phone_home_target)

        # Static routes: content names route up toward the gateway, the
        # phone-home namespace routes down toward the consumer. The gateway's
        # route to the node is installed by registration, not statically.
        consumer.forwarder.fib_add(prefix, self.link_cf.face_a)
        forwarder.forwarder.fib_add(prefix, self.link_fg.face_a)
        gateway.forwarder.fib_add(phone_target, self.link_fg.face_b)
        forwarder.forwarder.fib_add(phone_target, self.link_cf.face_b)

        wait_estimate = (
            cfg.wait_estimate_s
            if cfg.wait_estimate_s is not None
            else static_wait_estimate(self.timing, cfg.internet_allowance_s)
        )
        self.gateway_logic = Gateway(
            gateway,
            _GATEWAY_MODES[cfg.scenario],
            nonce_fn=_nonce_fn(cfg.seed, "gateway-app"),
            wait_estimate_s=wait_estimate,
            phone_home_target=phone_target,
        )
        self.gateway_logic.lora_faces = {gateway_lora_face}
        self.gateway_logic.internet_faces = {self.link_fg.face_b}

        push_mode = cfg.scenario == "reflexive_push"
        ring = None
        if cfg.scenario == "delay_tolerant":
            ring = RetryRing(cfg.retry_ring_capacity, cfg.retry_ring_timeout_s)
        self.consumer_app = ConsumerApp(
            consumer,
            self.recorder,
            consumer_lifetime_s=timers["consumer"].pit_timeout_s,
            nonce_fn=_nonce_fn(cfg.seed, "consumer-app"),
            ring=ring,
            final_ack=cfg.final_ack,
        )
        consumer.forwarder.add_app_prefix(phone_target)

        self.producer_app = ProducerApp(
            node,
            self.recorder,
            prefix=prefix,
            lora_face=node_lora_face,
            nonce_fn=_nonce_fn(cfg.seed, "producer-app"),
            value_rng=derived_stream(cfg.seed, "values"),
        )

        workload = Workload(
            requests=cfg.requests,
            interval_mean_s=cfg.interval_mean_s,
            interval_jitter_s=cfg.interval_jitter_s,
            start_s=cfg.workload_start_s,
        )
        times = workload.times(derived_stream(cfg.seed, "workload"))
        names = [prefix.child(str(i)) for i in range(cfg.requests)]
        schedule = list(zip(names, times))
        self._last_workload_at = times[-1] if times else cfg.workload_start_s

        self.engine.schedule(self.start_time + 0.5, self.producer_app.register)
        if push_mode:
            self.producer_app.start_pushes(schedule)
        else:
            self.consumer_app.start_requests(schedule)

    # -- execution ---------------------------------------------------------------

    def run(self) -> MetricsReport:
        self.engine.run()
        finished_at = max(self.engine.now, self._last_workload_at + self.config.drain_s)
        return build_report(self.recorder, self.config, finished_at)


def run(config: ScenarioConfig) -> MetricsReport:
    """Execute one scenario; deterministic in (config, seed)."""
    return Simulation(config).run()


def _nonce_fn(seed: int, label: str):
    rng = derived_stream(seed, f"nonce:{label}")
    return lambda: rng.getrandbits(32)
