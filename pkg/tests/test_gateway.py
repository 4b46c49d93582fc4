import itertools

import pytest

from dticn.core import Name, PacketKind, Payload, PayloadKind, data, interest
from dticn.dsme import DsmeConfig, derive_timing
from dticn.engine import Engine
from dticn.forwarder import Drop, Forwarder, Send, TimerConfig
from dticn.gateway import Gateway, GatewayMode, static_wait_estimate
from dticn.metrics import Recorder
from dticn.node import Node


def n(text: str) -> Name:
    return Name.parse(text)


class CaptureLink:
    def __init__(self):
        self.sent = []

    def send(self, from_node, pkt):
        self.sent.append(pkt)


def make_gateway(mode=GatewayMode.DELAY_TOLERANT, pit=60.0, attempts=0, wait=32.0):
    engine = Engine()
    recorder = Recorder()
    counter = itertools.count(1)
    fwd = Forwarder("gateway", TimerConfig(pit, attempts, 1.0 if attempts else 0.0), lambda: next(counter))
    node = Node("gateway", "gateway", engine, fwd, recorder)
    lora = CaptureLink()
    internet = CaptureLink()
    lora_face = node.bind_face(lora)
    internet_face = node.bind_face(internet)
    gw = Gateway(node, mode, nonce_fn=lambda: next(counter), wait_estimate_s=wait,
                 phone_home_target=n("/consumer/inbox"))
    gw.lora_faces = {lora_face}
    gw.internet_faces = {internet_face}
    return gw, node, lora, internet, lora_face, internet_face


def register_interest(prefix, nonce=1):
    return interest(n(prefix), nonce=nonce, lifetime_s=60.0, register=True)


class TestRegistration:
    def test_register_installs_fib_and_acks(self):
        gw, node, lora, _, lora_face, _ = make_gateway()
        actions = gw.handle(lora_face, register_interest("/n1"), 0.0)
        assert len(actions) == 1
        reply = actions[0]
        assert isinstance(reply, Send) and reply.face == lora_face
        assert reply.packet.payload.kind is PayloadKind.ACK
        route = node.forwarder.fib_lookup(n("/n1/5"), 0.0)
        assert route is not None and route.face == lora_face

    def test_reregistration_refreshes_and_acks(self):
        gw, node, _, _, lora_face, _ = make_gateway()
        gw.handle(lora_face, register_interest("/n1"), 0.0)
        actions = gw.handle(lora_face, register_interest("/n1", nonce=2), 5.0)
        assert actions[0].packet.payload.kind is PayloadKind.ACK
        assert gw.registrations[n("/n1")].registered_at == 5.0
        # No duplicate FIB entry accumulated.
        assert sum(1 for e in node.forwarder.fib if e.prefix == n("/n1")) == 1

    def test_prefix_owned_by_other_face_nacked(self):
        gw, node, _, _, lora_face, _ = make_gateway()
        other_face = node.bind_face(CaptureLink())
        gw.lora_faces.add(other_face)
        gw.handle(lora_face, register_interest("/n1"), 0.0)
        actions = gw.handle(other_face, register_interest("/n1", nonce=2), 1.0)
        assert actions[0].packet.payload.kind is PayloadKind.NACK


class TestDelayTolerantRetrieval:
    def test_unregistered_name_nacked_immediately(self):
        gw, _, _, _, _, internet_face = make_gateway()
        req = interest(n("/n9/1"), nonce=1, lifetime_s=4.0)
        actions = gw.handle(internet_face, req, 0.0)
        assert len(actions) == 1
        assert actions[0].face == internet_face
        assert actions[0].packet.payload.kind is PayloadKind.NACK
        assert actions[0].packet.no_cache

    def test_first_request_fetches_and_waits(self):
        gw, node, _, _, lora_face, internet_face = make_gateway()
        gw.handle(lora_face, register_interest("/n1"), 0.0)
        req = interest(n("/n1/5"), nonce=2, lifetime_s=4.0)
        actions = gw.handle(internet_face, req, 10.0)
        sends = {a.face: a.packet for a in actions if isinstance(a, Send)}
        assert sends[lora_face].kind is PacketKind.INTEREST
        wait = sends[internet_face]
        assert wait.payload.kind is PayloadKind.WAIT and wait.payload.wait_s == 32.0
        assert wait.no_cache
        # Custodial state: pending, but with no downstream consumers.
        entry = node.forwarder.pit[n("/n1/5")]
        assert entry.downstream_faces == set()
        assert entry.upstream_face == lora_face

    def test_repeat_request_rewaits_without_second_fetch(self):
        gw, _, _, _, lora_face, internet_face = make_gateway()
        gw.handle(lora_face, register_interest("/n1"), 0.0)
        gw.handle(internet_face, interest(n("/n1/5"), nonce=2, lifetime_s=4.0), 10.0)
        actions = gw.handle(internet_face, interest(n("/n1/5"), nonce=3, lifetime_s=4.0), 11.0)
        assert len(actions) == 1
        assert actions[0].packet.payload.kind is PayloadKind.WAIT

    def test_cache_hit_serves_value(self):
        gw, node, _, _, lora_face, internet_face = make_gateway()
        gw.handle(lora_face, register_interest("/n1"), 0.0)
        value = data(n("/n1/5"), Payload.make_value(7))
        node.forwarder.cs_insert(value, 5.0)
        actions = gw.handle(internet_face, interest(n("/n1/5"), nonce=2, lifetime_s=4.0), 10.0)
        assert actions == [Send(internet_face, value)]

    def test_fetched_value_cached_not_flooded_downstream(self):
        gw, node, _, _, lora_face, internet_face = make_gateway()
        gw.handle(lora_face, register_interest("/n1"), 0.0)
        gw.handle(internet_face, interest(n("/n1/5"), nonce=2, lifetime_s=4.0), 10.0)
        value = data(n("/n1/5"), Payload.make_value(7))
        actions = node.forwarder.on_data(lora_face, value, 20.0)
        assert actions == []  # silently cached
        assert node.forwarder.cs_lookup(n("/n1/5"), 20.0) is value


class TestCustodianIngest:
    def test_registered_push_is_cached(self):
        gw, node, _, _, lora_face, _ = make_gateway(mode=GatewayMode.VANILLA)
        gw.handle(lora_face, register_interest("/n1"), 0.0)
        value = data(n("/n1/3"), Payload.make_value(1))
        actions = gw.handle(lora_face, value, 5.0)
        assert actions == []
        assert node.forwarder.cs_lookup(n("/n1/3"), 6.0) is value

    def test_unregistered_push_unauthorized(self):
        gw, node, _, _, lora_face, _ = make_gateway(mode=GatewayMode.REFLEXIVE_PUSH)
        actions = gw.handle(lora_face, data(n("/n9/1"), Payload.make_value(1)), 5.0)
        assert len(actions) == 1 and isinstance(actions[0], Drop)
        assert actions[0].reason == "unauthorized"
        assert node.forwarder.cs_lookup(n("/n9/1"), 6.0) is None

    def test_push_mode_triggers_indication(self):
        gw, node, _, internet, lora_face, internet_face = make_gateway(
            mode=GatewayMode.REFLEXIVE_PUSH, pit=4.0, attempts=3
        )
        node.forwarder.fib_add(n("/consumer"), internet_face)
        gw.handle(lora_face, register_interest("/n1"), 0.0)
        actions = gw.handle(lora_face, data(n("/n1/3"), Payload.make_value(1)), 5.0)
        node._dispatch(actions)
        assert len(internet.sent) == 1
        indication = internet.sent[0]
        assert indication.kind is PacketKind.INTEREST
        assert indication.reflexive
        assert indication.announced_name == n("/n1/3")
        assert indication.name == n("/consumer/inbox/n1/3")
        assert gw.indications_sent == 1

    def test_cs_overflow_evicts_lru(self):
        gw, node, _, _, lora_face, _ = make_gateway(mode=GatewayMode.VANILLA)
        node.forwarder.set_cs_capacity(2)
        gw.handle(lora_face, register_interest("/n1"), 0.0)
        for i, t in ((0, 1.0), (1, 2.0), (2, 3.0)):
            gw.handle(lora_face, data(n(f"/n1/{i}"), Payload.make_value(i)), t)
        assert node.forwarder.cs_lookup(n("/n1/0"), 4.0) is None
        assert node.forwarder.cs_lookup(n("/n1/2"), 4.0) is not None


class TestWaitEstimate:
    def test_default_configuration_gives_32s(self):
        timing = derive_timing(DsmeConfig())
        assert static_wait_estimate(timing) == pytest.approx(32.0, abs=1e-9)

    def test_halved_msf_estimate(self):
        # Oracle: 15.36 + 2 * 0.48 + 0.32 with the same allowance as defaults.
        timing = derive_timing(DsmeConfig(mo=4))
        assert static_wait_estimate(timing) == pytest.approx(16.64, abs=1e-9)

    def test_strictly_positive_for_valid_configs(self):
        import random

        rng = random.Random(3)
        for _ in range(100):
            so = rng.randint(0, 8)
            mo = rng.randint(so, 10)
            timing = derive_timing(DsmeConfig(so=so, mo=mo, bo=mo))
            assert static_wait_estimate(timing) > 0
