import math
import random

import pytest

from dticn.dsme import (
    DsmeConfig,
    SlotAssignment,
    assign_slots,
    derive_timing,
    next_cap_tx,
    next_data_tx,
    next_interest_tx,
    next_push_tx,
)

DEFAULTS = DsmeConfig()
TIMING = derive_timing(DEFAULTS)


def brute_force_next(now: float, offset: float, period: float) -> float:
    """Independent oracle: scan the slot grid for the first opportunity >= now."""
    k = math.floor((now - offset) / period) - 2
    while True:
        t = offset + k * period
        if t >= now - 1e-9:
            return t
        k += 1


class TestDeriveTiming:
    def test_default_multisuperframe_exact(self):
        assert TIMING.multisuperframe_s == 30.72

    def test_default_cells_exact(self):
        assert TIMING.total_cells == 448
        assert TIMING.superframes_per_msf == 4

    def test_default_superframe_and_slot(self):
        assert TIMING.superframe_s == pytest.approx(7.68, abs=1e-12)
        assert TIMING.slot_s == pytest.approx(0.48, abs=1e-12)

    def test_single_channel_cells(self):
        cfg = DsmeConfig(so=3, mo=5, channels=1, cfp_slots_per_superframe=7)
        assert derive_timing(cfg).total_cells == 28

    def test_rejects_so_above_mo(self):
        with pytest.raises(ValueError):
            DsmeConfig(so=6, mo=5)

    def test_rejects_mo_above_bo(self):
        with pytest.raises(ValueError):
            DsmeConfig(mo=6, bo=5)

    def test_lower_mo_halves_msf(self):
        timing = derive_timing(DsmeConfig(mo=4, bo=5))
        assert timing.multisuperframe_s == pytest.approx(15.36, abs=1e-12)
        assert timing.superframes_per_msf == 2

    def test_pure_and_total_on_valid_configs(self):
        rng = random.Random(99)
        for _ in range(300):
            so = rng.randint(0, 10)
            mo = rng.randint(so, 12)
            bo = rng.randint(mo, 15)
            cfg = DsmeConfig(
                symbol_time_s=rng.choice([0.5e-3, 1.024e-3, 2.048e-3]),
                so=so,
                mo=mo,
                bo=bo,
                channels=rng.randint(1, 16),
                cfp_slots_per_superframe=rng.randint(1, 14),
            )
            first = derive_timing(cfg)
            second = derive_timing(cfg)
            assert first == second
            assert first.multisuperframe_s > 0
            assert first.slot_s > 0
            assert (
                first.total_cells
                == first.superframes_per_msf * cfg.cfp_slots_per_superframe * cfg.channels
            )


def make_assignment(interest_offset: float) -> SlotAssignment:
    return SlotAssignment(
        node_id="node",
        interest_slot_offset_s=interest_offset,
        data_slot_offset_s=interest_offset + TIMING.slot_s,
        push_slot_offset_s=interest_offset,
        cap_offset_s=TIMING.slot_s,
    )


class TestNextInterestTx:
    def test_waits_for_next_cycle(self):
        # Oracle scan: smallest 10.0 + k * 30.72 at or after 40.0 is 40.72.
        a = make_assignment(10.0)
        expected = brute_force_next(40.0, 10.0, TIMING.multisuperframe_s)
        assert expected == pytest.approx(40.72, abs=1e-9)
        assert next_interest_tx(40.0, a, TIMING) == pytest.approx(expected, abs=1e-9)

    def test_boundary_inclusion(self):
        a = make_assignment(10.0)
        assert next_interest_tx(10.0, a, TIMING) == pytest.approx(10.0, abs=1e-9)
        assert next_interest_tx(10.0 + TIMING.multisuperframe_s, a, TIMING) == pytest.approx(
            10.0 + TIMING.multisuperframe_s, abs=1e-9
        )

    def test_matches_oracle_at_random_times(self):
        rng = random.Random(5)
        a = make_assignment(12.34)
        for _ in range(500):
            now = rng.uniform(-100.0, 1000.0)
            assert next_interest_tx(now, a, TIMING) == pytest.approx(
                brute_force_next(now, 12.34, TIMING.multisuperframe_s), abs=1e-6
            )

    def test_uniform_wait_mean(self):
        # Uniform random arrivals wait U[0, msf); empirical mean within 2%.
        rng = random.Random(31337)
        a = make_assignment(4.8)
        waits = []
        for _ in range(10_000):
            now = rng.uniform(0.0, 50_000.0)
            waits.append(next_interest_tx(now, a, TIMING) - now)
        mean = sum(waits) / len(waits)
        assert mean == pytest.approx(TIMING.multisuperframe_s / 2, rel=0.02)
        assert all(0.0 <= w < TIMING.multisuperframe_s + 1e-6 for w in waits)

    def test_uniform_wait_ks(self):
        # Kolmogorov-Smirnov against U[0, msf) at alpha = 0.01, iid arrivals.
        rng = random.Random(2718)
        a = make_assignment(9.6)
        msf = TIMING.multisuperframe_s
        waits = sorted(
            next_interest_tx(now, a, TIMING) - now
            for now in (rng.uniform(0.0, 100_000.0) for _ in range(2000))
        )
        n = len(waits)
        d_stat = max(
            max((i + 1) / n - w / msf, w / msf - i / n) for i, w in enumerate(waits)
        )
        assert d_stat < 1.628 / math.sqrt(n)


class TestNextDataTx:
    def test_adjacent_slot_delivery(self):
        # Interest delivered at slot end 10.48 -> data departs 10.48, lands 10.96.
        a = make_assignment(10.0)
        depart = next_data_tx(10.48, a, TIMING)
        assert depart == pytest.approx(10.48, abs=1e-9)
        assert depart + TIMING.slot_s == pytest.approx(10.96, abs=1e-9)

    def test_rejects_unaligned_times(self):
        a = make_assignment(10.0)
        with pytest.raises(ValueError):
            next_data_tx(20.0, a, TIMING)

    def test_round_trip_bound(self):
        # Once the Interest slot is reached the exchange takes two slots.
        a = make_assignment(7.2)
        depart_i = next_interest_tx(100.0, a, TIMING)
        rx_i = depart_i + TIMING.slot_s
        rx_d = next_data_tx(rx_i, a, TIMING) + TIMING.slot_s
        assert rx_d - depart_i == pytest.approx(2 * TIMING.slot_s, abs=1e-9)


class TestPushAndCap:
    def test_push_period_is_msf(self):
        a = make_assignment(3.36)
        first = next_push_tx(0.0, a, TIMING)
        second = next_push_tx(first + 1e-3, a, TIMING)
        assert second - first == pytest.approx(TIMING.multisuperframe_s, abs=1e-9)

    def test_push_bound_one_msf(self):
        rng = random.Random(8)
        a = make_assignment(3.36)
        for _ in range(200):
            now = rng.uniform(0, 1000)
            assert next_push_tx(now, a, TIMING) - now < TIMING.multisuperframe_s + 1e-6

    def test_cap_period_is_superframe(self):
        a = make_assignment(3.36)
        first = next_cap_tx(0.0, a, TIMING)
        second = next_cap_tx(first + 1e-3, a, TIMING)
        assert second - first == pytest.approx(TIMING.superframe_s, abs=1e-9)

    def test_grid_extends_below_zero(self):
        a = make_assignment(10.0)
        t = next_interest_tx(-70.0, a, TIMING)
        assert t < 0 and t >= -70.0


class TestAssignSlots:
    def test_offsets_inside_msf_and_adjacent(self):
        rng = random.Random(77)
        for _ in range(200):
            a = assign_slots("node", TIMING, DEFAULTS, rng)
            assert 0 <= a.interest_slot_offset_s < TIMING.multisuperframe_s
            assert 0 <= a.push_slot_offset_s < TIMING.multisuperframe_s
            assert a.data_slot_offset_s - a.interest_slot_offset_s == pytest.approx(
                TIMING.slot_s, abs=1e-9
            )
            # The data slot stays inside the same superframe.
            sf_i = int(a.interest_slot_offset_s // TIMING.superframe_s)
            sf_d = int((a.data_slot_offset_s - 1e-9) // TIMING.superframe_s)
            assert sf_i == sf_d

    def test_slots_fall_in_cfp(self):
        rng = random.Random(78)
        cfp_start = (16 - DEFAULTS.cfp_slots_per_superframe) * TIMING.slot_s
        for _ in range(100):
            a = assign_slots("node", TIMING, DEFAULTS, rng)
            within_sf = a.interest_slot_offset_s % TIMING.superframe_s
            assert within_sf >= cfp_start - 1e-9
