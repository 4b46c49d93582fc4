import pytest

from dticn.energy import EnergyModel, lifetime_days


class TestLifetimes:
    """Battery model validated against all four published rows (+-1 day)."""

    @pytest.mark.parametrize(
        "protocol,expected_days",
        [
            ("vanilla_no_mac", 10.0),
            ("vanilla_mac", 230.0),
            ("delay_tolerant", 230.0),
            ("reflexive_push", 384.0),
        ],
    )
    def test_table_rows_within_one_day(self, protocol, expected_days):
        assert abs(lifetime_days(protocol) - expected_days) <= 1.0

    def test_brute_force_oracle_agrees(self):
        # Independent arithmetic: battery joules / (per-msf joules * msf per day).
        model = EnergyModel()
        for protocol, mj in model.energy_mj_per_msf.items():
            joules_per_day = (mj / 1000.0) * (86400.0 / 30.72)
            expected = (2800.0 * 3.3 * 3.6) / joules_per_day
            assert model.lifetime_days(protocol) == pytest.approx(expected, rel=1e-12)

    def test_battery_energy(self):
        assert EnergyModel().battery_energy_j() == pytest.approx(33264.0)

    def test_unknown_protocol_rejected(self):
        with pytest.raises(KeyError):
            lifetime_days("carrier_pigeon")

    def test_all_energies_positive(self):
        model = EnergyModel()
        for protocol in model.protocols():
            assert model.energy_mj_per_msf[protocol] > 0
            assert model.lifetime_days(protocol) > 0

    def test_duty_cycled_mac_extends_lifetime_two_orders(self):
        no_mac = lifetime_days("vanilla_no_mac")
        with_mac = lifetime_days("vanilla_mac")
        assert with_mac / no_mac > 20
