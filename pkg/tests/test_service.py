import pytest
from fastapi.testclient import TestClient

from dticn.service.app import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


class TestHealthAndCatalog:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"

    def test_scenarios_catalog(self, client):
        response = client.get("/scenarios")
        assert response.status_code == 200
        names = [row["name"] for row in response.json()]
        assert names == [
            "vanilla1", "vanilla2", "vanilla3", "delay_tolerant", "reflexive_push"
        ]
        v1 = response.json()[0]
        assert v1["timers"]["consumer"] == "pit=4s retx=3:1"
        assert v1["timers"]["gateway"] == "pit=60s retx=0:0"


class TestRunEndpoint:
    def test_run_returns_summary_and_report(self, client):
        response = client.post(
            "/run",
            json={"scenario": "delay-tolerant", "retx": "inr", "requests": 40, "seed": 2},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["summary"]["scenario"] == "delay_tolerant"
        assert body["summary"]["success_rate"] == 1.0
        assert body["summary"]["tx_per_content"]["total"] == 10.0
        assert len(body["report"]["transactions"]) == 40

    def test_transactions_can_be_omitted(self, client):
        response = client.post(
            "/run",
            json={
                "scenario": "vanilla1",
                "requests": 20,
                "seed": 1,
                "include_transactions": False,
            },
        )
        assert response.status_code == 200
        assert response.json()["report"]["transactions"] == []

    def test_options_accepted(self, client):
        response = client.post(
            "/run",
            json={
                "scenario": "vanilla3",
                "retx": "cr",
                "requests": 20,
                "seed": 1,
                "options": {"ideal_lora": True},
            },
        )
        assert response.status_code == 200
        assert response.json()["summary"]["tx_per_content"]["total"] == 6.0

    def test_validation_error_on_bad_loss(self, client):
        response = client.post("/run", json={"scenario": "vanilla1", "loss": 1.5})
        assert response.status_code == 422

    def test_unknown_scenario_rejected(self, client):
        response = client.post("/run", json={"scenario": "vanilla9"})
        assert response.status_code == 422

    def test_bad_mac_orders_rejected(self, client):
        response = client.post(
            "/run",
            json={"scenario": "vanilla1", "requests": 5, "options": {"so": 9, "mo": 5}},
        )
        assert response.status_code == 400

    def test_identical_requests_identical_reports(self, client):
        payload = {"scenario": "reflexive-push", "requests": 30, "seed": 6}
        first = client.post("/run", json=payload).json()
        second = client.post("/run", json=payload).json()
        assert first == second


class TestSweepEndpoint:
    def test_sweep_aggregates(self, client):
        response = client.post(
            "/sweep",
            json={"scenario": "reflexive-push", "requests": 30, "seeds": [1, 2, 3]},
        )
        assert response.status_code == 200
        body = response.json()
        assert len(body["per_seed"]) == 3
        metrics = {a["metric"]: a for a in body["aggregates"]}
        assert metrics["success_rate"]["mean"] == 1.0
        assert metrics["tx_per_content_total"]["mean"] == 9.0

    def test_sweep_requires_seeds(self, client):
        response = client.post("/sweep", json={"scenario": "vanilla1", "seeds": []})
        assert response.status_code == 422


class TestEnergyEndpoint:
    def test_known_protocol(self, client):
        response = client.get("/energy/reflexive_push")
        assert response.status_code == 200
        body = response.json()
        assert body["energy_mj_per_msf"] == 30.83
        assert abs(body["lifetime_days"] - 384.0) <= 1.0

    def test_all_protocols(self, client):
        response = client.get("/energy")
        assert response.status_code == 200
        assert {row["protocol"] for row in response.json()} == {
            "vanilla_no_mac", "vanilla_mac", "delay_tolerant", "reflexive_push"
        }

    def test_unknown_protocol_404(self, client):
        assert client.get("/energy/morse_code").status_code == 404
