import pytest
from fastapi.testclient import TestClient

from sdwanlab.gateway.api import create_app

from conftest import SDWAN, TRADITIONAL


@pytest.fixture()
def client():
    app = create_app(str(SDWAN))
    with TestClient(app) as test_client:
        yield test_client


def onboard_all(client):
    for serial in ("E40", "E50"):
        response = client.post("/api/v1/onboard", json={"serial": serial})
        assert response.status_code == 200, response.text
    for serial, template in (("E40", "branch3"), ("E50", "branch4")):
        response = client.post(f"/api/v1/templates/{template}/push",
                               json={"serial": serial})
        assert response.status_code == 200, response.text


class TestDeviceEndpoints:
    def test_inventory_lists_five_devices(self, client):
        devices = client.get("/api/v1/devices").json()
        assert len(devices) == 5
        roles = {d["serial"]: d["role"] for d in devices}
        assert roles == {"MGMT-1": "manage", "BOND-1": "bond",
                         "SMART-1": "smart", "E40": "edge", "E50": "edge"}

    def test_full_onboarding_shows_all_managed_or_synced(self, client):
        onboard_all(client)
        devices = client.get("/api/v1/devices").json()
        states = {d["serial"]: d["state"] for d in devices}
        assert states["E40"] == "managed"
        assert states["E50"] == "managed"
        assert states["MGMT-1"] == states["BOND-1"] == states["SMART-1"] == "synced"
        assert all(d["reachability"] == "reachable" for d in devices)

    def test_hardware_fields_within_range(self, client):
        sample = client.get("/api/v1/devices/E40/hardware").json()
        assert 0 <= sample["cpu_pct"] <= 100
        assert 0 <= sample["mem_pct"] <= 100
        assert sample["num_cpus"] == 2

    def test_routes_endpoint_returns_rib(self, client):
        routes = client.get("/api/v1/devices/E40/routes").json()["routes"]
        assert any(r["prefix"] == "10.2.0.0/16" and r["source"] == "static"
                   for r in routes)

    def test_unknown_device_404(self, client):
        assert client.get("/api/v1/devices/E99/hardware").status_code == 404
        assert client.get("/api/v1/devices/E99/routes").status_code == 404


class TestOnboardingEndpoints:
    def test_unlisted_serial_409_serial_not_allowed(self, client):
        response = client.post("/api/v1/onboard", json={"serial": "EVIL"})
        assert response.status_code == 409
        assert response.json()["error"] == "SerialNotAllowed"

    def test_missing_serial_400(self, client):
        assert client.post("/api/v1/onboard", json={}).status_code == 400

    def test_push_to_unsynced_device_409(self, client):
        response = client.post("/api/v1/templates/branch3/push",
                               json={"serial": "E40"})
        assert response.status_code == 409
        assert response.json()["error"] == "DeviceNotSynced"

    def test_push_with_missing_variable_400(self, client):
        client.post("/api/v1/onboard", json={"serial": "E40"})
        response = client.post(
            "/api/v1/templates/branch3/push",
            json={"serial": "E40", "variables": {"hostname": ""}})
        # hostname override empty is fine; drop a required one instead
        document = client.get("/api/v1/templates/branch3").json()
        bad = {"id": "incomplete", "name": "x",
               "variables": {"missing_var": "string"},
               "features": [{"kind": "system",
                             "parameters": {"host_name": "${missing_var}",
                                            "system_id": "1.1.1.1",
                                            "site_id": 1}}]}
        assert client.post("/api/v1/templates", json=bad).status_code == 201
        response = client.post("/api/v1/templates/incomplete/push",
                               json={"serial": "E40", "variables": {}})
        assert response.status_code == 400
        assert response.json()["error"] == "CompileError"

    def test_exec_endpoint_enforces_lockdown(self, client):
        onboard_all(client)
        response = client.post("/api/v1/devices/E40/exec",
                               json={"command": "set-hostname hacked"})
        assert response.status_code == 409
        assert response.json()["error"] == "PermissionDenied"
        response = client.post("/api/v1/devices/E40/exec",
                               json={"command": "show-system"})
        assert response.status_code == 200


class TestTemplateEndpoints:
    def test_canonical_templates_preloaded(self, client):
        ids = {t["id"] for t in client.get("/api/v1/templates").json()}
        assert {"branch3", "branch4"} <= ids

    def test_create_template_validates(self, client):
        bad = {"id": "broken", "features": []}
        response = client.post("/api/v1/templates", json=bad)
        assert response.status_code == 400
        assert "missing system feature" in response.json()["detail"]

    def test_unknown_template_404(self, client):
        assert client.get("/api/v1/templates/none").status_code == 404
        response = client.post("/api/v1/templates/none/push",
                               json={"serial": "E40"})
        assert response.status_code == 404


class TestExperiments:
    def test_ping_experiment_round_trip(self, client):
        response = client.post("/api/v1/experiments/ping",
                               json={"src": "manage", "dst": "E40",
                                     "count": 5, "seed": 3})
        assert response.status_code == 201
        body = response.json()
        assert body["report"]["received"] == 5
        report_id = body["id"]
        fetched = client.get(f"/api/v1/reports/{report_id}").json()
        assert fetched == body

    def test_ping_experiment_unknown_endpoint_404(self, client):
        response = client.post("/api/v1/experiments/ping",
                               json={"src": "manage", "dst": "nobody"})
        assert response.status_code == 404

    def test_compare_experiment_produces_three_paths(self, client):
        response = client.post(
            "/api/v1/experiments/compare",
            json={"traditional": str(TRADITIONAL), "sdwan": str(SDWAN),
                  "count": 5, "seed": 2, "name": "smoke"})
        assert response.status_code == 201
        report = response.json()["report"]
        assert len(report["paths"]) == 3
        for pair in report["paths"]:
            assert pair["sdwan"]["avg_rtt_ms"] > pair["traditional"]["avg_rtt_ms"]
        assert "smoke" in client.get("/api/v1/reports").json()

    def test_unknown_report_404(self, client):
        assert client.get("/api/v1/reports/none").status_code == 404


class TestReadPurity:
    def test_get_endpoints_do_not_mutate_state(self, client):
        sim = client.app.state.sim
        onboard_all(client)
        before = sim.state_digest()
        client.get("/api/v1/devices")
        client.get("/api/v1/devices/E40/hardware")
        client.get("/api/v1/devices/E40/routes")
        client.get("/api/v1/templates")
        client.get("/api/v1/templates/branch3")
        client.get("/api/v1/reports")
        client.get("/api/v1/scenario")
        assert sim.state_digest() == before

    def test_scenario_summary(self, client):
        body = client.get("/api/v1/scenario").json()
        assert body["name"] == "sdwan"
        assert body["sdwan"] is True
