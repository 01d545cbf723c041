from fastapi.testclient import TestClient

import nomasim.service as service
from nomasim.montecarlo import EstimationError

client = TestClient(service.app)

SMALL = {
    "scenario": "siso",
    "m": 2,
    "trials": 400,
    "seed": 9,
    "sweep": {"start_db": 0, "stop_db": 10, "points": 2},
}


def test_health():
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_validate_endpoint():
    resp = client.post("/validate", json={"scenario": "comp", "m": 3})
    assert resp.status_code == 200
    body = resp.json()
    assert body["valid"] is True
    assert body["n_users"] == 7  # edge + 2 BS x 3 centres


def test_validate_rejects_unknown_field():
    resp = client.post("/validate", json={"scenario": "siso", "m": 2, "trails": 5})
    assert resp.status_code == 422
    assert "trails" in resp.text


def test_experiment_roundtrip():
    resp = client.post("/experiments", json=SMALL)
    assert resp.status_code == 200
    body = resp.json()
    assert body["scenario"] == "siso" and body["trials"] == 400
    assert len(body["points"]) == 2
    point = body["points"][0]
    assert set(point) == {"power_db", "c_eps_bpshz", "ci_halfwidth", "outage_at_ceps"}


def test_experiment_deterministic():
    a = client.post("/experiments", json=SMALL).json()
    b = client.post("/experiments", json=SMALL).json()
    assert a == b


def test_experiment_validation_error_names_field():
    resp = client.post("/experiments", json={**SMALL, "epsilon": 2.0})
    assert resp.status_code == 422
    assert "epsilon" in resp.text


def test_experiment_ignores_output_path(tmp_path):
    target = tmp_path / "should_not_exist.csv"
    resp = client.post("/experiments", json={**SMALL, "output": str(target)})
    assert resp.status_code == 200
    assert not target.exists()


def test_estimation_failure_maps_to_409(monkeypatch):
    def boom(cfg):
        raise EstimationError("zero outage count at p_t=40.00 dB")

    monkeypatch.setattr(service, "run_experiment", boom)
    resp = client.post("/experiments", json=SMALL)
    assert resp.status_code == 409
    assert "zero outage" in resp.json()["detail"]
