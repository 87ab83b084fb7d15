import pytest
from fastapi.testclient import TestClient

from holderlab.main import HISTOGRAM_API_MAX_N, app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_curve(client) -> None:
    r = client.post("/bounds/curve", json={"alphas": [0.2, 0.5, 0.8]})
    assert r.status_code == 200
    data = r.json()
    assert len(data["rows"]) == 3
    assert data["violations"] == []


def test_curve_rejects_grid_outside_unit_interval(client) -> None:
    r = client.post("/bounds/curve", json={"alphas": [0.0, 0.5]})
    assert r.status_code == 400


def test_invert(client) -> None:
    r = client.post("/bounds/invert", json={"kind": "lower_box", "alpha": 0.5})
    assert r.status_code == 200
    assert 0 < r.json()["t"] < 1 / 3
    r = client.post("/bounds/invert", json={"kind": "nonsense", "alpha": 0.5})
    assert r.status_code == 400


def test_phi_eval(client) -> None:
    r = client.post("/phi/eval", json={"blocks": "333"})
    assert r.status_code == 200
    assert r.json()["interval"] == ["6/7", "7/7"]
    r = client.post("/phi/eval", json={"blocks": "33"})
    assert r.status_code == 400


def test_histogram(client) -> None:
    r = client.get("/scheme/histogram/3")
    assert r.status_code == 200
    data = r.json()
    assert data["total"] == 147
    assert data["matches"]
    assert data["per_root"]["0"] == {"0": 1, "1": 12, "2": 36}
    r = client.get(f"/scheme/histogram/{HISTOGRAM_API_MAX_N + 1}")
    assert r.status_code == 400


def test_transition(client) -> None:
    r = client.post("/cross/transition", json={"m": 4, "L": 16, "alpha": 0.9})
    assert r.status_code == 200
    assert r.json()["phase"] == "thick"
    r = client.post("/cross/transition", json={"m": 1, "L": 16, "alpha": 0.9})
    assert r.status_code == 422


def test_cross_phi(client) -> None:
    r = client.post("/cross/phi", json={"m": 2, "x": "2/3"})
    assert r.status_code == 200
    assert r.json()["value"] == "1"
    r = client.post("/cross/phi", json={"m": 3, "digits": "4,(3)"})
    assert r.json()["value"] == "1/2"
    assert r.json()["approx"] == 0.5


def test_cross_phi_needs_one_input(client) -> None:
    assert client.post("/cross/phi", json={"m": 2}).status_code == 400
    both = {"m": 2, "x": "1/3", "digits": "(1)"}
    assert client.post("/cross/phi", json=both).status_code == 400
    assert client.post("/cross/phi", json={"m": 2, "x": "1/0"}).status_code == 400
