import pytest
from fastapi.testclient import TestClient

from tests.conftest import SAMPLE_CVML
from versa.service import AppState, create_app


@pytest.fixture
def client():
    return TestClient(create_app(AppState()))


def upload_sample(client, statics=None):
    body = {"cvml": SAMPLE_CVML}
    if statics:
        body["statics"] = statics
    resp = client.post("/datasets", json=body)
    assert resp.status_code == 200
    return resp.json()


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["status"] == "ok" and payload["version"] == 1


def test_upload_and_read_frames(client):
    payload = upload_sample(client)
    assert payload["dataset_id"] == "LeftBag"
    assert payload["frames"] == 2 and payload["high_water"] == 1

    resp = client.get("/datasets/LeftBag/frames/0")
    assert resp.status_code == 200
    entities = resp.json()["entities"]
    assert len(entities) == 3
    by_id = {e["id"]: e for e in entities}
    assert by_id[0]["box"] == {"x": 184.0, "y": 204.0, "w": 55.0, "h": 30.0}
    assert by_id[0]["type"] == "person"
    assert by_id[0]["orient"] == 165.0

    # frames above the high-water mark are not visible
    assert client.get("/datasets/LeftBag/frames/2").status_code == 404
    assert client.get("/datasets/missing/frames/0").status_code == 404

    resp = client.get("/datasets/LeftBag/range")
    assert resp.json() == {"version": 1, "min": 0, "max": 1}


def test_upload_rejects_bad_cvml(client):
    resp = client.post("/datasets", json={"cvml": "<video/>"})
    assert resp.status_code == 422
    assert "error" in resp.json()


def test_sketch_to_frame_template(client):
    resp = client.post(
        "/templates/frame",
        json={
            "template_id": "by_example",
            "entities": [
                {"id": "p1", "type": "person", "box": {"x": 50, "y": 50, "w": 20, "h": 40}},
                {"id": "o1", "type": "object", "box": {"x": 80, "y": 52, "w": 10, "h": 10}},
            ],
            "not_exists": ["bag"],
        },
    )
    assert resp.status_code == 200
    data = resp.json()
    assert data["id"] == "by_example"
    rels = {(r[0], r[1], r[2]) for r in data["relations"]}
    assert ("near", "P1", "O1") in rels
    assert ("moreLeft", "P1", "O1") in rels
    assert data["not_exists"] == ["Bag"]


def test_event_template_from_bars(client):
    step_template = {
        "id": "near",
        "types": [["person", "P"], ["object", "O"]],
        "relations": [["near", "P", "O"]],
    }
    resp = client.post(
        "/templates/event",
        json={
            "id": "staged",
            "steps": [
                {"id": "a", "template": step_template},
                {"id": "b", "template": step_template},
            ],
            "bars": [
                {"step_id": "a", "x0": 0, "x1": 10},
                {"step_id": "b", "x0": 20, "x1": 30},
            ],
        },
    )
    assert resp.status_code == 200
    constraints = {tuple(c) for c in resp.json()["constraints"]}
    assert ("int_before", "a", "b") in constraints


def test_detect_builtins_and_inline(client):
    upload_sample(client, statics=[{"id": "corner", "box": {"x": 75, "y": 70, "w": 60, "h": 60}}])
    # left_item: sample has no drop event
    resp = client.post("/detect", json={"dataset": "LeftBag", "event": "left_item", "mode": "all"})
    assert resp.status_code == 200
    assert resp.json()["detections"] == []
    # loitering needs area+duration
    resp = client.post("/detect", json={"dataset": "LeftBag", "event": "loitering_in"})
    assert resp.status_code == 422
    resp = client.post(
        "/detect",
        json={"dataset": "LeftBag", "event": "loitering_in", "area": "corner", "duration": 100},
    )
    assert resp.json()["detections"] == []
    # inline event template: persons 1 and 2 are near in both frames
    inline = {
        "id": "pair",
        "steps": [
            {
                "id": "s",
                "template": {
                    "id": "near_pair",
                    "types": [["person", "P"], ["person", "Q"]],
                    "relations": [["near", "P", "Q"], ["moreLeft", "P", "Q"]],
                },
            }
        ],
    }
    resp = client.post("/detect", json={"dataset": "LeftBag", "event": inline, "mode": "all"})
    assert resp.status_code == 200
    detections = resp.json()["detections"]
    assert len(detections) == 1
    assert detections[0]["steps"]["s"] == [0, 0]


def test_monitor_endpoints(client):
    upload_sample(client)
    template = {
        "id": "watch_pair",
        "steps": [
            {
                "id": "s",
                "template": {
                    "id": "near_pair",
                    "types": [["person", "P"], ["person", "Q"]],
                    "relations": [["near", "P", "Q"], ["moreLeft", "P", "Q"]],
                },
            }
        ],
    }
    resp = client.post("/monitor/templates", json={"dataset": "LeftBag", "template": template})
    assert resp.status_code == 200
    assert resp.json()["registered"] == "watch_pair"

    resp = client.get("/monitor/detections")
    assert resp.status_code == 200
    payload = resp.json()
    assert len(payload["detections"]) == 1
    assert payload["detections"][0]["event"] == "watch_pair"
    cursor = payload["next"]

    # polling again returns nothing new past the cursor
    resp = client.get("/monitor/detections", params={"since": cursor})
    assert resp.json()["detections"] == []

    assert client.delete("/monitor/templates/watch_pair").status_code == 200
    assert client.delete("/monitor/templates/watch_pair").status_code == 404
