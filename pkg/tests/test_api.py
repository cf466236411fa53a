import pytest
from fastapi.testclient import TestClient

from ganimals.service import Service, ServiceConfig, StepClock, create_app

SMALL = ServiceConfig(n_worlds=2, seed_set_size=8, resolution=16, master_seed=7)


@pytest.fixture()
def client():
    service = Service(SMALL, clock=StepClock())
    with TestClient(create_app(service)) as c:
        c.service = service
        yield c


def discover_new(client, user_id, limit=50):
    for _ in range(limit):
        out = client.post("/api/discover", json={"user_id": user_id}).json()
        if out["new"]:
            return out
    raise AssertionError("no fresh discovery within limit")


def other_world_user(client, world_id):
    for i in range(40):
        uid = f"probe{i}"
        r = client.post("/api/assign", json={"user_id": uid}).json()
        if r["world_id"] != world_id:
            return uid
    raise AssertionError("single-world hash pattern")


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "worlds": 2}


def test_full_flow(client):
    uid = "flow-user"
    r = client.post("/api/assign", json={"user_id": uid})
    assert r.status_code == 200
    wid = r.json()["world_id"]

    found = discover_new(client, uid)
    gid = found["id"]
    assert found["served_world_id"] == wid
    assert found["generation"] == "G1"

    r = client.post("/api/feed", json={"user_id": uid, "ganimal_id": gid})
    assert r.status_code == 200
    assert r.json()["adopted"] is True

    r = client.post(
        "/api/annotate",
        json={"user_id": uid, "ganimal_id": gid, "ratings": {"cute": 7, "creepy": 1}},
    )
    assert r.status_code == 200

    r = client.get("/api/leaderboard", params={"user_id": uid, "characteristic": "cute"})
    assert r.status_code == 200
    entries = r.json()["entries"]
    assert entries[0]["ganimal_id"] == gid

    r = client.get(f"/api/world/{uid}")
    assert r.status_code == 200
    view = r.json()
    assert any(p["ganimal_id"] == gid for p in view["population"])

    seed = [p["ganimal_id"] for p in view["population"] if p["ganimal_id"] != gid][:2]
    r = client.post(
        "/api/breed",
        json={"user_id": uid, "parent_a": seed[0], "parent_b": seed[1], "name": "Apiling"},
    )
    assert r.status_code == 200
    child = r.json()
    assert child["generation"] == "G2"
    assert child["name"] == "Apiling"

    r = client.get(child["permalink"])
    assert r.status_code == 200
    assert r.json()["id"] == child["id"]

    r = client.get(child["image"]["uri"])
    assert r.status_code == 200
    assert r.headers["content-type"] == "image/png"
    assert r.content[:8] == b"\x89PNG\r\n\x1a\n"

    r = client.post("/api/tick", json={})
    assert r.status_code == 200
    assert wid in r.json()["ticks"]


def test_feed_unknown_is_404(client):
    client.post("/api/assign", json={"user_id": "u"})
    r = client.post("/api/feed", json={"user_id": "u", "ganimal_id": "ghost"})
    assert r.status_code == 404
    assert r.json()["detail"]


def test_feed_after_removal_is_404():
    import dataclasses

    cfg = dataclasses.replace(SMALL, decay=0.6)
    service = Service(cfg, clock=StepClock())
    with TestClient(create_app(service)) as client:
        uid = "u"
        wid = client.post("/api/assign", json={"user_id": uid}).json()["world_id"]
        gid = service.worlds[wid].seed_set[0]
        client.post("/api/tick", json={})
        client.post("/api/tick", json={})
        r = client.post("/api/feed", json={"user_id": uid, "ganimal_id": gid})
        assert r.status_code == 404


def test_cross_world_feed_is_404(client):
    uid = "u"
    wid = client.post("/api/assign", json={"user_id": uid}).json()["world_id"]
    other = other_world_user(client, wid)
    foreign = client.service.worlds[client.service.users[other]].seed_set[0]
    r = client.post("/api/feed", json={"user_id": uid, "ganimal_id": foreign})
    assert r.status_code == 404


def test_cross_world_annotate_is_403(client):
    uid = "u"
    wid = client.post("/api/assign", json={"user_id": uid}).json()["world_id"]
    other = other_world_user(client, wid)
    foreign = client.service.worlds[client.service.users[other]].seed_set[0]
    r = client.post(
        "/api/annotate", json={"user_id": uid, "ganimal_id": foreign, "ratings": {"cute": 4}}
    )
    assert r.status_code == 403
    assert r.json()["error"] == "NotInWorld"


def test_cross_world_breed_is_403(client):
    uid = "u"
    wid = client.post("/api/assign", json={"user_id": uid}).json()["world_id"]
    other = other_world_user(client, wid)
    local = client.service.worlds[wid].seed_set[0]
    foreign = client.service.worlds[client.service.users[other]].seed_set[0]
    r = client.post(
        "/api/breed", json={"user_id": uid, "parent_a": local, "parent_b": foreign}
    )
    assert r.status_code == 403


def test_breed_unknown_parent_is_404(client):
    uid = "u"
    wid = client.post("/api/assign", json={"user_id": uid}).json()["world_id"]
    local = client.service.worlds[wid].seed_set[0]
    r = client.post("/api/breed", json={"user_id": uid, "parent_a": local, "parent_b": "ghost"})
    assert r.status_code == 404


def test_breed_identical_parents_is_409(client):
    uid = "u"
    wid = client.post("/api/assign", json={"user_id": uid}).json()["world_id"]
    local = client.service.worlds[wid].seed_set[0]
    r = client.post("/api/breed", json={"user_id": uid, "parent_a": local, "parent_b": local})
    assert r.status_code == 409
    assert r.json()["error"] == "IdenticalParents"


def test_breed_wrong_generation_is_422(client):
    uid = "u"
    wid = client.post("/api/assign", json={"user_id": uid}).json()["world_id"]
    pa, pb, pc = client.service.worlds[wid].seed_set[:3]
    child = client.post(
        "/api/breed", json={"user_id": uid, "parent_a": pa, "parent_b": pb}
    ).json()
    r = client.post(
        "/api/breed", json={"user_id": uid, "parent_a": child["id"], "parent_b": pc}
    )
    assert r.status_code == 422
    assert r.json()["error"] == "WrongGeneration"


def test_annotate_malformed_is_400(client):
    uid = "u"
    wid = client.post("/api/assign", json={"user_id": uid}).json()["world_id"]
    gid = client.service.worlds[wid].seed_set[0]
    r = client.post(
        "/api/annotate", json={"user_id": uid, "ganimal_id": gid, "ratings": {"cute": 9}}
    )
    assert r.status_code == 400
    assert r.json()["error"] == "RatingOutOfRange"
    r = client.post(
        "/api/annotate", json={"user_id": uid, "ganimal_id": gid, "ratings": {"shiny": 4}}
    )
    assert r.status_code == 400
    r = client.post("/api/annotate", json={"user_id": uid, "ganimal_id": gid})
    assert r.status_code == 400
    assert r.json()["error"] == "EmptyRecord"


def test_stats_insufficient_is_409(client):
    r = client.get("/api/stats", params={"metric": "cute", "predicate": "contains_dog"})
    assert r.status_code == 409
    assert r.json()["error"] == "InsufficientData"


def test_stats_unknown_predicate_is_400(client):
    r = client.get("/api/stats", params={"metric": "cute", "predicate": "contains_unicorn"})
    assert r.status_code == 400


def test_stats_happy_path():
    from ganimals.service import simulate_service

    service = simulate_service(SMALL, n_users=10, n_steps=30, seed=5)
    with TestClient(create_app(service)) as client:
        r = client.get("/api/stats", params={"metric": "cute", "predicate": "contains_dog"})
        assert r.status_code == 200
        body = r.json()
        assert body["predicate"] == "contains_dog"
        assert body["n_with"] >= 2
        assert 0.0 <= body["p_value"] <= 1.0


def test_unknown_permalink_is_404(client):
    assert client.get("/g/does-not-exist").status_code == 404


def test_missing_image_is_404(client):
    assert client.get("/images/" + "0" * 64 + ".png").status_code == 404


def test_leaderboard_unknown_characteristic_is_400(client):
    r = client.get("/api/leaderboard", params={"user_id": "u", "characteristic": "fiery"})
    assert r.status_code == 400


def test_tick_unknown_world_is_400(client):
    r = client.post("/api/tick", json={"world_id": "w99"})
    assert r.status_code == 400


def test_missing_body_is_422(client):
    assert client.post("/api/assign", json={}).status_code == 422
    assert client.post("/api/feed", json={"user_id": "u"}).status_code == 422
