"""The event-sourced service, driven over HTTP.

Every mutation is computed once, appended to the event log, then applied
to in-memory state.  Replaying the log into a fresh service reconstructs
a state-hash-identical copy: images, names, energies, leaderboards.
"""

from fastapi.testclient import TestClient

from ganimals.service import Service, ServiceConfig, StepClock, create_app

config = ServiceConfig(n_worlds=2, seed_set_size=8, resolution=32, master_seed=5)
service = Service(config, clock=StepClock())

with TestClient(create_app(service)) as client:
    user = {"user_id": "demo-user"}
    world_id = client.post("/api/assign", json=user).json()["world_id"]
    print(f"assigned to {world_id}")

    creature = None
    while creature is None or not creature["new"]:
        creature = client.post("/api/discover", json=user).json()
    print(f"discovered {creature['id'][:12]}... via {creature['procedure']}")

    fed = client.post(
        "/api/feed", json={"user_id": "demo-user", "ganimal_id": creature["id"]}
    ).json()
    print(f"kept it: adopted={fed['adopted']}, energy={fed['energy']}")

    client.post(
        "/api/annotate",
        json={
            "user_id": "demo-user",
            "ganimal_id": creature["id"],
            "ratings": {"cute": 7, "memorable": 6},
            "morphology": {"has_eyes": True, "lives_underwater": False},
        },
    )

    world = client.get("/api/world/demo-user").json()
    parents = [p["ganimal_id"] for p in world["population"][:2]]
    child = client.post(
        "/api/breed",
        json={
            "user_id": "demo-user",
            "parent_a": parents[0],
            "parent_b": parents[1],
            "name": "Pufferdoodle",
        },
    ).json()
    print(f"bred {child['name']} ({child['generation']}), lineage {len(child['lineage'])} parents")

    permalink = client.get(child["permalink"]).json()
    print(f"permalink {child['permalink'][:20]}... -> {permalink['name']}")

    image = client.get(child["image"]["uri"])
    print(f"image: {image.headers['content-type']}, {len(image.content)} bytes")

    board = client.get(
        "/api/leaderboard", params={"user_id": "demo-user", "characteristic": "cute"}
    ).json()
    print(f"cute leaderboard has {len(board['entries'])} entries")

# rebuild purely from the recorded facts
replica = Service.replay(config, service.log.events, clock=StepClock())
print(f"\nevents recorded: {service.log.next_sequence}")
print(f"replayed state hash matches: {replica.state_hash() == service.state_hash()}")
