import json
from fractions import Fraction

import pytest

from ganimals import assign_user
from ganimals.errors import (
    ConfigError,
    IdenticalParents,
    InsufficientData,
    NotInWorld,
    ParseError,
    RatingOutOfRange,
    UnknownGanimal,
    ValidationError,
    WrongGeneration,
)
from ganimals.service import (
    Event,
    EventLog,
    Service,
    ServiceConfig,
    StepClock,
    event_from_json,
    event_json,
    iter_kind,
    load_config,
    read_events,
)

SMALL = ServiceConfig(n_worlds=2, seed_set_size=8, resolution=16, master_seed=7)


def small_service(**overrides):
    import dataclasses

    cfg = dataclasses.replace(SMALL, **overrides)
    return Service(cfg, clock=StepClock())


def two_users_in_different_worlds(service):
    by_world = {}
    for i in range(40):
        uid = f"probe{i}"
        wid = service.assign(uid)["world_id"]
        by_world.setdefault(wid, uid)
        if len(by_world) == 2:
            break
    worlds = sorted(by_world)
    return by_world[worlds[0]], by_world[worlds[1]]


def discover_new(service, user_id, limit=50):
    for _ in range(limit):
        out = service.discover(user_id)
        if out["new"]:
            return out
    raise AssertionError("no fresh discovery within limit")


# -- config ------------------------------------------------------------------


def test_config_defaults_valid():
    cfg = ServiceConfig().validate()
    assert cfg.n_worlds == 4
    assert cfg.mix == (0.30, 0.30, 0.30, 0.10)
    assert cfg.policy_mix().as_tuple() == cfg.mix
    assert cfg.to_dict()["mix"] == [0.30, 0.30, 0.30, 0.10]


@pytest.mark.parametrize(
    "field,value",
    [
        ("n_worlds", 0),
        ("mix", (0.5, 0.5, 0.5, 0.5)),
        ("leaderboard_k", 0),
        ("initial_energy", 0.0),
        ("decay", -1.0),
        ("feed_amount", 0.0),
        ("tick_seconds", -1.0),
        ("seed_set_size", -1),
        ("g0_truncation", 1.5),
        ("resolution", 0),
        ("backend_retries", 0),
        ("master_seed", -1),
    ],
)
def test_config_validation(field, value):
    import dataclasses

    with pytest.raises(ConfigError):
        dataclasses.replace(ServiceConfig(), **{field: value}).validate()


def test_load_config_file_and_env(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n_worlds": 2, "decay": 0.2, "mix": "0.25,0.25,0.25,0.25"}))
    cfg = load_config(path, env={})
    assert cfg.n_worlds == 2
    assert cfg.decay == 0.2
    assert cfg.mix == (0.25, 0.25, 0.25, 0.25)

    cfg = load_config(path, env={"GANIMALS_N_WORLDS": "3", "GANIMALS_DATA_DIR": ""})
    assert cfg.n_worlds == 3  # env wins over file
    assert cfg.data_dir is None

    assert load_config(None, env={}).n_worlds == 4


def test_load_config_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError):
        load_config(missing, env={})
    bad = tmp_path / "bad.json"
    bad.write_text("[1,2,3]")
    with pytest.raises(ConfigError):
        load_config(bad, env={})
    bad.write_text(json.dumps({"n_worlds": "many"}))
    with pytest.raises(ConfigError):
        load_config(bad, env={})
    bad.write_text(json.dumps({"warp_speed": 9}))
    with pytest.raises(ConfigError):
        load_config(bad, env={})


# -- events -------------------------------------------------------------------


def test_event_round_trip():
    event = Event(sequence_no=3, timestamp=1.5, kind="Fed", payload={"ganimal_id": "g"})
    line = event_json(event)
    assert event_from_json(line) == event
    assert "\n" not in line


def test_event_rejects_unknown_kind():
    with pytest.raises(ValidationError):
        Event(sequence_no=0, timestamp=0.0, kind="Exploded", payload={})


def test_event_from_json_errors():
    with pytest.raises(ParseError):
        event_from_json("not json")
    with pytest.raises(ParseError):
        event_from_json('{"sequence_no": 0}')


def test_event_log_file_round_trip(tmp_path):
    path = tmp_path / "events.jsonl"
    log = EventLog(path=path)
    log.append("UserAssigned", {"user_id": "u"}, 1.0)
    log.append("Ticked", {"world_id": "w0", "removed": []}, 2.0)
    log.close()
    events = read_events(path)
    assert [e.kind for e in events] == ["UserAssigned", "Ticked"]
    assert [e.sequence_no for e in events] == [0, 1]
    assert list(iter_kind(events, "Ticked")) == [events[1]]


def test_read_events_rejects_gap(tmp_path):
    path = tmp_path / "events.jsonl"
    e0 = Event(sequence_no=0, timestamp=0.0, kind="Named", payload={})
    e2 = Event(sequence_no=2, timestamp=0.0, kind="Named", payload={})
    path.write_text(event_json(e0) + "\n" + event_json(e2) + "\n")
    with pytest.raises(ParseError):
        read_events(path)


# -- service engine ------------------------------------------------------------


@pytest.fixture(scope="module")
def svc():
    return small_service()


def test_bootstrap_worlds(svc):
    assert sorted(svc.worlds) == ["w0", "w1"]
    for world in svc.worlds.values():
        assert len(world.seed_set) == 8
        assert all(world.is_alive(gid) for gid in world.seed_set)
        for gid in world.seed_set:
            assert gid in svc.ganimals
            assert svc.ganimals[gid].image.content_digest in svc.store
    kinds = [e.kind for e in svc.log.events[:2]]
    assert kinds == ["WorldCreated", "WorldCreated"]


def test_assign_stable_and_consistent(svc):
    out = svc.assign("alice")
    assert out == {"user_id": "alice", "world_id": f"w{assign_user('alice', 2)}"}
    assert svc.assign("alice") == out


def test_discover_new_payload(svc):
    out = discover_new(svc, "disco")
    assert set(out) >= {
        "id", "genome", "generation", "image", "permalink",
        "procedure", "new", "fallback", "served_world_id", "world_id",
    }
    assert out["generation"] == "G1"
    assert out["permalink"] == f"/g/{out['id']}"
    assert out["served_world_id"] == svc.users["disco"]
    assert out["id"] in svc.ganimals


def test_discover_counts_all_procedures():
    service = small_service()
    before = service.log.next_sequence
    for i in range(25):
        service.discover("scout")
    assert service.discovery_counts["scout"] == 25
    # one event per discovery plus the lazy user assignment
    assert service.log.next_sequence == before + 26


def test_discovery_stream_deterministic():
    a = [small_service().discover("same-user")["id"] for _ in range(1)]
    b = [small_service().discover("same-user")["id"] for _ in range(1)]
    assert a == b
    s1, s2 = small_service(), small_service()
    seq1 = [s1.discover("u")["id"] for _ in range(10)]
    seq2 = [s2.discover("u")["id"] for _ in range(10)]
    assert seq1 == seq2


def test_feed_flow(svc):
    uid = "feeder"
    wid = svc.assign(uid)["world_id"]
    gid = svc.worlds[wid].seed_set[0]
    before = svc.worlds[wid].population[gid].energy
    out = svc.feed_ganimal(uid, gid)
    assert out["adopted"] is False
    assert Fraction(out["energy_exact"]) == before + Fraction(0.25)
    out2 = svc.feed_ganimal(uid, gid)
    assert Fraction(out2["energy_exact"]) == before + 2 * Fraction(0.25)


def test_feed_adopts_discovered(svc):
    uid = "adopter"
    out = discover_new(svc, uid)
    gid = out["id"]
    wid = out["served_world_id"]
    assert not svc.worlds[wid].is_alive(gid)
    fed = svc.feed_ganimal(uid, gid)
    assert fed["adopted"] is True
    assert svc.worlds[wid].is_alive(gid)
    assert Fraction(fed["energy_exact"]) == Fraction(1) + Fraction(0.25)


def test_feed_errors():
    service = small_service()
    ua, ub = two_users_in_different_worlds(service)
    with pytest.raises(UnknownGanimal):
        service.feed_ganimal(ua, "no-such-id")
    foreign = service.worlds[service.users[ub]].seed_set[0]
    with pytest.raises(NotInWorld):
        service.feed_ganimal(ua, foreign)


def test_feed_after_removal_rejected():
    service = small_service(decay=0.6)
    uid = "mourner"
    wid = service.assign(uid)["world_id"]
    gid = service.worlds[wid].seed_set[0]
    service.tick_worlds()
    service.tick_worlds()  # 2 * 0.6 > 1.0 wipes the seed population
    assert gid in service.worlds[wid].removed
    with pytest.raises(NotInWorld):
        service.feed_ganimal(uid, gid)


def test_tick_removes_exactly_on_schedule():
    service = small_service()
    wid = "w0"
    expected_ticks = 4  # ceil(1.0 / 0.25) with decay 0.25
    service = small_service(decay=0.25)
    population = list(service.worlds[wid].population)
    for i in range(expected_ticks - 1):
        out = service.tick_worlds(wid)
        assert out["removed"][wid] == []
    out = service.tick_worlds(wid)
    assert sorted(out["removed"][wid]) == sorted(population)
    assert out["ticks"][wid] == expected_ticks
    assert service.worlds[wid].population == {}


def test_tick_rejects_unknown_world(svc):
    with pytest.raises(ValidationError):
        svc.tick_worlds("w99")


def test_breed_and_name():
    service = small_service()
    uid = "breeder"
    wid = service.assign(uid)["world_id"]
    pa, pb = service.worlds[wid].seed_set[:2]
    child = service.breed(uid, pa, pb, name="Pufferdoodle")
    assert child["generation"] == "G2"
    assert sorted(child["lineage"]) == sorted([pa, pb])
    assert child["name"] == "Pufferdoodle"
    assert child["permalink"] == f"/g/{child['id']}"
    assert service.get_ganimal(child["id"])["name"] == "Pufferdoodle"
    # symmetric parent order produces the same child
    again = service.breed(uid, pb, pa)
    assert again["id"] == child["id"]


def test_breed_errors():
    service = small_service()
    uid = "breeder"
    wid = service.assign(uid)["world_id"]
    pa, pb = service.worlds[wid].seed_set[:2]
    child = service.breed(uid, pa, pb)
    with pytest.raises(WrongGeneration):
        service.breed(uid, child["id"], pa)
    with pytest.raises(IdenticalParents):
        service.breed(uid, pa, pa)
    with pytest.raises(UnknownGanimal):
        service.breed(uid, pa, "ghost")
    ua, ub = two_users_in_different_worlds(service)
    foreign = service.worlds[service.users[ub]].seed_set[0]
    with pytest.raises(NotInWorld):
        service.breed(ua, service.worlds[service.users[ua]].seed_set[0], foreign)


def test_annotate_and_leaderboard():
    service = small_service()
    uid = "critic"
    wid = service.assign(uid)["world_id"]
    g0, g1 = service.worlds[wid].seed_set[:2]
    service.annotate(uid, g0, ratings={"cute": 7})
    service.annotate(uid, g1, ratings={"cute": 3})
    service.annotate("critic2" if service.assign("critic2")["world_id"] == wid else uid, g1, ratings={"cute": 5})
    board = service.leaderboard_view(uid, "cute")
    ids = [e["ganimal_id"] for e in board["entries"]]
    assert ids[0] == g0
    assert set(ids) == {g0, g1}
    assert board["entries"][0]["mean"] == 7.0
    morph = service.annotate(uid, g0, morphology={"has_legs": True})
    assert morph["status"] == "ok"


def test_annotate_errors():
    service = small_service()
    ua, ub = two_users_in_different_worlds(service)
    wid_a = service.users[ua]
    gid = service.worlds[wid_a].seed_set[0]
    with pytest.raises(UnknownGanimal):
        service.annotate(ua, "ghost", ratings={"cute": 4})
    with pytest.raises(NotInWorld):
        service.annotate(ub, gid, ratings={"cute": 4})
    with pytest.raises(RatingOutOfRange):
        service.annotate(ua, gid, ratings={"cute": 9})
    from ganimals.errors import EmptyRecord

    with pytest.raises(EmptyRecord):
        service.annotate(ua, gid)


def test_incremental_leaderboard_matches_full_rerank():
    from ganimals import RngState, world_ratings

    service = small_service()
    rng = RngState(211)
    users = [f"rater{i}" for i in range(6)]
    for uid in users:
        service.assign(uid)
    for _ in range(400):
        uid = users[rng.randrange(len(users))]
        wid = service.users[uid]
        pool = service.worlds[wid].seed_set
        gid = pool[rng.randrange(len(pool))]
        metric = ("cute", "creepy", "realistic", "memorable")[rng.randrange(4)]
        service.annotate(uid, gid, ratings={metric: 1 + rng.randrange(7)})
    for wid, world in service.worlds.items():
        for characteristic in ("cute", "creepy", "realistic", "memorable"):
            ratings = world_ratings(service.annotations, characteristic, wid)
            expected = sorted(
                ratings, key=lambda g: (-ratings[g], world.first_seen.get(g, 0), g)
            )
            assert world.leaderboards[characteristic] == expected


def test_stats_errors(svc):
    with pytest.raises(ValidationError):
        svc.stats("cute", "contains_unicorn")
    with pytest.raises(InsufficientData):
        small_service().stats("cute", "contains_dog")


def test_get_ganimal_and_images(svc):
    gid = svc.worlds["w0"].seed_set[0]
    payload = svc.get_ganimal(gid)
    assert payload["id"] == gid
    digest = payload["image"]["content_digest"]
    data = svc.image_bytes(digest)
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    with pytest.raises(UnknownGanimal):
        svc.get_ganimal("nope")
    with pytest.raises(UnknownGanimal):
        svc.image_bytes("0" * 64)


def test_every_mutation_appends_one_event():
    service = small_service()
    uid = "auditor"

    def delta(fn):
        before = service.log.next_sequence
        fn()
        return service.log.next_sequence - before

    assert delta(lambda: service.assign(uid)) == 1
    assert delta(lambda: service.discover(uid)) == 1
    wid = service.users[uid]
    gid = service.worlds[wid].seed_set[0]
    assert delta(lambda: service.feed_ganimal(uid, gid)) == 1
    assert delta(lambda: service.annotate(uid, gid, ratings={"cute": 5})) == 1
    assert delta(lambda: service.tick_worlds(wid)) == 1
    pa, pb = service.worlds[wid].seed_set[1:3]
    assert delta(lambda: service.breed(uid, pa, pb)) == 1
    pc, pd = service.worlds[wid].seed_set[3:5]
    # breeding with a name is two facts: the birth and the naming
    assert delta(lambda: service.breed(uid, pc, pd, name="Twofer")) == 2
    # reads stay silent
    assert delta(lambda: service.world_view(uid)) == 0
    assert delta(lambda: service.leaderboard_view(uid, "cute")) == 0
    assert delta(lambda: service.get_ganimal(gid)) == 0


def test_world_view_ordering():
    service = small_service()
    uid = "viewer"
    wid = service.assign(uid)["world_id"]
    seed = service.worlds[wid].seed_set
    service.feed_ganimal(uid, seed[3])
    view = service.world_view(uid)
    assert view["world_id"] == wid
    assert view["seed_set_size"] == 8
    energies = [e["energy"] for e in view["population"]]
    assert energies == sorted(energies, reverse=True)
    assert view["population"][0]["ganimal_id"] == seed[3]


def _workload(service):
    uid = "replayer"
    service.assign(uid)
    wid = service.users[uid]
    for _ in range(12):
        out = service.discover(uid)
        if out["new"]:
            service.feed_ganimal(uid, out["id"])
    seed = service.worlds[wid].seed_set
    service.annotate(uid, seed[0], ratings={"cute": 6, "creepy": 2})
    service.annotate(uid, seed[1], ratings={"cute": 3}, morphology={"has_eyes": True})
    service.breed(uid, seed[0], seed[1], name="Replayling")
    service.tick_worlds()
    service.feed_ganimal(uid, seed[2])
    service.tick_worlds(wid)


def test_replay_reconstructs_state_hash():
    service = small_service()
    _workload(service)
    replayed = Service.replay(SMALL, service.log.events, clock=StepClock())
    assert replayed.state_hash() == service.state_hash()
    # replay is read-only bootstrap: same events, no extras
    assert replayed.log.next_sequence == service.log.next_sequence


def test_state_hash_sensitive_to_mutations():
    service = small_service()
    h0 = service.state_hash()
    service.assign("someone")
    h1 = service.state_hash()
    assert h0 != h1
    assert small_service().state_hash() == h0


def test_disk_persistence_round_trip(tmp_path):
    import dataclasses

    cfg = dataclasses.replace(SMALL, data_dir=str(tmp_path / "store"))
    service = Service(cfg, clock=StepClock())
    _workload(service)
    named = [e for e in service.log.events if e.kind == "Named"]
    permalink_id = named[0].payload["ganimal_id"]
    before = service.get_ganimal(permalink_id)
    hash_before = service.state_hash()
    service.close()

    assert (tmp_path / "store" / "events.jsonl").exists()
    assert any((tmp_path / "store" / "images").glob("*.png"))

    resumed = Service(cfg, clock=StepClock())
    assert resumed.state_hash() == hash_before
    after = resumed.get_ganimal(permalink_id)
    assert after == before
    assert after["permalink"] == f"/g/{permalink_id}"
    # the resumed service keeps appending where the log left off
    resumed.assign("late-arrival")
    assert resumed.log.events[-1].sequence_no == resumed.log.next_sequence - 1
    resumed.close()
    assert len(read_events(tmp_path / "store" / "events.jsonl")) == resumed.log.next_sequence
