import math
from fractions import Fraction

import pytest

from ganimals import (
    LAYOUT_FEED_LINEAR,
    LAYOUT_SPATIAL,
    EnergyState,
    PolicyMix,
    RngState,
    World,
    as_energy,
    assign_user,
    breed_pair,
    category_entropy,
    create_world,
    feed,
    load_taxonomy,
    make_g0,
    tick,
    update_leaderboard,
)
from ganimals.errors import NotInWorld, PreconditionViolation, ValidationError


@pytest.fixture(scope="module")
def taxonomy():
    return load_taxonomy()


def fresh_world(*gids, energy=1.0):
    w = World(world_id="wt", layout_variant=LAYOUT_FEED_LINEAR)
    for gid in gids:
        w.adopt(gid, energy)
    return w


def removal_tick_oracle(initial, decay):
    # Exact rational oracle: smallest k with k * decay >= initial.
    e = Fraction(initial)
    d = Fraction(decay)
    k = e / d
    return int(k) if k == int(k) else int(k) + 1


def test_removal_tick_exact_over_random_parameters():
    rng = RngState(71)
    for _ in range(1000):
        initial = 0.05 + rng.random() * 3.0
        decay = 0.01 + rng.random() * 0.5
        w = fresh_world("g", energy=initial)
        expected = removal_tick_oracle(initial, decay)
        ticks = 0
        removed = []
        while not removed:
            removed = tick(w, decay)
            ticks += 1
            assert ticks <= expected
        assert ticks == expected
        assert removed == ["g"]
        assert "g" in w.removed
        assert not w.is_alive("g")


def test_default_parameters_remove_after_ten_ticks():
    w = fresh_world("g")
    for i in range(9):
        assert tick(w, 0.1) == [], f"removed early at tick {i + 1}"
    assert tick(w, 0.1) == ["g"]


def test_feeding_at_decay_rate_sustains_forever():
    rng = RngState(73)
    for _ in range(200):
        decay = 0.02 + rng.random() * 0.4
        topup = decay * (1.0 + rng.random())
        w = fresh_world("g", energy=0.05 + rng.random())
        for _ in range(200):
            feed(w, "g", topup)
            tick(w, decay)
        assert w.is_alive("g")


def test_energy_arithmetic_is_exact():
    w = fresh_world("g", energy=1.0)
    for _ in range(3):
        tick(w, 0.1)
    feed(w, "g", 0.25)
    state = w.population["g"]
    # floats are taken at bit-exact face value, so the ledger is the exact
    # rational sum of the binary values that went in
    assert state.energy == Fraction(1) - 3 * Fraction(0.1) + Fraction(0.25)
    assert state.last_fed_tick == 3


def test_energy_never_negative():
    w = fresh_world("g", energy=0.05)
    removed = tick(w, 1.0)
    assert removed == ["g"]


def test_feed_unknown_raises():
    w = fresh_world("g")
    with pytest.raises(NotInWorld):
        feed(w, "stranger", 0.25)


def test_feed_after_removal_raises():
    w = fresh_world("g", energy=0.1)
    tick(w, 0.5)
    with pytest.raises(NotInWorld):
        feed(w, "g", 0.25)


def test_feed_rejects_nonpositive_amount():
    w = fresh_world("g")
    with pytest.raises(PreconditionViolation):
        feed(w, "g", 0.0)


def test_tick_rejects_nonpositive_decay():
    w = fresh_world("g")
    with pytest.raises(PreconditionViolation):
        tick(w, 0)


def test_adopt_resets_energy_and_clears_removed():
    w = fresh_world("g", energy=0.1)
    tick(w, 0.5)
    assert "g" in w.removed
    state = w.adopt("g", 1.0)
    assert state.energy == 1
    assert w.is_alive("g")
    assert "g" not in w.removed


def test_register_keeps_first_seen_tick():
    w = fresh_world()
    w.register("a")
    tick_count = 5
    for _ in range(tick_count):
        w.tick += 1
    w.register("a")  # no-op on re-register
    w.register("b")
    assert w.first_seen["a"] == 0
    assert w.first_seen["b"] == tick_count


def test_visible_states():
    w = fresh_world("alive", energy=1.0)
    w.register("pending")
    w.adopt("dead", 0.1)
    tick(w, 0.5)
    assert w.visible("alive")
    assert w.visible("pending") and not w.is_alive("pending")
    assert not w.visible("dead")
    assert not w.visible("never-seen")


def test_assign_user_stable_and_in_range():
    for uid in ("alice", "bob", "carol"):
        idx = assign_user(uid, 4)
        assert idx == assign_user(uid, 4)
        assert 0 <= idx < 4
    assert assign_user("alice", 4) == 1
    assert assign_user("bob", 4) == 2


def test_assign_user_roughly_uniform():
    counts = [0] * 4
    n = 20_000
    for i in range(n):
        counts[assign_user(f"user{i}", 4)] += 1
    for c in counts:
        assert abs(c / n - 0.25) < 0.02


def test_assign_user_rejects_zero_worlds():
    with pytest.raises(PreconditionViolation):
        assign_user("x", 0)


def test_create_world_seeds(taxonomy):
    rng = RngState(79)
    world, genomes = create_world(rng, taxonomy, LAYOUT_SPATIAL, n_seed=25, world_id="wx")
    assert world.world_id == "wx"
    assert world.layout_variant == LAYOUT_SPATIAL
    assert len(world.seed_set) == 25
    assert len(genomes) == 25
    assert len(set(world.seed_set)) == 25
    for gid in world.seed_set:
        assert world.is_alive(gid)
        assert world.population[gid].energy == 1
        assert genomes[gid].generation.value == "G1"


def test_create_world_deterministic(taxonomy):
    w1, g1 = create_world(RngState(83), taxonomy, LAYOUT_FEED_LINEAR, n_seed=10)
    w2, g2 = create_world(RngState(83), taxonomy, LAYOUT_FEED_LINEAR, n_seed=10)
    assert w1.seed_set == w2.seed_set
    assert g1 == g2


def test_create_world_rejects_unknown_layout(taxonomy):
    with pytest.raises(ValidationError):
        create_world(RngState(0), taxonomy, "hexgrid", n_seed=1)


def test_create_world_honors_exploit_free_mix(taxonomy):
    # A pure-exploit mix still seeds (cold-start fallback covers it).
    mix = PolicyMix(0.0, 0.0, 0.0, 1.0)
    world, genomes = create_world(RngState(89), taxonomy, LAYOUT_SPATIAL, n_seed=5, mix=mix)
    assert len(genomes) == 5


def test_update_leaderboard_orders_and_tiebreaks():
    w = fresh_world()
    w.adopt("a", 1.0)
    w.tick = 3
    w.adopt("b", 1.0)
    w.adopt("c", 1.0)
    ranked = update_leaderboard(w, "cute", {"a": 5.0, "b": 6.5, "c": 5.0})
    # b wins on mean; a beats c on earlier first_seen despite equal means
    assert ranked == ["b", "a", "c"]
    assert w.leaderboards["cute"] == ranked


def test_update_leaderboard_id_tiebreak():
    w = fresh_world("x", "y")
    ranked = update_leaderboard(w, "creepy", {"y": 4.0, "x": 4.0})
    assert ranked == ["x", "y"]


def test_update_leaderboard_rejects_unknown_characteristic():
    w = fresh_world("a")
    with pytest.raises(ValidationError):
        update_leaderboard(w, "fluffy", {"a": 5.0})


def test_update_leaderboard_rejects_foreign_ids():
    w = fresh_world("a")
    with pytest.raises(ValidationError):
        update_leaderboard(w, "cute", {"a": 5.0, "other-world": 6.0})


def test_cross_world_isolation_probes(taxonomy):
    # Interleave 10_000 random operations across two worlds, then replay
    # only world A's operations against a fresh copy.  Any cross-world
    # leakage would make the replayed world diverge.
    def build():
        wa, ga = create_world(RngState(97), taxonomy, LAYOUT_FEED_LINEAR, n_seed=30, world_id="wa")
        wb, gb = create_world(RngState(101), taxonomy, LAYOUT_SPATIAL, n_seed=30, world_id="wb")
        return wa, ga, wb, gb

    def snapshot(w):
        return (
            {gid: (s.energy, s.last_fed_tick) for gid, s in w.population.items()},
            w.tick,
            set(w.removed),
            dict(w.leaderboards),
        )

    rng = RngState(103)
    wa, ga, wb, gb = build()
    ids_a, ids_b = list(ga), list(gb)
    script_a = []
    violations = 0
    for _ in range(10_000):
        target_a = rng.random() < 0.5
        world, ids = (wa, ids_a) if target_a else (wb, ids_b)
        op = rng.random()
        if op < 0.55:
            gid = ids[rng.randrange(len(ids))]
            action = ("feed", gid)
            try:
                feed(world, gid, 0.25)
            except NotInWorld:
                action = ("feed-miss", gid)
        elif op < 0.85:
            action = ("tick",)
            tick(world, 0.1)
        else:
            gid = ids[rng.randrange(len(ids))]
            action = ("rate", gid, 1 + rng.randrange(7))
            if world.visible(gid):
                update_leaderboard(world, "cute", {gid: float(action[2])})
        if target_a:
            script_a.append(action)

    # replay world A's script in isolation
    wa2, _, _, _ = build()
    for action in script_a:
        kind = action[0]
        if kind == "feed":
            feed(wa2, action[1], 0.25)
        elif kind == "feed-miss":
            with pytest.raises(NotInWorld):
                feed(wa2, action[1], 0.25)
        elif kind == "tick":
            tick(wa2, 0.1)
        else:
            if wa2.visible(action[1]):
                update_leaderboard(wa2, "cute", {action[1]: float(action[2])})

    if snapshot(wa) != snapshot(wa2):
        violations += 1
    # world B's ids never appear in A and vice versa
    if set(ids_a) & set(ids_b):
        violations += 1
    if wa.seen & wb.seen:
        violations += 1
    assert violations == 0


def test_as_energy_exact_fraction():
    assert as_energy(Fraction(1, 3)) == Fraction(1, 3)
    assert as_energy(0.1) == Fraction(0.1)  # face value of the float


def test_category_entropy_bounds():
    g_single = [make_g0(5, 0.5, 1)]
    assert category_entropy(g_single) == 0.0
    pair = breed_pair(make_g0(1, 0.5, 1), make_g0(2, 0.5, 2))
    assert category_entropy([pair]) == pytest.approx(math.log(2))
    assert category_entropy([]) == 0.0


def test_category_entropy_weighted_mixture():
    g1 = make_g0(1, 0.5, 1)
    g2 = make_g0(2, 0.5, 2)
    # three copies of category 1 and one of category 2: p = (3/4, 1/4)
    h = category_entropy([g1, g1, g1, g2])
    expected = -(0.75 * math.log(0.75) + 0.25 * math.log(0.25))
    assert h == pytest.approx(expected)


def test_energy_state_dataclass():
    s = EnergyState(energy=as_energy(1.0), last_fed_tick=0)
    assert s.energy == 1
