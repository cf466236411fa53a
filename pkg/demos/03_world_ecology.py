"""World ecologies: energy, feeding, decay, and leaderboards.

Each world is an isolated population.  Creatures carry an exact rational
energy ledger: they start at 1.0, lose 0.1 per tick, and gain 0.25 per
feeding.  An unfed creature is removed after exactly ceil(1.0 / 0.1) = 10
ticks; a creature fed at least as fast as it decays lives forever.
"""

from ganimals import (
    LAYOUT_FEED_LINEAR,
    RngState,
    create_world,
    feed,
    load_taxonomy,
    tick,
    update_leaderboard,
)

taxonomy = load_taxonomy()
world, genomes = create_world(
    RngState(2024), taxonomy, LAYOUT_FEED_LINEAR, n_seed=6, world_id="demo"
)

favorite, second, neglected = world.seed_set[:3]
print(f"seeded {len(world.seed_set)} creatures at energy 1.0\n")

for step in range(12):
    feed(world, favorite, 0.25)
    feed(world, second, 0.25)
    removed = tick(world, 0.1)
    if removed:
        print(f"tick {world.tick:>2}: removed {len(removed)} unfed creature(s)")

state = world.population[favorite]
print(f"\na fed one after {world.tick} ticks: energy = {float(state.energy):.2f} (exact: {state.energy})")
print(f"the neglected one is alive: {world.is_alive(neglected)}")
print(f"survivors: {len(world.population)} of {len(world.seed_set)}")

# leaderboards rank by mean rating; ties break by seniority, then id bytes
ranked = update_leaderboard(world, "cute", {favorite: 6.5, second: 6.5})
print("\ncute leaderboard (tied means, seniority decides):", [g[:8] for g in ranked])
