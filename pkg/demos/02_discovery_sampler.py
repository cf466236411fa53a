"""The explore/exploit discovery mixture.

Every "show me a new creature" request draws one of four procedures:
recipe blends across curated cores, uniform category pairs, species-
stratified pairs, and leaderboard exploitation of already-loved creatures.
Stratified sampling is the anti-dog device: 118 of the 396 categories are
dog breeds, but they share one species slot, so a dog shows up in a
stratified draw about 0.4% of the time instead of 30%.
"""

from collections import Counter

from ganimals import (
    PolicyMix,
    RngState,
    load_taxonomy,
    next_discovery,
    sample_leaderboard,
    sample_stratified_pair,
    sample_uniform_pair,
)

taxonomy = load_taxonomy()
dogs = taxonomy.dog_ids()
N = 20_000

rng = RngState(1)
uniform_hits = sum(
    (a in dogs) + (b in dogs) for a, b in (sample_uniform_pair(rng, taxonomy) for _ in range(N))
)
stratified_hits = sum(
    (a in dogs) + (b in dogs)
    for a, b in (sample_stratified_pair(rng, taxonomy) for _ in range(N))
)
print(f"dog rate, uniform draws:    {uniform_hits / (2 * N):.4f}  (118/396 = {118 / 396:.4f})")
print(f"dog rate, stratified draws: {stratified_hits / (2 * N):.4f}  (1/{taxonomy.n_species} = {1 / taxonomy.n_species:.4f})")

mix = PolicyMix()  # (0.30, 0.30, 0.30, 0.10)


class Snapshot:
    leaderboards = {"cute": ["crowd-favorite", "runner-up", "third"]}


counts = Counter()
picks = Counter()
for i in range(N):
    result = next_discovery(RngState(i), mix, taxonomy, Snapshot())
    counts[result.procedure] += 1
    if not result.is_new:
        picks[result.existing_id] += 1

print("\nprocedure mixture over", N, "discoveries:")
for tag, c in counts.most_common():
    print(f"  {tag:<12} {c / N:.3f}")

print("\nexploitation favors the top rank (weights 3:2:1 here):")
for gid, c in picks.most_common():
    print(f"  {gid:<15} {c}")

# rank weights on a full board: rank 1 gets K, rank K gets 1
rng = RngState(7)
board = [f"g{i}" for i in range(10)]
tally = Counter(sample_leaderboard(rng, board, k=10) for _ in range(N))
print(f"\nrank-1 share with K=10: {tally['g0'] / N:.3f}  (10/55 = {10 / 55:.3f})")
print(f"rank-10 share with K=10: {tally['g9'] / N:.3f}  (1/55 = {1 / 55:.3f})")
