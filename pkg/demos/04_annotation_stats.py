"""Citizen-science annotations and group comparisons.

Users tag creatures with morphology judgments (has eyes? bigger than a
house cat?) and rate them 1-7 on six metrics.  The store keeps each user's
latest answer per question; analysis treats the per-creature mean as the
unit, then runs Welch's unequal-variance t-test between creatures matching
a predicate and the rest.
"""

from ganimals import (
    AnnotationRecord,
    AnnotationStore,
    RngState,
    breed_pair,
    contains_dog,
    group_compare,
    load_taxonomy,
    make_g0,
    morphology_consensus,
    record_annotation,
)

taxonomy = load_taxonomy()
rng = RngState(8)

dog_ids = sorted(taxonomy.dog_ids())
other_ids = sorted(set(taxonomy.category_ids) - taxonomy.dog_ids())

store = AnnotationStore()
genomes = {}
for i in range(60):
    is_doggy = i % 2 == 0
    first = dog_ids[rng.randrange(len(dog_ids))] if is_doggy else other_ids[rng.randrange(len(other_ids))]
    second = other_ids[rng.randrange(len(other_ids))]
    while second == first:
        second = other_ids[rng.randrange(len(other_ids))]
    genome = breed_pair(make_g0(first, 0.5, i), make_g0(second, 0.5, 1000 + i))
    gid = f"creature{i:02d}"
    genomes[gid] = genome
    # raters like dogs: shift the cute score up when a dog parent is present
    for user in range(4):
        bump = 2 if is_doggy else 0
        score = max(1, min(7, 3 + bump + rng.randrange(3) - 1))
        record_annotation(
            store,
            AnnotationRecord(
                user_id=f"user{user}",
                ganimal_id=gid,
                world_id="w0",
                timestamp=float(i),
                ratings={"cute": score},
                morphology={"has_legs": not is_doggy or user != 3},
            ),
        )

comparison = group_compare(
    store, "cute", lambda g: contains_dog(g, taxonomy), genomes, "contains_dog"
)
print(f"creatures with a dog parent:    n={comparison.n_with},  mean cute = {comparison.mean_with:.2f}")
print(f"creatures without:              n={comparison.n_without}, mean cute = {comparison.mean_without:.2f}")
print(f"Welch t = {comparison.t_statistic:.2f}, two-sided p = {comparison.p_value:.2e}")

frac, votes = morphology_consensus(store, "creature00", "has_legs")
print(f"\nmorphology consensus for creature00 'has_legs': {frac:.2f} over {votes} votes")

# latest answer wins: user0 changes their mind about creature00
record_annotation(
    store,
    AnnotationRecord(
        user_id="user0", ganimal_id="creature00", world_id="w0",
        timestamp=99.0, ratings={"cute": 1},
    ),
)
from ganimals import mean_rating

print(f"creature00 mean cute after a retraction: {mean_rating(store, 'creature00', 'cute'):.2f}")
