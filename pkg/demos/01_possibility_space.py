"""Genomes and the size of the hybrid possibility space.

A G0 genome is a single animal category at full weight.  Breeding two G0s
gives a G1 half-and-half blend; breeding two G1s gives a G2 carrying up to
four categories.  Identity is structural: the canonical serialization of
(weights, truncation, noise seed) is hashed into a stable id, so the same
cross made twice is the same creature.
"""

from ganimals import (
    breed_pair,
    breed_quad,
    canonical_id,
    canonical_serialization,
    count_space,
    load_taxonomy,
    make_g0,
)

taxonomy = load_taxonomy()

counts = count_space(len(taxonomy.categories))
print(f"G0 singles:        {counts.g0:>13,}")
print(f"G1 pair blends:    {counts.g1:>13,}")
print(f"G2 pair-of-pairs:  {counts.g2:>13,}")

husky = make_g0(250, truncation=0.5, noise_seed=11)
goldfish = make_g0(1, truncation=0.5, noise_seed=22)
child = breed_pair(husky, goldfish)
print("\nG1 =", canonical_serialization(child))
print("id =", canonical_id(child))

# breeding is order-free: swap the parents and the id is unchanged
assert canonical_id(breed_pair(goldfish, husky)) == canonical_id(child)

other = breed_pair(make_g0(14, 0.5, 33), make_g0(130, 0.5, 44))
grandchild = breed_quad(child, other)
print("\nG2 components:")
for cid, weight in grandchild.components:
    print(f"  {taxonomy.categories[cid].name:<22} {weight:.2f}")
