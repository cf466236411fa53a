"""Discovery sampling: the explore/exploit mixture over four procedures.

Each discovery draws one of four procedures — recipe blending, uniform
category pairs, species-stratified pairs, or leaderboard exploitation — with
default probabilities (0.30, 0.30, 0.30, 0.10).  The three exploration
procedures produce a fresh midpoint G1 genome; exploitation re-serves an
existing ganimal from the caller's world, picked rank-proportionally from the
leaderboard of a uniformly chosen characteristic.

Everything is a pure function of (rng, inputs): fixing the RngState seed
fixes the whole output sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import EmptyLeaderboard, InvalidMix, PreconditionViolation
from .genome import Genome, breed_pair, make_g0
from .rng import RngState
from .taxonomy import CORE_NAMES, Taxonomy

CHARACTERISTICS = ("cute", "creepy", "realistic", "memorable")

PROCEDURE_RECIPE = "recipe"
PROCEDURE_UNIFORM = "uniform"
PROCEDURE_STRATIFIED = "stratified"
PROCEDURE_LEADERBOARD = "leaderboard"

DEFAULT_G0_TRUNCATION = 0.5
DEFAULT_LEADERBOARD_K = 10

_MIX_TOL = 1e-9
_RECIPE_MAX_RETRIES = 128


@dataclass(frozen=True)
class PolicyMix:
    p_recipe: float = 0.30
    p_uniform: float = 0.30
    p_stratified: float = 0.30
    p_leaderboard: float = 0.10

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_recipe, self.p_uniform, self.p_stratified, self.p_leaderboard)

    def validate(self) -> None:
        probs = self.as_tuple()
        if any(p < 0.0 or p > 1.0 for p in probs):
            raise InvalidMix(f"probabilities must lie in [0, 1]: {probs}")
        total = sum(probs)
        if abs(total - 1.0) > _MIX_TOL:
            raise InvalidMix(f"probabilities sum to {total!r}, expected 1.0")


@dataclass(frozen=True)
class DiscoveryResult:
    procedure: str
    genome: Genome | None = None
    existing_id: str | None = None
    characteristic: str | None = None
    fallback: bool = False  # exploitation requested but board empty

    @property
    def is_new(self) -> bool:
        return self.genome is not None


def choose_procedure(rng: RngState, mix: PolicyMix) -> str:
    mix.validate()
    tags = (PROCEDURE_RECIPE, PROCEDURE_UNIFORM, PROCEDURE_STRATIFIED, PROCEDURE_LEADERBOARD)
    r = rng.random()
    acc = 0.0
    for tag, p in zip(tags, mix.as_tuple()):
        acc += p
        if r < acc:
            return tag
    return tags[-1]


def sample_uniform_pair(rng: RngState, taxonomy: Taxonomy) -> tuple[int, int]:
    ids = taxonomy.category_ids
    if len(ids) < 2:
        raise PreconditionViolation("need at least 2 categories")
    i, j = rng.distinct_pair(len(ids))
    return ids[i], ids[j]


def sample_stratified_pair(rng: RngState, taxonomy: Taxonomy) -> tuple[int, int]:
    species = taxonomy.species_ids
    if len(species) < 2:
        raise PreconditionViolation("need at least 2 species for stratified sampling")
    i, j = rng.distinct_pair(len(species))
    cat_a = rng.choice(taxonomy.species_index[species[i]])
    cat_b = rng.choice(taxonomy.species_index[species[j]])
    return cat_a, cat_b


def _core_pairs(taxonomy: Taxonomy) -> tuple[list[tuple[str, str]], list[float]]:
    pairs = list(combinations(CORE_NAMES, 2))
    weights = [taxonomy.core_pair_weights.get(frozenset(p), 1.0) for p in pairs]
    return pairs, weights


def sample_recipe_pair(rng: RngState, taxonomy: Taxonomy) -> tuple[int, int]:
    pairs, weights = _core_pairs(taxonomy)
    core_a, core_b = pairs[rng.weighted_index(weights)]
    ids_a = sorted(taxonomy.cores[core_a].category_ids)
    ids_b = sorted(taxonomy.cores[core_b].category_ids)
    for _ in range(_RECIPE_MAX_RETRIES):
        cat_a = rng.choice(ids_a)
        cat_b = rng.choice(ids_b)
        if cat_a != cat_b:  # overlapping cores can collide; re-draw
            return cat_a, cat_b
    raise PreconditionViolation(f"cores {core_a!r}/{core_b!r} cannot produce distinct categories")


def sample_leaderboard(rng: RngState, leaderboard, k: int = DEFAULT_LEADERBOARD_K):
    """Rank-weighted draw from the top of a ranked list (rank 1 = best)."""
    if not leaderboard:
        raise EmptyLeaderboard("leaderboard is empty")
    if k < 1:
        raise PreconditionViolation("k must be positive")
    top_k = min(k, len(leaderboard))
    weights = [top_k - r for r in range(top_k)]  # rank r+1 gets weight K - r
    return leaderboard[rng.weighted_index(weights)]


def _explore_g1(rng: RngState, cat_a: int, cat_b: int, truncation: float) -> Genome:
    child_seed = rng.u64()
    a = make_g0(cat_a, truncation, 0)
    b = make_g0(cat_b, truncation, 0)
    return breed_pair(a, b, noise_rule=lambda *_: child_seed)


def next_discovery(
    rng: RngState,
    mix: PolicyMix,
    taxonomy: Taxonomy,
    world,
    k: int = DEFAULT_LEADERBOARD_K,
    g0_truncation: float = DEFAULT_G0_TRUNCATION,
) -> DiscoveryResult:
    """One discovery against a world snapshot (only its leaderboards are read)."""
    procedure = choose_procedure(rng, mix)

    if procedure == PROCEDURE_LEADERBOARD:
        characteristic = rng.choice(CHARACTERISTICS)
        board = world.leaderboards.get(characteristic, []) if world is not None else []
        if board:
            picked = sample_leaderboard(rng, board, k)
            return DiscoveryResult(
                procedure=procedure,
                existing_id=str(picked),
                characteristic=characteristic,
            )
        # cold-start fallback: serve a fresh uniform exploration instead
        cat_a, cat_b = sample_uniform_pair(rng, taxonomy)
        genome = _explore_g1(rng, cat_a, cat_b, g0_truncation)
        return DiscoveryResult(
            procedure=procedure,
            genome=genome,
            characteristic=characteristic,
            fallback=True,
        )

    if procedure == PROCEDURE_RECIPE:
        cat_a, cat_b = sample_recipe_pair(rng, taxonomy)
    elif procedure == PROCEDURE_UNIFORM:
        cat_a, cat_b = sample_uniform_pair(rng, taxonomy)
    else:
        cat_a, cat_b = sample_stratified_pair(rng, taxonomy)

    return DiscoveryResult(procedure=procedure, genome=_explore_g1(rng, cat_a, cat_b, g0_truncation))
