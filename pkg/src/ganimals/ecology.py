"""World ecologies: user assignment, seed sets, feeding/decay, leaderboards.

Each world is a fully isolated ecology: its own seed set, its own population
with per-ganimal energy, its own leaderboards.  Nothing in this module ever
reaches across worlds; isolation is by construction.

Energy is tracked in exact rational arithmetic (``fractions.Fraction`` over
the binary values of the configured floats), so an unfed ganimal is removed
on exactly the ceil(E0/decay)-th tick — no float-drift surprises in the
population dynamics.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotInWorld, PreconditionViolation, ValidationError
from .genome import Genome, canonical_id
from .rng import RngState
from .sampler import CHARACTERISTICS, PolicyMix, next_discovery
from .taxonomy import Taxonomy

LAYOUT_FEED_LINEAR = "feed_linear"
LAYOUT_SPATIAL = "spatial"
LAYOUT_VARIANTS = (LAYOUT_FEED_LINEAR, LAYOUT_SPATIAL)

DEFAULT_SEED_SET_SIZE = 100
DEFAULT_INITIAL_ENERGY = 1.0
DEFAULT_DECAY = 0.1
DEFAULT_FEED_AMOUNT = 0.25


def as_energy(x) -> Fraction:
    """Exact rational view of an energy quantity (floats taken at face value)."""
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass
class EnergyState:
    energy: Fraction
    last_fed_tick: int


@dataclass(frozen=True)
class FeedEvent:
    user_id: str
    ganimal_id: str
    world_id: str
    tick: int
    amount: Fraction


@dataclass
class World:
    world_id: str
    layout_variant: str
    seed_set: list[str] = field(default_factory=list)
    population: dict[str, EnergyState] = field(default_factory=dict)
    leaderboards: dict[str, list[str]] = field(default_factory=lambda: {c: [] for c in CHARACTERISTICS})
    tick: int = 0
    # bookkeeping beyond the core contract: every id ever registered here,
    # first-seen ticks for leaderboard tie-breaks, and ids removed by decay
    seen: set[str] = field(default_factory=set)
    first_seen: dict[str, int] = field(default_factory=dict)
    removed: set[str] = field(default_factory=set)

    def register(self, ganimal_id: str) -> None:
        """Record that this world has seen a ganimal (discovered/bred/seeded)."""
        if ganimal_id not in self.seen:
            self.seen.add(ganimal_id)
            self.first_seen[ganimal_id] = self.tick

    def adopt(self, ganimal_id: str, initial_energy) -> EnergyState:
        """Bring a seen ganimal into the living population."""
        self.register(ganimal_id)
        state = EnergyState(energy=as_energy(initial_energy), last_fed_tick=self.tick)
        self.population[ganimal_id] = state
        self.removed.discard(ganimal_id)
        return state

    def is_alive(self, ganimal_id: str) -> bool:
        return ganimal_id in self.population

    def visible(self, ganimal_id: str) -> bool:
        """Seen in this world and not dead (alive or awaiting first feed)."""
        return ganimal_id in self.seen and ganimal_id not in self.removed


def assign_user(user_id: str, n_worlds: int) -> int:
    """Deterministic uniform world index for a user; stable across calls."""
    if n_worlds < 1:
        raise PreconditionViolation("n_worlds must be >= 1")
    h = hashlib.blake2b(user_id.encode("utf-8"), digest_size=8)
    return int.from_bytes(h.digest(), "big") % n_worlds


def create_world(
    rng: RngState,
    taxonomy: Taxonomy,
    layout_variant: str,
    n_seed: int = DEFAULT_SEED_SET_SIZE,
    world_id: str = "w0",
    initial_energy=DEFAULT_INITIAL_ENERGY,
    mix: PolicyMix | None = None,
) -> tuple[World, dict[str, Genome]]:
    """New world seeded with ``n_seed`` distinct exploration-only discoveries.

    Returns the world plus the seed genomes keyed by their ids; callers own
    rendering/persisting the corresponding ganimal records.
    """
    if layout_variant not in LAYOUT_VARIANTS:
        raise ValidationError(f"unknown layout variant {layout_variant!r}")
    world = World(world_id=world_id, layout_variant=layout_variant)
    mix = mix or PolicyMix()
    genomes: dict[str, Genome] = {}
    while len(genomes) < n_seed:
        result = next_discovery(rng, mix, taxonomy, world)
        # leaderboards are empty during seeding, so every result is a fresh genome
        gid = str(canonical_id(result.genome))
        if gid in genomes:
            continue
        genomes[gid] = result.genome
        world.seed_set.append(gid)
        world.adopt(gid, initial_energy)
    return world, genomes


def feed(world: World, ganimal_id: str, amount) -> EnergyState:
    state = world.population.get(ganimal_id)
    if state is None:
        raise NotInWorld(f"{ganimal_id} is not in the living population of {world.world_id}")
    amount = as_energy(amount)
    if amount <= 0:
        raise PreconditionViolation("feed amount must be positive")
    state.energy += amount
    state.last_fed_tick = world.tick
    return state


def tick(world: World, decay) -> list[str]:
    """Apply one decay step; returns ids removed (energy hit zero)."""
    decay = as_energy(decay)
    if decay <= 0:
        raise PreconditionViolation("decay must be positive")
    removed: list[str] = []
    for gid, state in world.population.items():
        state.energy = max(Fraction(0), state.energy - decay)
        if state.energy == 0:
            removed.append(gid)
    for gid in removed:
        del world.population[gid]
        world.removed.add(gid)
    world.tick += 1
    return removed


def update_leaderboard(world: World, characteristic: str, ratings) -> list[str]:
    """Re-rank a world leaderboard from world-scoped mean ratings.

    Descending by mean; ties broken by earlier first-seen tick, then by id
    bytes — a deterministic total order.
    """
    if characteristic not in CHARACTERISTICS:
        raise ValidationError(f"unknown leaderboard characteristic {characteristic!r}")
    foreign = [gid for gid in ratings if gid not in world.seen]
    if foreign:
        raise ValidationError(
            f"ratings reference ganimals never present in {world.world_id}: {sorted(foreign)[:3]}"
        )
    ranked = sorted(
        ratings,
        key=lambda gid: (-ratings[gid], world.first_seen.get(gid, 0), gid),
    )
    world.leaderboards[characteristic] = ranked
    return ranked


def category_entropy(genomes) -> float:
    """Shannon entropy (nats) of category-weight mass across genomes.

    A crude diversity measure for a world's living population: 0 when all
    mass sits on one category, ln(n) when spread evenly over n.
    """
    mass: dict[int, float] = {}
    for genome in genomes:
        for cid, w in genome.components:
            mass[cid] = mass.get(cid, 0.0) + w
    ordered = sorted(mass)
    total = math.fsum(mass[cid] for cid in ordered)
    if total <= 0.0:
        return 0.0
    entropy = 0.0
    for cid in ordered:
        p = mass[cid] / total
        entropy -= p * math.log(p)
    return entropy
