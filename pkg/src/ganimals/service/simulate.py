"""Synthetic-user simulation harness.

Each agent carries a preference vector over taxonomy flags (dog/insect
affinities); it keeps, feeds, and rates ganimals according to how well they
match. Ratings share one perception model across all agents: dog-containing
ganimals rate higher on cute, insect-containing lower, plus noise, so a
long-enough run plants the directional effect the group-comparison
statistics are meant to detect. Identical seeds produce byte-identical
reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from ..catalogue import RATING_METRICS, contains_dog, contains_insect
from ..ecology import category_entropy
from ..errors import GanimalsError, InsufficientData
from ..genome import Generation
from ..rng import RngState
from ..sampler import CHARACTERISTICS
from ..taxonomy import Taxonomy
from .config import ServiceConfig
from .state import Service, StepClock

KEEP_THRESHOLD = 4.0
PREFERENCE_MODES = ("mixed", "uniform", "dog")

# shared perception model: the paper-direction effect planted in ratings
CUTE_DOG_BOOST = 1.5
CUTE_INSECT_PENALTY = -1.5


@dataclass(frozen=True)
class AgentProfile:
    user_id: str
    base_appeal: float
    dog_affinity: float
    insect_affinity: float


def make_agents(n_users: int, seed: int, preference: str) -> list[AgentProfile]:
    if preference not in PREFERENCE_MODES:
        raise ValueError(f"unknown preference mode {preference!r}")
    rng = RngState.from_key(seed, "agents", preference)
    agents = []
    for i in range(n_users):
        user_id = f"user{i:04d}"
        if preference == "dog":
            profile = AgentProfile(user_id, base_appeal=2.8, dog_affinity=3.0, insect_affinity=-1.0)
        elif preference == "uniform":
            profile = AgentProfile(user_id, base_appeal=4.5, dog_affinity=0.0, insect_affinity=0.0)
        else:
            profile = AgentProfile(
                user_id,
                base_appeal=4.0 + (rng.random() * 1.6 - 0.8),
                dog_affinity=rng.random() * 2.5 - 0.5,
                insect_affinity=rng.random() * 2.5 - 2.0,
            )
        agents.append(profile)
    return agents


def perceived_cute(rng: RngState, genome, taxonomy: Taxonomy) -> int:
    value = (
        4.0
        + CUTE_DOG_BOOST * contains_dog(genome, taxonomy)
        + CUTE_INSECT_PENALTY * contains_insect(genome, taxonomy)
        + (rng.random() * 2.0 - 1.0)
    )
    return min(7, max(1, round(value)))


def _appeal(agent: AgentProfile, rng: RngState, genome, taxonomy: Taxonomy) -> float:
    return (
        agent.base_appeal
        + agent.dog_affinity * contains_dog(genome, taxonomy)
        + agent.insect_affinity * contains_insect(genome, taxonomy)
        + (rng.random() * 3.0 - 1.5)
    )


def _agent_step(service: Service, agent: AgentProfile, rng: RngState) -> None:
    taxonomy = service.taxonomy
    world = service.worlds[service.users[agent.user_id]]
    u = rng.random()
    if u < 0.45:
        served = service.discover(agent.user_id)
        gid = served["id"]
        genome = service.ganimals[gid].genome
        if _appeal(agent, rng, genome, taxonomy) >= KEEP_THRESHOLD:
            if gid not in world.removed:
                service.feed_ganimal(agent.user_id, gid)
    elif u < 0.65:
        living = list(world.population)
        if not living:
            return
        best_gid, best_appeal = None, -1e9
        for _ in range(min(8, len(living))):
            gid = living[rng.randrange(len(living))]
            score = _appeal(agent, rng, service.ganimals[gid].genome, taxonomy)
            if score > best_appeal:
                best_gid, best_appeal = gid, score
        if best_appeal >= KEEP_THRESHOLD:
            service.feed_ganimal(agent.user_id, best_gid)
    elif u < 0.90:
        living = list(world.population)
        if not living:
            return
        gid = living[rng.randrange(len(living))]
        ratings = {"cute": perceived_cute(rng, service.ganimals[gid].genome, taxonomy)}
        extra = RATING_METRICS[rng.randrange(len(RATING_METRICS))]
        if extra != "cute":
            ratings[extra] = 1 + rng.randrange(7)
        morphology = None
        if rng.random() < 0.3:
            morphology = {
                "has_legs": rng.random() < 0.7,
                "bigger_than_housecat": rng.random() < 0.5,
            }
        service.annotate(agent.user_id, gid, morphology=morphology, ratings=ratings)
    else:
        candidates = [
            gid
            for gid in world.population
            if service.ganimals[gid].genome.generation is Generation.G1
        ]
        if len(candidates) < 2:
            return
        i = rng.randrange(len(candidates))
        j = rng.randrange(len(candidates) - 1)
        if j >= i:
            j += 1
        name = None
        if rng.random() < 0.2:
            name = f"hybrid-{candidates[i][:6]}-{candidates[j][:6]}"
        try:
            service.breed(agent.user_id, candidates[i], candidates[j], name=name)
        except GanimalsError:
            return  # identical category pairs and the like: skip the turn


def simulate_service(
    config: ServiceConfig,
    n_users: int,
    n_steps: int,
    seed: int,
    preference: str = "mixed",
    tick_every: int = 1,
) -> Service:
    """Drive synthetic users through the full loop; returns the hot service."""
    cfg = replace(config, master_seed=seed, data_dir=None, tick_seconds=0.0).validate()
    service = Service(cfg, clock=StepClock())
    agents = make_agents(n_users, seed, preference)
    for agent in agents:
        service.assign(agent.user_id)
    for step in range(n_steps):
        for agent in agents:
            rng = RngState.from_key(seed, "sim", agent.user_id, step)
            _agent_step(service, agent, rng)
        if tick_every > 0 and (step + 1) % tick_every == 0:
            service.tick_worlds()
    return service


def run_simulation(
    config: ServiceConfig,
    n_users: int,
    n_steps: int,
    seed: int,
    preference: str = "mixed",
    tick_every: int = 1,
) -> dict:
    service = simulate_service(config, n_users, n_steps, seed, preference, tick_every)
    report = build_report(service, n_users, n_steps, seed, preference)
    service.close()
    return report


def build_report(
    service: Service, n_users: int, n_steps: int, seed: int, preference: str
) -> dict:
    worlds = {}
    entropies = []
    for wid in sorted(service.worlds):
        world = service.worlds[wid]
        living = [service.ganimals[gid].genome for gid in world.population]
        entropy = category_entropy(living)
        entropies.append(entropy)
        worlds[wid] = {
            "population_size": len(world.population),
            "seed_set_size": len(world.seed_set),
            "discovered": len(world.seen) - len(world.seed_set),
            "removed": len(world.removed),
            "tick": world.tick,
            "entropy": entropy,
            "leaderboards": {c: list(world.leaderboards[c][:10]) for c in CHARACTERISTICS},
        }
    comparisons = {}
    for predicate in ("contains_dog", "contains_insect"):
        try:
            comparisons[predicate] = service.stats("cute", predicate).to_dict()
        except InsufficientData:
            comparisons[predicate] = None
    return {
        "parameters": {
            "n_users": n_users,
            "n_steps": n_steps,
            "seed": seed,
            "preference": preference,
            "n_worlds": service.config.n_worlds,
            "mix": list(service.config.mix),
            "seed_set_size": service.config.seed_set_size,
            "resolution": service.config.resolution,
        },
        "worlds": worlds,
        "global": {
            "n_ganimals": len(service.ganimals),
            "n_events": service.log.next_sequence,
            "n_annotations": service.annotations.n_records,
            "mean_world_entropy": math.fsum(entropies) / len(entropies) if entropies else 0.0,
            "comparisons": comparisons,
        },
        "state_hash": service.state_hash(),
    }


def report_json(report: dict) -> str:
    """Canonical report text: key-sorted, two-space indent, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
