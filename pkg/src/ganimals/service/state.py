"""The service engine: event-sourced state over the library modules.

Every mutation follows compute -> append -> apply: the handler derives the
full outcome (genomes, image refs, assignments), appends one event carrying
it, then the shared apply function folds the event into state.  Replaying a
log through the same apply functions reconstructs state exactly; apply never
touches the PRNG, the clock, or the render backend.
"""

from __future__ import annotations

import bisect
import hashlib
import json
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path

from ..catalogue import (
    AnnotationRecord,
    AnnotationStore,
    GroupComparison,
    contains_dog,
    contains_insect,
    group_compare,
    mean_rating,
    record_annotation,
    validate_annotation,
)
from ..ecology import (
    LAYOUT_VARIANTS,
    World,
    as_energy,
    assign_user,
    create_world,
    feed,
    tick,
)
from ..errors import (
    IdenticalParents,
    NotInWorld,
    UnknownGanimal,
    ValidationError,
)
from ..generator import (
    HttpBackend,
    ImageRef,
    ImageStore,
    MockBackend,
    RenderCache,
    render_cached,
)
from ..genome import Genome, Generation, breed_quad, canonical_id, canonical_serialization
from ..rng import RngState, derive_seed
from ..sampler import CHARACTERISTICS, next_discovery
from ..taxonomy import Taxonomy, load_taxonomy
from .config import ServiceConfig
from .events import Event, EventLog, read_events


def genome_to_payload(genome: Genome) -> dict:
    return {
        "components": [[cid, w] for cid, w in genome.components],
        "truncation": genome.truncation,
        "noise_seed": genome.noise_seed,
        "generation": genome.generation.value,
    }


def genome_from_payload(payload: dict) -> Genome:
    return Genome(
        components=tuple((int(cid), float(w)) for cid, w in payload["components"]),
        truncation=float(payload["truncation"]),
        noise_seed=int(payload["noise_seed"]),
        generation=Generation(payload["generation"]),
    )


class WallClock:
    def now(self) -> float:
        return time.time()


class StepClock:
    """Logical clock for deterministic runs: 1, 2, 3, ..."""

    def __init__(self):
        self.t = 0

    def now(self) -> float:
        self.t += 1
        return float(self.t)


@dataclass
class GanimalRecord:
    id: str
    genome: Genome
    image: ImageRef
    world_id: str
    created_tick: int
    name: str | None = None
    lineage: tuple[str, ...] = ()
    creator: str | None = None

    def to_payload(self) -> dict:
        return {
            "id": self.id,
            "genome": genome_to_payload(self.genome),
            "generation": self.genome.generation.value,
            "image": self.image.to_dict(),
            "name": self.name,
            "lineage": list(self.lineage),
            "world_id": self.world_id,
            "created_tick": self.created_tick,
            "creator": self.creator,
            "permalink": f"/g/{self.id}",
        }


_PREDICATES = {"contains_dog": contains_dog, "contains_insect": contains_insect}


class Service:
    """In-process platform: worlds, ganimals, annotations, one event log."""

    def __init__(
        self,
        config: ServiceConfig,
        taxonomy: Taxonomy | None = None,
        backend=None,
        clock=None,
        _events: list[Event] | None = None,
    ):
        self.config = config.validate()
        self.taxonomy = taxonomy if taxonomy is not None else load_taxonomy()
        self.clock = clock if clock is not None else WallClock()
        data_dir = Path(config.data_dir) if config.data_dir else None
        self.store = ImageStore(root=data_dir / "images" if data_dir else None)
        if backend is not None:
            self.backend = backend
        elif config.backend_url:
            self.backend = HttpBackend(
                config.backend_url, self.store, retries=config.backend_retries
            )
        else:
            self.backend = MockBackend(self.store, max_resolution=max(1024, config.resolution))
        self.cache = RenderCache()
        self._lock = threading.RLock()

        self.users: dict[str, str] = {}
        self.worlds: dict[str, World] = {}
        self.ganimals: dict[str, GanimalRecord] = {}
        self.annotations = AnnotationStore(ganimal_exists=lambda gid: gid in self.ganimals)
        self.discovery_counts: dict[str, int] = {}
        # sorted (-mean, first_seen, id) triples per (world, characteristic),
        # kept in lockstep with world.leaderboards for cheap synchronous refresh
        self._board_keys: dict[tuple[str, str], list] = {}

        log_path = data_dir / "events.jsonl" if data_dir else None
        existing: list[Event] = []
        if _events is not None:
            existing = list(_events)
        elif log_path is not None and log_path.exists():
            existing = read_events(log_path)
        self.log = EventLog(path=log_path, start_sequence=len(existing))
        if existing:
            for event in existing:
                self._apply(event)
            self.log.events = list(existing)
        else:
            self._bootstrap()

    @classmethod
    def replay(
        cls, config: ServiceConfig, events: list[Event], taxonomy=None, backend=None, clock=None
    ) -> "Service":
        """Rebuild a service purely from an event list (no bootstrap)."""
        cfg = config if config.data_dir is None else replace(config, data_dir=None)
        return cls(cfg, taxonomy=taxonomy, backend=backend, clock=clock, _events=events)

    def close(self) -> None:
        self.log.close()

    # -- bootstrap ---------------------------------------------------------

    def _bootstrap(self) -> None:
        for i in range(self.config.n_worlds):
            world_id = f"w{i}"
            layout = LAYOUT_VARIANTS[i % len(LAYOUT_VARIANTS)]
            rng = RngState.from_key(self.config.master_seed, "world", world_id)
            scratch, genomes = create_world(
                rng,
                self.taxonomy,
                layout,
                n_seed=self.config.seed_set_size,
                world_id=world_id,
                initial_energy=self.config.initial_energy,
                mix=self.config.policy_mix(),
            )
            seed_payload = []
            for gid in scratch.seed_set:
                genome = genomes[gid]
                ref = self._render(genome, gid)
                seed_payload.append(
                    {"ganimal_id": gid, "genome": genome_to_payload(genome), "image": ref.to_dict()}
                )
            self._commit(
                "WorldCreated",
                {"world_id": world_id, "layout_variant": layout, "seed": seed_payload},
            )

    def _render(self, genome: Genome, gid: str) -> ImageRef:
        return render_cached(
            self.cache, self.backend, genome, self.config.resolution, canonical_id(genome)
        )

    # -- event plumbing ----------------------------------------------------

    def _commit(self, kind: str, payload: dict) -> Event:
        event = self.log.append(kind, payload, self.clock.now())
        self._apply(event)
        return event

    def _apply(self, event: Event) -> None:
        handler = getattr(self, "_apply_" + _snake(event.kind))
        handler(event)

    def _apply_user_assigned(self, event: Event) -> None:
        self.users[event.payload["user_id"]] = event.payload["world_id"]

    def _apply_world_created(self, event: Event) -> None:
        p = event.payload
        world = World(world_id=p["world_id"], layout_variant=p["layout_variant"])
        for entry in p["seed"]:
            gid = entry["ganimal_id"]
            world.seed_set.append(gid)
            world.adopt(gid, self.config.initial_energy)
            self._register_record(
                gid,
                genome_from_payload(entry["genome"]),
                ImageRef(**entry["image"]),
                world_id=p["world_id"],
                created_tick=0,
            )
        self.worlds[p["world_id"]] = world

    def _apply_ganimal_discovered(self, event: Event) -> None:
        p = event.payload
        world = self.worlds[p["world_id"]]
        gid = p["ganimal_id"]
        if p["new"]:
            self._register_record(
                gid,
                genome_from_payload(p["genome"]),
                ImageRef(**p["image"]),
                world_id=p["world_id"],
                created_tick=world.tick,
                creator=p["user_id"],
            )
        world.register(gid)
        user = p["user_id"]
        self.discovery_counts[user] = self.discovery_counts.get(user, 0) + 1

    def _apply_ganimal_bred(self, event: Event) -> None:
        p = event.payload
        world = self.worlds[p["world_id"]]
        gid = p["ganimal_id"]
        self._register_record(
            gid,
            genome_from_payload(p["genome"]),
            ImageRef(**p["image"]),
            world_id=p["world_id"],
            created_tick=world.tick,
            creator=p["user_id"],
            lineage=tuple(p["parents"]),
        )
        world.register(gid)

    def _apply_fed(self, event: Event) -> None:
        p = event.payload
        world = self.worlds[p["world_id"]]
        if p["adopted"]:
            world.adopt(p["ganimal_id"], self.config.initial_energy)
        feed(world, p["ganimal_id"], p["amount"])

    def _apply_annotated(self, event: Event) -> None:
        p = event.payload
        ratings = p.get("ratings") or {}
        affected = [c for c in ratings if c in CHARACTERISTICS]
        old_means = {
            c: mean_rating(self.annotations, p["ganimal_id"], c, p["world_id"])
            for c in affected
        }
        record = AnnotationRecord(
            user_id=p["user_id"],
            ganimal_id=p["ganimal_id"],
            world_id=p["world_id"],
            timestamp=event.timestamp,
            morphology=p.get("morphology"),
            ratings=ratings or None,
        )
        record_annotation(self.annotations, record)
        for c in affected:
            self._update_board(p["world_id"], c, p["ganimal_id"], old_means[c])

    def _apply_ticked(self, event: Event) -> None:
        world = self.worlds[event.payload["world_id"]]
        tick(world, self.config.decay)

    def _apply_named(self, event: Event) -> None:
        self.ganimals[event.payload["ganimal_id"]].name = event.payload["name"]

    def _register_record(
        self, gid, genome, image, world_id, created_tick, creator=None, lineage=()
    ) -> None:
        if gid not in self.ganimals:
            self.ganimals[gid] = GanimalRecord(
                id=gid,
                genome=genome,
                image=image,
                world_id=world_id,
                created_tick=created_tick,
                creator=creator,
                lineage=lineage,
            )
        self.cache.refs.setdefault(gid, self.ganimals[gid].image)

    def _update_board(self, world_id: str, characteristic: str, gid: str, old_mean) -> None:
        """Move one ganimal to its new rank; result matches a full re-rank
        via update_leaderboard over world_ratings (checked in tests)."""
        world = self.worlds[world_id]
        keys = self._board_keys.setdefault((world_id, characteristic), [])
        first_seen = world.first_seen.get(gid, 0)
        if old_mean is not None:
            keys.remove((-old_mean, first_seen, gid))
        new_mean = mean_rating(self.annotations, gid, characteristic, world_id)
        bisect.insort(keys, (-new_mean, first_seen, gid))
        world.leaderboards[characteristic] = [entry[2] for entry in keys]

    # -- operations --------------------------------------------------------

    def _ensure_user(self, user_id: str) -> str:
        if not user_id:
            raise ValidationError("user_id must be non-empty")
        world_id = self.users.get(user_id)
        if world_id is None:
            index = assign_user(user_id, self.config.n_worlds)
            world_id = f"w{index}"
            self._commit("UserAssigned", {"user_id": user_id, "world_id": world_id})
        return world_id

    def assign(self, user_id: str) -> dict:
        with self._lock:
            world_id = self._ensure_user(user_id)
            return {"user_id": user_id, "world_id": world_id}

    def discover(self, user_id: str) -> dict:
        with self._lock:
            world_id = self._ensure_user(user_id)
            world = self.worlds[world_id]
            count = self.discovery_counts.get(user_id, 0)
            rng = RngState.from_key(self.config.master_seed, "discover", user_id, count)
            result = next_discovery(
                rng,
                self.config.policy_mix(),
                self.taxonomy,
                world,
                k=self.config.leaderboard_k,
                g0_truncation=self.config.g0_truncation,
            )
            payload = {
                "user_id": user_id,
                "world_id": world_id,
                "procedure": result.procedure,
                "fallback": result.fallback,
                "new": result.is_new,
            }
            if result.is_new:
                gid = str(canonical_id(result.genome))
                ref = self._render(result.genome, gid)
                payload.update(
                    {"ganimal_id": gid, "genome": genome_to_payload(result.genome), "image": ref.to_dict()}
                )
            else:
                gid = result.existing_id
                payload.update({"ganimal_id": gid, "characteristic": result.characteristic})
            self._commit("GanimalDiscovered", payload)
            out = self.ganimals[gid].to_payload()
            out.update(
                {
                    "procedure": result.procedure,
                    "new": result.is_new,
                    "fallback": result.fallback,
                    "served_world_id": world_id,
                }
            )
            return out

    def feed_ganimal(self, user_id: str, ganimal_id: str) -> dict:
        with self._lock:
            world_id = self._ensure_user(user_id)
            world = self.worlds[world_id]
            if ganimal_id not in self.ganimals:
                raise UnknownGanimal(f"unknown ganimal {ganimal_id}")
            if ganimal_id in world.removed:
                raise NotInWorld(f"{ganimal_id} is no longer alive in {world_id}")
            if ganimal_id not in world.seen:
                raise NotInWorld(f"{ganimal_id} has never appeared in {world_id}")
            adopted = not world.is_alive(ganimal_id)
            self._commit(
                "Fed",
                {
                    "user_id": user_id,
                    "world_id": world_id,
                    "ganimal_id": ganimal_id,
                    "amount": self.config.feed_amount,
                    "adopted": adopted,
                },
            )
            state = world.population[ganimal_id]
            return {
                "ganimal_id": ganimal_id,
                "world_id": world_id,
                "energy": float(state.energy),
                "energy_exact": str(state.energy),
                "last_fed_tick": state.last_fed_tick,
                "adopted": adopted,
            }

    def breed(self, user_id: str, parent_a: str, parent_b: str, name: str | None = None) -> dict:
        with self._lock:
            world_id = self._ensure_user(user_id)
            world = self.worlds[world_id]
            for pid in (parent_a, parent_b):
                if pid not in self.ganimals:
                    raise UnknownGanimal(f"unknown parent {pid}")
                if not world.visible(pid):
                    raise NotInWorld(f"parent {pid} is not in {world_id}")
            if parent_a == parent_b:
                raise IdenticalParents("parents must be two different ganimals")
            lo, hi = sorted((parent_a, parent_b))
            child_seed = derive_seed(self.config.master_seed, "bred", lo, hi)
            child = breed_quad(
                self.ganimals[parent_a].genome,
                self.ganimals[parent_b].genome,
                noise_rule=lambda *_: child_seed,
            )
            gid = str(canonical_id(child))
            ref = self._render(child, gid)
            self._commit(
                "GanimalBred",
                {
                    "user_id": user_id,
                    "world_id": world_id,
                    "ganimal_id": gid,
                    "parents": [lo, hi],
                    "genome": genome_to_payload(child),
                    "image": ref.to_dict(),
                },
            )
            if name:
                self._commit("Named", {"ganimal_id": gid, "name": name, "user_id": user_id})
            out = self.ganimals[gid].to_payload()
            out["served_world_id"] = world_id
            return out

    def annotate(
        self,
        user_id: str,
        ganimal_id: str,
        morphology: dict | None = None,
        ratings: dict | None = None,
    ) -> dict:
        with self._lock:
            world_id = self._ensure_user(user_id)
            world = self.worlds[world_id]
            if ganimal_id not in self.ganimals:
                raise UnknownGanimal(f"unknown ganimal {ganimal_id}")
            if ganimal_id not in world.seen:
                raise NotInWorld(f"{ganimal_id} belongs to another world")
            probe = AnnotationRecord(
                user_id=user_id,
                ganimal_id=ganimal_id,
                world_id=world_id,
                timestamp=0.0,
                morphology=morphology,
                ratings=ratings,
            )
            validate_annotation(self.annotations, probe)
            payload = {"user_id": user_id, "world_id": world_id, "ganimal_id": ganimal_id}
            if morphology:
                payload["morphology"] = dict(morphology)
            if ratings:
                payload["ratings"] = dict(ratings)
            self._commit("Annotated", payload)
            return {"status": "ok", "ganimal_id": ganimal_id, "world_id": world_id}

    def tick_worlds(self, world_id: str | None = None) -> dict:
        with self._lock:
            if world_id is not None and world_id not in self.worlds:
                raise ValidationError(f"unknown world {world_id!r}")
            targets = [world_id] if world_id else sorted(self.worlds)
            removed: dict[str, list[str]] = {}
            decay = as_energy(self.config.decay)
            for wid in targets:
                world = self.worlds[wid]
                doomed = sorted(
                    gid for gid, st in world.population.items() if st.energy <= decay
                )
                self._commit("Ticked", {"world_id": wid, "removed": doomed})
                removed[wid] = doomed
            return {
                "removed": removed,
                "ticks": {wid: self.worlds[wid].tick for wid in targets},
            }

    # -- read-side views ----------------------------------------------------

    def world_view(self, user_id: str) -> dict:
        with self._lock:
            world_id = self._ensure_user(user_id)
            world = self.worlds[world_id]
            ordered = sorted(
                world.population.items(),
                key=lambda kv: (-kv[1].energy, world.first_seen.get(kv[0], 0), kv[0]),
            )
            population = []
            for gid, state in ordered:
                rec = self.ganimals[gid]
                population.append(
                    {
                        "ganimal_id": gid,
                        "name": rec.name,
                        "generation": rec.genome.generation.value,
                        "energy": float(state.energy),
                        "energy_exact": str(state.energy),
                        "last_fed_tick": state.last_fed_tick,
                        "image_uri": rec.image.uri,
                    }
                )
            return {
                "user_id": user_id,
                "world_id": world_id,
                "layout_variant": world.layout_variant,
                "tick": world.tick,
                "seed_set_size": len(world.seed_set),
                "population": population,
            }

    def leaderboard_view(self, user_id: str, characteristic: str) -> dict:
        with self._lock:
            if characteristic not in CHARACTERISTICS:
                raise ValidationError(f"unknown leaderboard characteristic {characteristic!r}")
            world_id = self._ensure_user(user_id)
            world = self.worlds[world_id]
            entries = []
            for rank, gid in enumerate(world.leaderboards[characteristic], start=1):
                rec = self.ganimals[gid]
                entries.append(
                    {
                        "rank": rank,
                        "ganimal_id": gid,
                        "name": rec.name,
                        "mean": mean_rating(self.annotations, gid, characteristic, world_id),
                        "alive": world.is_alive(gid),
                        "image_uri": rec.image.uri,
                    }
                )
            return {"world_id": world_id, "characteristic": characteristic, "entries": entries}

    def stats(self, metric: str, predicate_name: str) -> GroupComparison:
        with self._lock:
            predicate = _PREDICATES.get(predicate_name)
            if predicate is None:
                raise ValidationError(
                    f"unknown predicate {predicate_name!r}; expected one of {sorted(_PREDICATES)}"
                )
            genomes = {gid: rec.genome for gid, rec in self.ganimals.items()}
            return group_compare(
                self.annotations,
                metric,
                lambda g: predicate(g, self.taxonomy),
                genomes,
                predicate_name=predicate_name,
            )

    def get_ganimal(self, ganimal_id: str) -> dict:
        with self._lock:
            rec = self.ganimals.get(ganimal_id)
            if rec is None:
                raise UnknownGanimal(f"unknown ganimal {ganimal_id}")
            return rec.to_payload()

    def image_bytes(self, digest: str) -> bytes:
        try:
            return self.store.get(digest)
        except KeyError:
            raise UnknownGanimal(f"no image {digest}") from None

    # -- integrity -----------------------------------------------------------

    def state_hash(self) -> str:
        with self._lock:
            snapshot = {
                "users": self.users,
                "discovery_counts": self.discovery_counts,
                "n_events": self.log.next_sequence,
                "n_annotations": self.annotations.n_records,
                "worlds": {
                    wid: {
                        "layout": w.layout_variant,
                        "tick": w.tick,
                        "seed_set": w.seed_set,
                        "population": {
                            gid: [str(st.energy), st.last_fed_tick]
                            for gid, st in w.population.items()
                        },
                        "seen": sorted(w.seen),
                        "first_seen": w.first_seen,
                        "removed": sorted(w.removed),
                        "leaderboards": w.leaderboards,
                    }
                    for wid, w in self.worlds.items()
                },
                "ganimals": {
                    gid: {
                        "canonical": canonical_serialization(rec.genome),
                        "image": rec.image.content_digest,
                        "name": rec.name,
                        "lineage": list(rec.lineage),
                        "world_id": rec.world_id,
                        "created_tick": rec.created_tick,
                        "creator": rec.creator,
                    }
                    for gid, rec in self.ganimals.items()
                },
                "ratings": {
                    "|".join(key): list(value)
                    for key, value in self.annotations.latest_ratings.items()
                },
                "morphology": {
                    "|".join(key): value
                    for key, value in self.annotations.latest_morphology.items()
                },
            }
            blob = json.dumps(snapshot, sort_keys=True, separators=(",", ":"))
            return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _snake(kind: str) -> str:
    out = []
    for i, ch in enumerate(kind):
        if ch.isupper() and i > 0:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)
