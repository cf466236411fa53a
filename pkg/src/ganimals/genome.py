"""Genome algebra: weighted category mixtures, pair/quad breeding, identity.

A genome is the bred artifact itself: convex weights over animal categories
plus a truncation value and a noise seed, both identity-bearing.  Rendering
turns the weights into a class-conditioning vector; nothing here touches
latent-vector math or pixels.

Canonical serialization (the hash input) is pinned bit-exactly:

    v1|trunc=<17-sig-digit>|seed=<decimal u64>|<id>:<weight 17-sig-digit>,...

with components sorted ascending by category id.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .errors import (
    IdenticalParents,
    SameCategory,
    TruncationOutOfRange,
    UnknownCategory,
    ValidationError,
    WrongGeneration,
)

WEIGHT_SUM_TOL = 1e-12
_U64_MAX = (1 << 64) - 1

NoiseRule = Callable[[int, int], int]
TruncationRule = Callable[[float, float], float]


class Generation(str, Enum):
    G0 = "G0"
    G1 = "G1"
    G2 = "G2"


_ARITY = {Generation.G0: (1, 1), Generation.G1: (2, 2), Generation.G2: (3, 4)}


@dataclass(frozen=True)
class Genome:
    components: tuple[tuple[int, float], ...]
    truncation: float
    noise_seed: int
    generation: Generation

    def __post_init__(self):
        comps = self.components
        if not comps:
            raise ValidationError("genome needs at least one component")
        ids = [cid for cid, _ in comps]
        if ids != sorted(ids) or len(set(ids)) != len(ids):
            raise ValidationError("components must be sorted by distinct category id")
        if any(w <= 0.0 for _, w in comps):
            raise ValidationError("component weights must be strictly positive")
        total = math.fsum(w for _, w in comps)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights sum to {total!r}, expected 1.0")
        lo, hi = _ARITY[self.generation]
        if not (lo <= len(comps) <= hi):
            raise ValidationError(
                f"{self.generation.value} genome must have {lo}-{hi} components, got {len(comps)}"
            )
        if not (0.0 < self.truncation <= 1.0):
            raise TruncationOutOfRange(f"truncation {self.truncation!r} outside (0, 1]")
        if not (0 <= self.noise_seed <= _U64_MAX):
            raise ValidationError("noise_seed must fit in 64 bits")

    @property
    def category_ids(self) -> tuple[int, ...]:
        return tuple(cid for cid, _ in self.components)


@dataclass(frozen=True, order=True)
class GanimalId:
    digest: str  # 64 hex chars (sha256)

    def __str__(self) -> str:
        return self.digest


@dataclass(frozen=True)
class SpaceCounts:
    g0: int
    g1: int
    g2: int


def _fmt(x: float) -> str:
    return format(x, ".17g")


def canonical_serialization(g: Genome) -> str:
    parts = ",".join(f"{cid}:{_fmt(w)}" for cid, w in g.components)
    return f"v1|trunc={_fmt(g.truncation)}|seed={g.noise_seed}|{parts}"


def canonical_id(g: Genome) -> GanimalId:
    digest = hashlib.sha256(canonical_serialization(g).encode("ascii")).hexdigest()
    return GanimalId(digest=digest)


def default_noise_rule(seed_a: int, seed_b: int) -> int:
    """Child seed = stable hash of the unordered parent-seed pair."""
    lo, hi = min(seed_a, seed_b), max(seed_a, seed_b)
    h = hashlib.blake2b(f"ganimal-noise-v1|{lo}|{hi}".encode("ascii"), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def mean_truncation_rule(t_a: float, t_b: float) -> float:
    return (t_a + t_b) / 2.0


def make_g0(category_id: int, truncation: float, noise_seed: int, taxonomy=None) -> Genome:
    if taxonomy is not None and category_id not in taxonomy.categories:
        raise UnknownCategory(f"category {category_id} not in taxonomy")
    return Genome(
        components=((category_id, 1.0),),
        truncation=truncation,
        noise_seed=noise_seed,
        generation=Generation.G0,
    )


def _require_generation(g: Genome, want: Generation) -> None:
    if g.generation is not want:
        raise WrongGeneration(f"expected {want.value} parent, got {g.generation.value}")


def breed_pair(
    a: Genome,
    b: Genome,
    noise_rule: NoiseRule = default_noise_rule,
    truncation_rule: TruncationRule = mean_truncation_rule,
) -> Genome:
    _require_generation(a, Generation.G0)
    _require_generation(b, Generation.G0)
    cat_a, cat_b = a.components[0][0], b.components[0][0]
    if cat_a == cat_b:
        raise SameCategory(f"both parents are category {cat_a}")
    components = tuple(sorted([(cat_a, 0.5), (cat_b, 0.5)]))
    return Genome(
        components=components,
        truncation=truncation_rule(a.truncation, b.truncation),
        noise_seed=noise_rule(a.noise_seed, b.noise_seed),
        generation=Generation.G1,
    )


def breed_quad(
    a: Genome,
    b: Genome,
    noise_rule: NoiseRule = default_noise_rule,
    truncation_rule: TruncationRule = mean_truncation_rule,
) -> Genome:
    _require_generation(a, Generation.G1)
    _require_generation(b, Generation.G1)
    if a.category_ids == b.category_ids:
        # sharing both categories would collapse to a 2-component "G2";
        # generation arity requires at least 3 distinct categories
        raise IdenticalParents("parents share the same category pair")
    merged: dict[int, float] = {}
    for parent in (a, b):
        for cid, w in parent.components:
            merged[cid] = merged.get(cid, 0.0) + w / 2.0
    components = tuple(sorted(merged.items()))
    return Genome(
        components=components,
        truncation=truncation_rule(a.truncation, b.truncation),
        noise_seed=noise_rule(a.noise_seed, b.noise_seed),
        generation=Generation.G2,
    )


def count_space(n_categories: int) -> SpaceCounts:
    """Possibility-space sizes: singles, hybrid pairs, pairs of hybrid pairs."""
    if n_categories < 1:
        raise ValidationError("need at least one category")
    g0 = n_categories
    g1 = math.comb(n_categories, 2)
    g2 = math.comb(g1, 2)
    return SpaceCounts(g0=g0, g1=g1, g2=g2)
