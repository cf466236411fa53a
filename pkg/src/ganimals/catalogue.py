"""Citizen-science annotations: morphology votes, ratings, group comparisons.

Annotations are latest-write-wins per (user, ganimal, field).  The store
keeps incremental per-world and global aggregates so leaderboard refreshes
and mean queries stay cheap at simulation scale.  Group comparisons use
Welch's two-sample t-test on per-ganimal mean ratings (one number per
ganimal, so heavy annotators can't pseudo-replicate), two-sided.  The test
suite cross-checks Welch p-values against a label-permutation oracle; the
oracle stays out of the library on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import stats

from .errors import (
    EmptyRecord,
    InsufficientData,
    RatingOutOfRange,
    UnknownFeature,
    UnknownGanimal,
    UnknownMetric,
    ValidationError,
)
from .genome import Genome
from .taxonomy import Taxonomy

MORPHOLOGY_FEATURES = (
    "has_head",
    "has_eyes",
    "has_mouth",
    "has_nose",
    "has_legs",
    "has_hair",
    "has_scales",
    "has_feathers",
    "lives_underwater",
    "bigger_than_housecat",
)

RATING_METRICS = ("compassion", "empathy", "cute", "memorable", "realistic", "creepy")

RATING_MIN = 1
RATING_MAX = 7


@dataclass(frozen=True)
class AnnotationRecord:
    user_id: str
    ganimal_id: str
    world_id: str
    timestamp: float
    morphology: Mapping[str, bool] | None = None
    ratings: Mapping[str, int] | None = None


@dataclass(frozen=True)
class GroupComparison:
    metric: str
    predicate: str
    n_with: int
    n_without: int
    mean_with: float
    mean_without: float
    t_statistic: float
    p_value: float

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "predicate": self.predicate,
            "n_with": self.n_with,
            "n_without": self.n_without,
            "mean_with": self.mean_with,
            "mean_without": self.mean_without,
            "t_statistic": self.t_statistic,
            "p_value": self.p_value,
        }


@dataclass
class AnnotationStore:
    """Latest-write-wins store keyed by (ganimal, user, field).

    ``ganimal_exists`` guards against annotating unknown ids; leave None to
    accept anything (standalone/statistical use).
    """

    ganimal_exists: Callable[[str], bool] | None = None
    n_records: int = 0
    # (ganimal_id, user_id, metric) -> (value, world_id)
    latest_ratings: dict[tuple[str, str, str], tuple[int, str]] = field(default_factory=dict)
    # (ganimal_id, user_id, feature) -> bool
    latest_morphology: dict[tuple[str, str, str], bool] = field(default_factory=dict)
    # metric -> ganimal_id -> [sum, count] over distinct users' latest values
    _global_agg: dict[str, dict[str, list]] = field(default_factory=dict)
    # (world_id, metric) -> ganimal_id -> [sum, count]
    _world_agg: dict[tuple[str, str], dict[str, list]] = field(default_factory=dict)

    def known(self, ganimal_id: str) -> bool:
        if self.ganimal_exists is None:
            return True
        return self.ganimal_exists(ganimal_id)

    def rated_ganimals(self, metric: str, world_id: str | None = None) -> set[str]:
        _require_metric(metric)
        if world_id is None:
            return set(self._global_agg.get(metric, ()))
        return set(self._world_agg.get((world_id, metric), ()))


def _require_metric(metric: str) -> None:
    if metric not in RATING_METRICS:
        raise UnknownMetric(f"unknown rating metric {metric!r}")


def validate_annotation(store: AnnotationStore, record: AnnotationRecord) -> None:
    """Raise if the record can't be persisted; mutates nothing."""
    morph = record.morphology
    ratings = record.ratings
    answered = False
    if morph is not None:
        for feature, value in morph.items():
            if feature not in MORPHOLOGY_FEATURES:
                raise UnknownFeature(f"unknown morphology feature {feature!r}")
            if not isinstance(value, bool):
                raise ValidationError(f"morphology {feature!r} must be a boolean")
            answered = True
    if ratings is not None:
        for metric, value in ratings.items():
            _require_metric(metric)
            if not isinstance(value, int) or isinstance(value, bool):
                raise RatingOutOfRange(f"rating {metric!r} must be an integer")
            if not (RATING_MIN <= value <= RATING_MAX):
                raise RatingOutOfRange(
                    f"rating {metric!r}={value} outside {RATING_MIN}-{RATING_MAX}"
                )
            answered = True
    if not answered:
        raise EmptyRecord("annotation answers nothing")
    if not store.known(record.ganimal_id):
        raise UnknownGanimal(f"unknown ganimal {record.ganimal_id}")


def _bump(agg: dict[str, list], gid: str, delta_sum: int, delta_count: int) -> None:
    cell = agg.get(gid)
    if cell is None:
        cell = [0, 0]
        agg[gid] = cell
    cell[0] += delta_sum
    cell[1] += delta_count
    if cell[1] == 0:
        del agg[gid]


def record_annotation(store: AnnotationStore, record: AnnotationRecord) -> None:
    validate_annotation(store, record)
    store.n_records += 1
    if record.ratings:
        for metric, value in record.ratings.items():
            key = (record.ganimal_id, record.user_id, metric)
            previous = store.latest_ratings.get(key)
            store.latest_ratings[key] = (value, record.world_id)
            g_agg = store._global_agg.setdefault(metric, {})
            w_agg = store._world_agg.setdefault((record.world_id, metric), {})
            if previous is not None:
                old_value, old_world = previous
                _bump(g_agg, record.ganimal_id, -old_value, -1)
                old_w = store._world_agg.setdefault((old_world, metric), {})
                _bump(old_w, record.ganimal_id, -old_value, -1)
            _bump(g_agg, record.ganimal_id, value, 1)
            _bump(w_agg, record.ganimal_id, value, 1)
    if record.morphology:
        for feature, value in record.morphology.items():
            store.latest_morphology[(record.ganimal_id, record.user_id, feature)] = value


def mean_rating(
    store: AnnotationStore, ganimal_id: str, metric: str, world_id: str | None = None
) -> float | None:
    """Mean of distinct users' latest ratings; None when nobody has rated."""
    _require_metric(metric)
    if world_id is None:
        agg = store._global_agg.get(metric, {})
    else:
        agg = store._world_agg.get((world_id, metric), {})
    cell = agg.get(ganimal_id)
    if cell is None:
        return None
    return cell[0] / cell[1]


def world_ratings(store: AnnotationStore, metric: str, world_id: str) -> dict[str, float]:
    """Per-ganimal mean ratings restricted to one world's annotations."""
    _require_metric(metric)
    agg = store._world_agg.get((world_id, metric), {})
    return {gid: cell[0] / cell[1] for gid, cell in agg.items()}


def morphology_consensus(
    store: AnnotationStore, ganimal_id: str, feature: str
) -> tuple[float | None, int]:
    if feature not in MORPHOLOGY_FEATURES:
        raise UnknownFeature(f"unknown morphology feature {feature!r}")
    votes = [
        value
        for (gid, _user, f), value in store.latest_morphology.items()
        if gid == ganimal_id and f == feature
    ]
    if not votes:
        return None, 0
    return sum(votes) / len(votes), len(votes)


def contains_dog(genome: Genome, taxonomy: Taxonomy) -> bool:
    return any(taxonomy.categories[cid].is_dog for cid in genome.category_ids)


def contains_insect(genome: Genome, taxonomy: Taxonomy) -> bool:
    return any(taxonomy.categories[cid].is_insect for cid in genome.category_ids)


def welch_t_test(a, b) -> tuple[float, float]:
    """Welch's two-sample t (unequal variances), two-sided p."""
    result = stats.ttest_ind(
        np.asarray(a, dtype=float), np.asarray(b, dtype=float), equal_var=False
    )
    return float(result.statistic), float(result.pvalue)


def group_compare(
    store: AnnotationStore,
    metric: str,
    predicate: Callable[[Genome], bool],
    genomes: Mapping[str, Genome],
    predicate_name: str = "predicate",
) -> GroupComparison:
    """Compare per-ganimal mean ratings between genomes matching a predicate
    and those that don't."""
    with_means: list[float] = []
    without_means: list[float] = []
    for gid in sorted(store.rated_ganimals(metric)):
        genome = genomes.get(gid)
        if genome is None:
            continue  # unrateable without a genome; skip
        mean = mean_rating(store, gid, metric)
        if predicate(genome):
            with_means.append(mean)
        else:
            without_means.append(mean)
    if len(with_means) < 2 or len(without_means) < 2:
        raise InsufficientData(
            f"need >= 2 rated ganimals per group, got {len(with_means)}/{len(without_means)}"
        )
    t, p = welch_t_test(with_means, without_means)
    return GroupComparison(
        metric=metric,
        predicate=predicate_name,
        n_with=len(with_means),
        n_without=len(without_means),
        mean_with=float(np.mean(with_means)),
        mean_without=float(np.mean(without_means)),
        t_statistic=t,
        p_value=p,
    )
