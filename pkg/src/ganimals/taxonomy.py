"""Animal-category universe: 396 ImageNet classes, species groups, recipe cores.

The bundled defaults live in ``ganimals/data``: ``animal_categories.csv``
covers the ImageNet animal subtree (classes 0-397 minus the two extinct taxa,
trilobite and triceratops, to land on 396), with the 118 dog breeds sharing
the single species ``canis_familiaris`` and every other category its own
species.  ``cores.json`` holds a hand-curated stand-in for the five blending
cores.  Both files are data, not code: swap them via config and every
membership-dependent behavior follows.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ParseError, UnknownCore, ValidationError

CORE_NAMES = ("aquatic", "canine", "bird", "megafauna", "wildcard")
EXPECTED_CATEGORY_COUNT = 396
EXPECTED_DOG_COUNT = 118

# optional key in the cores file: maps "coreA|coreB" -> relative weight
PAIR_WEIGHTS_KEY = "pair_weights"


@dataclass(frozen=True)
class Category:
    id: int
    name: str
    species_id: str
    is_dog: bool
    is_insect: bool


@dataclass(frozen=True)
class CoreDefinition:
    core_name: str
    category_ids: frozenset[int]


@dataclass
class Taxonomy:
    categories: dict[int, Category]
    cores: dict[str, CoreDefinition]
    species_index: dict[str, tuple[int, ...]]
    core_pair_weights: dict[frozenset[str], float] = field(default_factory=dict)

    @property
    def category_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.categories))

    @property
    def species_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.species_index))

    @property
    def n_species(self) -> int:
        return len(self.species_index)

    def dog_ids(self) -> frozenset[int]:
        return frozenset(c.id for c in self.categories.values() if c.is_dog)

    def insect_ids(self) -> frozenset[int]:
        return frozenset(c.id for c in self.categories.values() if c.is_insect)


def _parse_bool(raw: str, line_no: int) -> bool:
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise ParseError(f"line {line_no}: expected 'true' or 'false', got {raw!r}")


def _read_categories(path: Path) -> list[Category]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if header != ["id", "name", "species_id", "is_dog", "is_insect"]:
            raise ParseError(f"{path}: unexpected header {header!r}")
        out = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != 5:
                raise ParseError(f"{path} line {line_no}: expected 5 fields, got {len(row)}")
            try:
                cid = int(row[0])
            except ValueError:
                raise ParseError(f"{path} line {line_no}: bad id {row[0]!r}") from None
            if not (0 <= cid <= 999):
                raise ParseError(f"{path} line {line_no}: id {cid} outside 0-999")
            name = row[1]
            species = row[2]
            if not name or not species:
                raise ParseError(f"{path} line {line_no}: empty name or species_id")
            out.append(
                Category(
                    id=cid,
                    name=name,
                    species_id=species,
                    is_dog=_parse_bool(row[3], line_no),
                    is_insect=_parse_bool(row[4], line_no),
                )
            )
        return out


def _read_cores(path: Path) -> tuple[dict[str, list[int]], dict[str, float]]:
    with open(path, encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: expected a JSON object")
    pair_weights = raw.pop(PAIR_WEIGHTS_KEY, {})
    if not isinstance(pair_weights, dict):
        raise ParseError(f"{path}: {PAIR_WEIGHTS_KEY} must be an object")
    cores: dict[str, list[int]] = {}
    for name, ids in raw.items():
        if not isinstance(ids, list) or not all(isinstance(i, int) for i in ids):
            raise ParseError(f"{path}: core {name!r} must map to an array of ids")
        cores[name] = ids
    return cores, {str(k): float(v) for k, v in pair_weights.items()}


def bundled_data_path(filename: str) -> Path:
    return Path(str(resources.files("ganimals").joinpath("data", filename)))


def load_taxonomy(
    categories_path: str | Path | None = None,
    cores_path: str | Path | None = None,
) -> Taxonomy:
    """Load and validate the category universe; ``None`` means bundled default."""
    cat_path = Path(categories_path) if categories_path else bundled_data_path("animal_categories.csv")
    core_path = Path(cores_path) if cores_path else bundled_data_path("cores.json")

    cats = _read_categories(cat_path)

    ids = [c.id for c in cats]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValidationError(f"duplicate category ids: {dupes}")
    if len(cats) != EXPECTED_CATEGORY_COUNT:
        raise ValidationError(f"expected {EXPECTED_CATEGORY_COUNT} categories, got {len(cats)}")

    dogs = [c for c in cats if c.is_dog]
    if len(dogs) != EXPECTED_DOG_COUNT:
        raise ValidationError(f"expected {EXPECTED_DOG_COUNT} dog categories, got {len(dogs)}")
    if len({c.species_id for c in dogs}) != 1:
        raise ValidationError("dog categories must share a single species_id")

    categories = {c.id: c for c in cats}

    species_index: dict[str, list[int]] = {}
    for c in cats:
        species_index.setdefault(c.species_id, []).append(c.id)
    species_tuples = {s: tuple(sorted(v)) for s, v in species_index.items()}
    if sum(len(v) for v in species_tuples.values()) != len(cats):
        raise ValidationError("species_index does not partition the categories")

    raw_cores, raw_pair_weights = _read_cores(core_path)
    if set(raw_cores) != set(CORE_NAMES):
        raise ValidationError(
            f"cores file must define exactly {sorted(CORE_NAMES)}, got {sorted(raw_cores)}"
        )
    cores: dict[str, CoreDefinition] = {}
    for name, core_ids in raw_cores.items():
        if not core_ids:
            raise ValidationError(f"core {name!r} is empty")
        unknown = set(core_ids) - set(categories)
        if unknown:
            raise ValidationError(f"core {name!r} references unknown ids {sorted(unknown)}")
        cores[name] = CoreDefinition(core_name=name, category_ids=frozenset(core_ids))

    pair_weights: dict[frozenset[str], float] = {}
    for key, weight in raw_pair_weights.items():
        parts = key.split("|")
        if len(parts) != 2 or parts[0] == parts[1] or not set(parts) <= set(CORE_NAMES):
            raise ValidationError(f"bad {PAIR_WEIGHTS_KEY} key {key!r}")
        if weight <= 0:
            raise ValidationError(f"{PAIR_WEIGHTS_KEY}[{key!r}] must be positive")
        pair_weights[frozenset(parts)] = weight

    return Taxonomy(
        categories=categories,
        cores=cores,
        species_index=species_tuples,
        core_pair_weights=pair_weights,
    )


def serialize_taxonomy(taxonomy: Taxonomy, categories_path: str | Path, cores_path: str | Path) -> None:
    """Write a taxonomy back out in the documented file formats."""
    with open(categories_path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["id", "name", "species_id", "is_dog", "is_insect"])
        for cid in sorted(taxonomy.categories):
            c = taxonomy.categories[cid]
            w.writerow(
                [c.id, c.name, c.species_id, "true" if c.is_dog else "false", "true" if c.is_insect else "false"]
            )
    payload: dict[str, object] = {
        name: sorted(core.category_ids) for name, core in taxonomy.cores.items()
    }
    if taxonomy.core_pair_weights:
        payload[PAIR_WEIGHTS_KEY] = {
            "|".join(sorted(k)): v for k, v in taxonomy.core_pair_weights.items()
        }
    with open(cores_path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=1)
        f.write("\n")


def categories_in_core(taxonomy: Taxonomy, core_name: str) -> frozenset[int]:
    try:
        return taxonomy.cores[core_name].category_ids
    except KeyError:
        raise UnknownCore(f"unknown core {core_name!r}; expected one of {sorted(CORE_NAMES)}") from None
