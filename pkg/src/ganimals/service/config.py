"""Service configuration: dataclass defaults, JSON file, env overrides.

Environment variables use the GANIMALS_ prefix and override file values,
e.g. GANIMALS_N_WORLDS=8 or GANIMALS_MIX=0.25,0.25,0.25,0.25.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Mapping

from ..ecology import (
    DEFAULT_DECAY,
    DEFAULT_FEED_AMOUNT,
    DEFAULT_INITIAL_ENERGY,
    DEFAULT_SEED_SET_SIZE,
)
from ..errors import ConfigError, InvalidMix
from ..sampler import DEFAULT_G0_TRUNCATION, DEFAULT_LEADERBOARD_K, PolicyMix

ENV_PREFIX = "GANIMALS_"


@dataclass(frozen=True)
class ServiceConfig:
    n_worlds: int = 4
    mix: tuple[float, float, float, float] = (0.30, 0.30, 0.30, 0.10)
    leaderboard_k: int = DEFAULT_LEADERBOARD_K
    initial_energy: float = DEFAULT_INITIAL_ENERGY
    decay: float = DEFAULT_DECAY
    feed_amount: float = DEFAULT_FEED_AMOUNT
    tick_seconds: float = 0.0  # 0 disables the background ticker (manual /api/tick)
    seed_set_size: int = DEFAULT_SEED_SET_SIZE
    g0_truncation: float = DEFAULT_G0_TRUNCATION
    resolution: int = 256
    backend_url: str | None = None  # None selects the procedural mock backend
    backend_retries: int = 3
    data_dir: str | None = None  # None keeps the event log and images in memory
    master_seed: int = 0

    def policy_mix(self) -> PolicyMix:
        return PolicyMix(*self.mix)

    def validate(self) -> "ServiceConfig":
        if self.n_worlds < 1:
            raise ConfigError("n_worlds must be >= 1")
        if len(self.mix) != 4:
            raise ConfigError("mix must have four probabilities")
        try:
            self.policy_mix().validate()
        except InvalidMix as exc:
            raise ConfigError(str(exc)) from exc
        if self.leaderboard_k < 1:
            raise ConfigError("leaderboard_k must be >= 1")
        if self.initial_energy <= 0:
            raise ConfigError("initial_energy must be positive")
        if self.decay <= 0:
            raise ConfigError("decay must be positive")
        if self.feed_amount <= 0:
            raise ConfigError("feed_amount must be positive")
        if self.tick_seconds < 0:
            raise ConfigError("tick_seconds must be >= 0")
        if self.seed_set_size < 0:
            raise ConfigError("seed_set_size must be >= 0")
        if not (0.0 < self.g0_truncation <= 1.0):
            raise ConfigError("g0_truncation must lie in (0, 1]")
        if self.resolution < 1:
            raise ConfigError("resolution must be >= 1")
        if self.backend_retries < 1:
            raise ConfigError("backend_retries must be >= 1")
        if not (0 <= self.master_seed < 2**64):
            raise ConfigError("master_seed must fit in u64")
        return self

    def to_dict(self) -> dict:
        out = asdict(self)
        out["mix"] = list(self.mix)
        return out


_INT_FIELDS = {"n_worlds", "leaderboard_k", "seed_set_size", "resolution", "backend_retries", "master_seed"}
_FLOAT_FIELDS = {"initial_energy", "decay", "feed_amount", "tick_seconds", "g0_truncation"}
_STR_FIELDS = {"backend_url", "data_dir"}


def _coerce(name: str, raw) -> object:
    try:
        if name == "mix":
            if isinstance(raw, str):
                raw = [part.strip() for part in raw.split(",")]
            values = tuple(float(v) for v in raw)
            if len(values) != 4:
                raise ValueError("expected four probabilities")
            return values
        if name in _INT_FIELDS:
            return int(raw)
        if name in _FLOAT_FIELDS:
            return float(raw)
        if name in _STR_FIELDS:
            return None if raw in (None, "") else str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {raw!r} ({exc})") from exc
    raise ConfigError(f"unknown config field {name!r}")


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] | None = None
) -> ServiceConfig:
    """Defaults <- JSON file <- GANIMALS_* environment overrides."""
    values: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        for name, value in raw.items():
            values[name] = _coerce(name, value)
    env = os.environ if env is None else env
    known = {f.name for f in fields(ServiceConfig)}
    for name in sorted(known):
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            values[name] = _coerce(name, env[env_key])
    return ServiceConfig(**values).validate()
