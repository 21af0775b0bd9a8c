"""Engine configuration: defaults, config file, environment, overrides.

Precedence, lowest to highest: built-in defaults, config file, COPER_*
environment variables, explicit overrides. The file format is key=value
lines with # comments. Resource paths default to the data files shipped
inside the package.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

from .errors import ConfigError
from .textproc import data_path

ENV_PREFIX = "COPER_"


@dataclass(frozen=True)
class EngineConfig:
    k1: float = 1.5
    b: float = 0.75
    pool: int = 800
    title_weight: float = 1.1
    omega_min: float = 0.1
    omega_max: float = 0.9
    embed_dim: int = 256
    embed_seed: int = 0
    top_k: int = 10
    keywords_per_doc: int = 10
    max_ngram: int = 3
    data_dir: Path = Path("coper_data")
    charmap_path: Path = None  # type: ignore[assignment]
    stopwords_path: Path = None  # type: ignore[assignment]
    lexicon_path: Path = None  # type: ignore[assignment]
    patterns_path: Path = None  # type: ignore[assignment]
    gazetteer_place_path: Path = None  # type: ignore[assignment]
    gazetteer_person_path: Path = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        defaults = {
            "charmap_path": "charmap_fa.tsv",
            "stopwords_path": "stopwords_fa.txt",
            "lexicon_path": "lexicon_fa.tsv",
            "patterns_path": "patterns.txt",
            "gazetteer_place_path": "gazetteer_place.txt",
            "gazetteer_person_path": "gazetteer_person.txt",
        }
        for name, resource in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, data_path(resource))
        self._validate()

    def _validate(self) -> None:
        if self.k1 <= 0:
            raise ConfigError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ConfigError(f"b must be within [0, 1], got {self.b}")
        if self.pool < 1:
            raise ConfigError(f"pool must be >= 1, got {self.pool}")
        if self.title_weight <= 0:
            raise ConfigError(f"title_weight must be > 0, got {self.title_weight}")
        if not 0.0 <= self.omega_min <= self.omega_max <= 1.0:
            raise ConfigError(
                "need 0 <= omega_min <= omega_max <= 1, got "
                f"{self.omega_min}, {self.omega_max}"
            )
        if self.embed_dim < 1:
            raise ConfigError(f"embed_dim must be >= 1, got {self.embed_dim}")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        if self.keywords_per_doc < 1:
            raise ConfigError(
                f"keywords_per_doc must be >= 1, got {self.keywords_per_doc}"
            )
        if self.max_ngram < 1:
            raise ConfigError(f"max_ngram must be >= 1, got {self.max_ngram}")
        for name in (
            "charmap_path",
            "stopwords_path",
            "lexicon_path",
            "patterns_path",
            "gazetteer_place_path",
            "gazetteer_person_path",
        ):
            path = getattr(self, name)
            if not Path(path).is_file():
                raise ConfigError(f"{name}: no such file: {path}")

    def fingerprint(self) -> dict:
        """The parameters an index build depends on, for staleness checks."""
        return {
            "embed_dim": self.embed_dim,
            "embed_seed": self.embed_seed,
            "title_weight": self.title_weight,
            "keywords_per_doc": self.keywords_per_doc,
            "max_ngram": self.max_ngram,
        }


_FIELD_TYPES = {f.name: f.type for f in fields(EngineConfig)}
_INT_KEYS = {"pool", "embed_dim", "embed_seed", "top_k", "keywords_per_doc", "max_ngram"}
_FLOAT_KEYS = {"k1", "b", "title_weight", "omega_min", "omega_max"}
_PATH_KEYS = {
    "data_dir",
    "charmap_path",
    "stopwords_path",
    "lexicon_path",
    "patterns_path",
    "gazetteer_place_path",
    "gazetteer_person_path",
}


def _coerce(key: str, raw: str, origin: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{origin}: bad value for {key}: {raw!r}")
    if key in _PATH_KEYS:
        return Path(raw).expanduser()
    raise ConfigError(f"{origin}: unknown configuration key {key!r}")


def _parse_file(path: Path) -> dict:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values: dict = {}
    for lineno, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {body!r}")
        key, _, raw = body.partition("=")
        key = key.strip()
        values[key] = _coerce(key, raw.strip(), f"{path}:{lineno}")
    return values


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    **overrides,
) -> EngineConfig:
    """Assemble the effective configuration.

    Environment variables are COPER_<KEY> (e.g. COPER_POOL=500). Keyword
    overrides win over everything; unknown keys fail loudly.
    """
    values: dict = {}
    if path is not None:
        values.update(_parse_file(Path(path)))
    env = os.environ if env is None else env
    for key in _FIELD_TYPES:
        env_key = ENV_PREFIX + key.upper()
        if env_key in env:
            values[key] = _coerce(key, env[env_key], env_key)
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown configuration key {key!r}")
        values[key] = value
    return EngineConfig(**values)
