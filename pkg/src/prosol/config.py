"""Run configuration: caps, levels and seeds in one YAML file."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml


@dataclass(frozen=True)
class Config:
    seed: int = 0
    element_cap: int = 2**24
    layer_cap: int = 2**20
    lattice_cap: int = 2000
    max_tree_level: int = 7
    tree_levels: int = 5
    enumeration_limit: int = 5000
    ultrametric_triples: int = 1000
    ultrametric_sample: int = 14
    max_word_length: int = 12
    magnus_max_class: int = 8
    padic_max_a: int = 12
    tower_depth: int = 6
    workers: int = 1


class ConfigError(ValueError):
    pass


def default_config_text() -> str:
    return resources.files("prosol.data").joinpath("config.yaml").read_text()


def load_config(path: str | Path | None = None) -> Config:
    """Defaults from the packaged config.yaml, overridden by ``path`` if given."""
    data = yaml.safe_load(default_config_text()) or {}
    if path is not None:
        data.update(yaml.safe_load(Path(path).read_text()) or {})
    known = {f.name for f in dataclasses.fields(Config)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return Config(**{k: int(v) for k, v in data.items()})
