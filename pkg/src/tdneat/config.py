"""Algorithm parameters and the flat ``key = value`` config file reader."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

_PROBABILITIES = (
    "bias_mutate_rate", "bias_replace_rate", "weight_mutate_rate", "weight_replace_rate",
    "conn_add_prob", "conn_delete_prob", "enabled_mutate_rate", "node_add_prob",
    "node_delete_prob", "survival_threshold", "du_mutate_rate", "dy_mutate_rate",
    "disabled_inherit_prob",
)

ALGORITHMS = ("neat", "dneat")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    pop_size: int = 100
    weight_init_mean: float = 0.0
    bias_init_mean: float = 0.0
    weight_init_stdev: float = 0.5
    bias_init_stdev: float = 0.5
    du_init_max: int = 20
    dy_init_max: int = 20
    bias_mutate_power: float = 0.033
    bias_mutate_rate: float = 0.2
    bias_replace_rate: float = 0.2
    weight_mutate_power: float = 0.1
    weight_mutate_rate: float = 0.6
    weight_replace_rate: float = 0.05
    conn_add_prob: float = 0.2
    conn_delete_prob: float = 0.2
    enabled_mutate_rate: float = 0.2
    node_add_prob: float = 0.2
    node_delete_prob: float = 0.2
    compatibility_threshold: float = 2.3
    max_stagnation: int = 25
    species_elitism: int = 3
    elitism: int = 10
    survival_threshold: float = 0.25
    du_mutate_rate: float = 0.2
    dy_mutate_rate: float = 0.2
    du_mutate_power: float = 2
    dy_mutate_power: float = 2
    # not among the published parameters
    disjoint_coefficient: float = 1.0
    weight_coefficient: float = 0.5
    disabled_inherit_prob: float = 0.75
    generations: int = 2500
    calls: int = 10
    seed: int = 1
    algo: str = "dneat"

    def __post_init__(self):
        for name in _PROBABILITIES:
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")
        for f in fields(self):
            v = getattr(self, f.name)
            if f.type in ("int", "float") and f.name != "seed" and v < 0:
                raise ConfigError(f"{f.name} must be nonnegative, got {v}")
        if self.pop_size < 1:
            raise ConfigError("pop_size must be at least 1")
        if self.pop_size < self.elitism:
            raise ConfigError(f"pop_size ({self.pop_size}) must be >= elitism ({self.elitism})")
        if self.calls < 1:
            raise ConfigError("calls must be at least 1")
        if self.algo not in ALGORITHMS:
            raise ConfigError(f"algo must be one of {ALGORITHMS}, got {self.algo!r}")

    @property
    def delays_evolve(self) -> bool:
        return self.algo == "dneat"

    def replace(self, **changes) -> "Config":
        return dataclasses.replace(self, **changes)


def _convert(name: str, type_name: str, raw: str, lineno: int):
    try:
        if type_name == "int":
            return int(raw)
        if type_name == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse {name} = {raw!r} as {type_name}") from None
    return raw


def parse_config(text: str, **overrides) -> Config:
    """Parse flat ``key = value`` lines; ``#`` starts a comment.

    Keys missing from the text keep their defaults. ``overrides`` with a value
    of ``None`` are ignored, which lets CLI flags pass through unset.
    """
    types = {f.name: f.type for f in fields(Config)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown parameter {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate parameter {key!r}")
        values[key] = _convert(key, types[key], raw, lineno)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return Config(**values)


def load_config(path: str | Path | None, **overrides) -> Config:
    text = "" if path is None else Path(path).read_text(encoding="utf-8")
    return parse_config(text, **overrides)


def format_config(config: Config) -> str:
    return "".join(f"{f.name} = {getattr(config, f.name)}\n" for f in fields(config))
