"""Experiment configuration: one flat key/value file covering every knob.

The file format is deliberately plain so configs diff cleanly:

    # comment
    key = value            # scalars: int, float, str, true/false
    key = v1,v2,v3         # tuples, comma separated

Keys are the field names of the parameter dataclasses; every key has a
default, so an empty file is a valid config.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields, replace

from .baselines import POLICY_NAMES
from .channel import ChannelParams
from .comm import CommParams
from .dqn import DQNParams
from .env import EnvParams
from .topology import TopologyParams


@dataclass
class RunParams:
    """Sweep shape and output plumbing."""
    vehicle_counts: tuple = (20, 40, 60, 80, 100)
    seeds: tuple = (0, 1, 2, 3, 4)
    policies: tuple = ("seed", "dqn-wopa", "random")
    episodes: int = 300
    train_every: int = 1
    out_dir: str = "results"
    log_subframes: bool = False
    save_checkpoints: bool = True

    def validate(self) -> None:
        if not self.vehicle_counts or any(v <= 0 for v in self.vehicle_counts):
            raise ValueError("vehicle_counts must be positive")
        if not self.seeds:
            raise ValueError("at least one seed required")
        for p in self.policies:
            if p not in POLICY_NAMES:
                raise ValueError(f"unknown policy {p!r}; expected one of {POLICY_NAMES}")
        if not self.policies:
            raise ValueError("at least one policy required")
        if self.episodes < 0:
            raise ValueError("episodes must be non-negative")
        if self.train_every < 1:
            raise ValueError("train_every must be >= 1")


@dataclass
class ExperimentConfig:
    topology: TopologyParams = field(default_factory=TopologyParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    comm: CommParams = field(default_factory=CommParams)
    dqn: DQNParams = field(default_factory=DQNParams)
    env: EnvParams = field(default_factory=EnvParams)
    run: RunParams = field(default_factory=RunParams)

    def validate(self) -> "ExperimentConfig":
        self.topology.validate()
        self.channel.validate()
        self.comm.validate()
        self.dqn.validate()
        self.env.validate()
        self.run.validate()
        return self


_SECTIONS = ("topology", "channel", "comm", "dqn", "env", "run")

# config keys are globally unique across the section dataclasses
_KEY_TO_SECTION: dict[str, str] = {}
for _sec, _cls in (("topology", TopologyParams), ("channel", ChannelParams),
                   ("comm", CommParams), ("dqn", DQNParams),
                   ("env", EnvParams), ("run", RunParams)):
    for _f in fields(_cls):
        if _f.name in _KEY_TO_SECTION:
            raise RuntimeError(f"duplicate config key {_f.name}")
        _KEY_TO_SECTION[_f.name] = _sec

# accepted spelling for a single-policy run
_ALIASES = {"policy": "policies"}


def _coerce_scalar(text: str, like) -> object:
    if isinstance(like, bool):
        low = text.strip().lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    return text.strip()


def _coerce(text: str, default) -> object:
    if isinstance(default, tuple):
        parts = [p.strip() for p in text.split(",") if p.strip() != ""]
        elem = default[0] if default else ""
        return tuple(_coerce_scalar(p, elem) for p in parts)
    return _coerce_scalar(text, default)


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def set_key(config: ExperimentConfig, key: str, text: str) -> ExperimentConfig:
    """Return a copy of ``config`` with one flat key overridden from text."""
    key = _ALIASES.get(key, key)
    section_name = _KEY_TO_SECTION.get(key)
    if section_name is None:
        raise KeyError(f"unknown config key {key!r}")
    section = getattr(config, section_name)
    default = getattr(section, key)
    value = _coerce(text, default)
    return replace(config, **{section_name: replace(section, **{key: value})})


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    config = base if base is not None else ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        try:
            config = set_key(config, key.strip(), value)
        except (KeyError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return config


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    with open(path) as f:
        return parse_config_text(f.read(), base)


def config_items(config: ExperimentConfig) -> list[tuple[str, str]]:
    """All (key, formatted value) pairs in section order."""
    items = []
    for section_name in _SECTIONS:
        section = getattr(config, section_name)
        for f in dataclasses.fields(section):
            items.append((f.name, _format_value(getattr(section, f.name))))
    return items


def dump_config(config: ExperimentConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in config_items(config))
