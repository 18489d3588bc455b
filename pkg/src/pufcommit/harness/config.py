"""Experiment configuration: versioned YAML, validated with field paths."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import yaml

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "EXPERIMENTS",
           "PROTOCOLS"]

EXPERIMENTS = (
    "completeness",
    "attack-original",
    "attack-neutralized",
    "binding",
    "hiding",
    "extraction",
    "costs",
    "lemmas",
    "uc-sim",
    "props-cq",
    "props-indist",
    "props-crp",
    "props-tq",
    "fe-roundtrip",
    "fe-uniformity",
)

PROTOCOLS = ("cpuf", "extpuf", "collextpuf", "original-extpuf", "uccompiler",
             "blob-equalities")


class ConfigError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass
class ExperimentConfig:
    experiment: str
    version: int = 1
    name: str = ""
    protocol: Optional[str] = None
    adversary: str = "honest"
    n: int = 16
    k: int = 4
    n_strings: int = 4
    trials: int = 100
    seed: int = 1
    d_noise: int = 3
    mode: str = "collective"          # uccompiler channel mode
    case: str = "receiver"            # uc-sim corruption case
    jobs: int = 1
    out: Optional[str] = None
    extras: dict = field(default_factory=dict)

    def validate(self) -> "ExperimentConfig":
        from ..adversaries import zoo

        if self.version != 1:
            raise ConfigError("version", f"unsupported config version {self.version}")
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment",
                              f"unknown experiment {self.experiment!r}; "
                              f"one of {', '.join(EXPERIMENTS)}")
        if self.protocol is not None and self.protocol not in PROTOCOLS:
            raise ConfigError("protocol", f"unknown protocol {self.protocol!r}")
        known = {s.strategy_id for s in zoo()} | {"honest", "all-senders"}
        if self.adversary not in known:
            raise ConfigError("adversary", f"unknown adversary {self.adversary!r}")
        if self.trials < 1:
            raise ConfigError("trials", "at least one trial required")
        if self.n < 2:
            raise ConfigError("n", "security parameter too small")
        if self.k < 1:
            raise ConfigError("k", "string length must be positive")
        if self.n_strings < 0:
            raise ConfigError("n_strings", "negative string count")
        if self.d_noise < 0 or self.d_noise % 2 == 0:
            raise ConfigError("d_noise", "noise bound must be odd (block width 2t+1)")
        if self.mode not in ("collective", "per-string"):
            raise ConfigError("mode", f"unknown channel mode {self.mode!r}")
        if self.case not in ("receiver", "sender"):
            raise ConfigError("case", f"unknown corruption case {self.case!r}")
        if self.jobs < 1:
            raise ConfigError("jobs", "at least one worker")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path: str | Path) -> ExperimentConfig:
    raw = yaml.safe_load(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a mapping")
    known = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}
    fields = {}
    extras = {}
    for key, value in raw.items():
        if key in known:
            fields[key] = value
        else:
            extras[key] = value
    if "experiment" not in fields:
        raise ConfigError("experiment", "missing required field")
    cfg = ExperimentConfig(extras=extras, **fields)
    return cfg.validate()
