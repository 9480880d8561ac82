"""Run configuration and its ``key = value`` file format.

A config file holds one ``key = value`` per line; ``#`` starts a comment and an
optional ``[bouquet]`` header is accepted.  Command-line flags override file
values.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from .errors import BouquetError


class ConfigError(BouquetError, ValueError):
    pass


@dataclass
class RunConfig:
    depth: int = 64
    orbit_depth: int = 4000
    tol: float = 1e-9
    ray_tol: float = 1e-6
    ray_depth: int = 20
    Q: float = 5.0
    boundary_eps: float = 1e-9
    jobs: int = 1
    seed: int = 7
    out_dir: str = "."

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("tol", "ray_tol", "boundary_eps"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("depth", "orbit_depth", "ray_depth", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.Q < 0:
            raise ConfigError("Q must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)

    def updated(self, **overrides) -> "RunConfig":
        values = self.to_dict()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**values)


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def parse_config(text: str) -> RunConfig:
    if not text.lstrip().startswith("["):
        text = "[bouquet]\n" + text
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(str(e)) from None
    values = {}
    for section in cp.sections():
        for key, raw in cp.items(section):
            if key not in _TYPES:
                raise ConfigError(f"unknown config key {key!r}")
            cast = _CASTS[str(_TYPES[key]).strip("'")]
            try:
                values[key] = cast(raw)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return RunConfig(**values)


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text)
