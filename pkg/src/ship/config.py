"""Server configuration, loadable from a small TOML file.

    [server]
    host = "127.0.0.1"
    port = 8080
    cors_origins = ["http://localhost:5173"]

    [search]
    cache_capacity = 1024
    page_size = 10

    [boosts]
    recency_weight = 0.2
    response_weight = 0.1

The SHIP_PORT environment variable overrides the port; nothing else is
overridable from the environment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .index import BoostConfig


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ApiConfig:
    index_path: str
    host: str = "127.0.0.1"
    port: int = 8080
    cache_capacity: int = 1024
    page_size: int = 10
    boosts: BoostConfig = field(default_factory=BoostConfig)
    cors_origins: tuple[str, ...] = ()

    def __post_init__(self):
        if not (0 < self.port < 65536):
            raise ConfigError(f"invalid port {self.port}")
        if self.cache_capacity < 1:
            raise ConfigError("cache_capacity must be >= 1")
        if self.page_size < 1:
            raise ConfigError("page_size must be >= 1")


def load_config(index_path: str, config_file: str | Path | None = None, port: int | None = None) -> ApiConfig:
    """Merge defaults, the optional TOML file, an explicit port and SHIP_PORT."""
    raw = {}
    if config_file is not None:
        raw = tomllib.loads(Path(config_file).read_text(encoding="utf-8"))
    server = raw.get("server", {})
    search = raw.get("search", {})
    boosts = raw.get("boosts", {})

    chosen_port = port if port is not None else int(server.get("port", 8080))
    env_port = os.environ.get("SHIP_PORT")
    if env_port:
        chosen_port = int(env_port)

    return ApiConfig(
        index_path=index_path,
        host=str(server.get("host", "127.0.0.1")),
        port=chosen_port,
        cache_capacity=int(search.get("cache_capacity", 1024)),
        page_size=int(search.get("page_size", 10)),
        boosts=BoostConfig(
            recency_weight=float(boosts.get("recency_weight", 0.2)),
            response_weight=float(boosts.get("response_weight", 0.1)),
        ),
        cors_origins=tuple(server.get("cors_origins", ())),
    )
