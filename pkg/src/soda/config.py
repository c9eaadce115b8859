"""Engine configuration.

One precedence chain: built-in defaults, then the config file (key=value
lines), then SODA_* environment variables, then explicit overrides (CLI
flags). Keys use dotted names; the environment form uppercases them and
replaces dots with underscores (match.alpha -> SODA_MATCH_ALPHA).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

from soda.errors import ConfigError
from soda.index import IndexConfig
from soda.matcher import MatcherConfig
from soda.querygraph import BuilderCaps

ENV_PREFIX = "SODA_"

DEFAULT_PORT = 8075


@dataclass
class Config:
    index_properties: str = "*"  # comma-separated IRIs or *
    index_uri_fragments: bool = True
    index_max_ngram: int = 4
    pagerank_damping: float = 0.85
    pagerank_tol: float = 1e-6
    match_alpha: float = 0.7
    match_semantic_threshold: float = 0.4
    match_top_n: int = 5
    match_fuzzy: bool = True
    match_embeddings: str = ""
    rules_file: str = ""
    builder_max_combinations: int = 64
    builder_max_graphs: int = 50
    gen_limit: int = 100
    gen_top_n_interpretations: int = 10
    gen_use_values: bool = False
    exec_mode: str = "embedded"  # embedded | remote
    exec_endpoint: str = ""
    exec_timeout: float = 30.0

    def index_config(self) -> IndexConfig:
        props = None
        if self.index_properties.strip() != "*":
            props = tuple(
                p.strip() for p in self.index_properties.split(",") if p.strip()
            )
        return IndexConfig(
            properties=props,
            uri_fragments=self.index_uri_fragments,
            max_ngram=self.index_max_ngram,
        )

    def matcher_config(self, ablation: bool = False) -> MatcherConfig:
        return MatcherConfig(
            alpha=self.match_alpha,
            semantic_threshold=self.match_semantic_threshold,
            top_n=self.match_top_n,
            fuzzy=self.match_fuzzy,
            max_window=self.index_max_ngram,
            ablation=ablation,
        )

    def builder_caps(self) -> BuilderCaps:
        return BuilderCaps(
            max_combinations=self.builder_max_combinations,
            max_graphs=self.builder_max_graphs,
        )

    def snapshot(self) -> dict:
        return {_field_to_key(f.name): getattr(self, f.name) for f in fields(self)}


def _field_to_key(name: str) -> str:
    return name.replace("_", ".", 1)


def _key_to_field(key: str) -> str:
    return key.replace(".", "_")


def _coerce(field_name: str, raw: str, current):
    if isinstance(current, bool):
        lowered = raw.strip().lower()
        if lowered in ("true", "1", "yes", "on"):
            return True
        if lowered in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"{field_name}: expected true/false, got {raw!r}")
    try:
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{field_name}: bad number {raw!r}") from exc
    return raw.strip()


def parse_config_text(text: str, base: Config | None = None) -> Config:
    config = base or Config()
    known = {f.name for f in fields(Config)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        field_name = _key_to_field(key.strip())
        if field_name not in known:
            raise ConfigError(f"config line {lineno}: unknown key {key.strip()!r}")
        setattr(config, field_name, _coerce(field_name, value, getattr(config, field_name)))
    return config


def load_config(
    path: str | None = None,
    env: dict[str, str] | None = None,
    overrides: dict[str, object] | None = None,
) -> Config:
    """Resolve the effective config: defaults < file < env < overrides."""
    config = Config()
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                config = parse_config_text(fh.read(), config)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc

    env = os.environ if env is None else env
    known = {f.name for f in fields(Config)}
    for field_name in sorted(known):
        env_key = ENV_PREFIX + field_name.upper()
        if env_key in env:
            setattr(
                config,
                field_name,
                _coerce(field_name, env[env_key], getattr(config, field_name)),
            )

    for key, value in (overrides or {}).items():
        field_name = _key_to_field(key)
        if field_name not in known:
            raise ConfigError(f"unknown config override {key!r}")
        if isinstance(value, str):
            value = _coerce(field_name, value, getattr(config, field_name))
        setattr(config, field_name, value)
    if config.exec_mode not in ("embedded", "remote"):
        raise ConfigError(f"exec.mode must be embedded or remote, got {config.exec_mode!r}")
    return config
