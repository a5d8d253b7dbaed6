"""Configuration schema: server settings and world/engine state.

All files are JSON with a versioned "schema": 1 field. The engine
slice (seed + world + mappings) also serves as the session-log header
so a replay can rebuild the exact starting state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from ..mapping import MappingTable, default_mapping_table
from ..physics.types import (ArenaBounds, MagnetParams, RopeParams,
                             SpringParams, vec)
from ..physics.world import OBJECT_NAMES, WorldConfig

SCHEMA_VERSION = 1

DEFAULT_POSE_PORT = 13601
DEFAULT_CONTROL_PORT = 13600
DEFAULT_STREAM_PORT = 13602
DEFAULT_SYNTH_SINK = ("127.0.0.1", 9000)

TICK_RATE = 60
SNAPSHOT_RATE = 30


class ConfigError(ValueError):
    pass


MODE_WORDS = {"none": frozenset(), "rope": frozenset(["rope"]),
              "spring": frozenset(["spring"]),
              "magnetic": frozenset(["magnetic"]),
              "all": frozenset(OBJECT_NAMES)}


def active_from_word(word: str) -> frozenset:
    if word in MODE_WORDS:
        return MODE_WORDS[word]
    # accept the "+"-joined fallback active_to_word emits for ad-hoc subsets
    parts = word.split("+")
    if parts and all(p in OBJECT_NAMES for p in parts):
        return frozenset(parts)
    raise ConfigError(f"unknown mode {word!r}, want one of {sorted(MODE_WORDS)}")


def active_to_word(active: frozenset) -> str:
    for word, members in MODE_WORDS.items():
        if members == active:
            return word
    return "+".join(sorted(active))


def _params_from_json(cls, obj, label):
    if obj is None:
        return cls()
    if not isinstance(obj, dict):
        raise ConfigError(f"{label} params must be an object")
    try:
        if cls is MagnetParams and "monopoles" in obj:
            obj = dict(obj, monopoles=tuple(obj["monopoles"]))
        return cls(**obj).validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {label} params: {exc}") from None


def world_config_to_json(config: WorldConfig) -> dict:
    return {
        "mode": active_to_word(config.active),
        "rope": {"mass_total": config.rope.mass_total,
                 "elasticity": config.rope.elasticity,
                 "natural_length": config.rope.natural_length,
                 "width": config.rope.width,
                 "node_count": config.rope.node_count},
        "spring": {name: getattr(config.spring, name)
                   for name in SpringParams.RANGES},
        "magnet": {"monopoles": list(config.magnet.monopoles),
                   "particle_count": config.magnet.particle_count,
                   "mobility": config.magnet.mobility,
                   "softening_eps": config.magnet.softening_eps,
                   "respawn_radius": config.magnet.respawn_radius},
        "rope_anchors": list(config.rope_anchors),
        "spring_anchors": list(config.spring_anchors),
        "arena": {"min": list(map(float, config.arena.min_corner)),
                  "max": list(map(float, config.arena.max_corner))},
    }


def world_config_from_json(obj: dict) -> WorldConfig:
    if not isinstance(obj, dict):
        raise ConfigError("world config must be an object")
    arena = ArenaBounds()
    if "arena" in obj:
        spec = obj["arena"]
        try:
            arena = ArenaBounds(min_corner=vec(*spec["min"]),
                                max_corner=vec(*spec["max"]))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad arena: {exc}") from None
    try:
        config = WorldConfig(
            active=active_from_word(obj.get("mode", "none")),
            rope=_params_from_json(RopeParams, obj.get("rope"), "rope"),
            spring=_params_from_json(SpringParams, obj.get("spring"), "spring"),
            magnet=_params_from_json(MagnetParams, obj.get("magnet"), "magnet"),
            rope_anchors=tuple(obj.get("rope_anchors", (0, 1))),
            spring_anchors=tuple(obj.get("spring_anchors", (0, 1))),
            arena=arena,
        ).validate()
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return config


@dataclass(frozen=True)
class EngineConfig:
    """Everything a deterministic run needs: seed + initial state."""
    world: WorldConfig = field(default_factory=WorldConfig)
    mappings_json: dict = field(default_factory=lambda: default_mapping_table().to_json())
    seed: int = 0

    def build_table(self) -> MappingTable:
        return MappingTable.from_json(self.mappings_json)

    def to_json(self) -> dict:
        return {"schema": SCHEMA_VERSION, "seed": self.seed,
                "world": world_config_to_json(self.world),
                "mappings": self.mappings_json}

    @classmethod
    def from_json(cls, obj: dict) -> "EngineConfig":
        if not isinstance(obj, dict) or obj.get("schema") != SCHEMA_VERSION:
            raise ConfigError("engine config must declare schema 1")
        mappings = obj.get("mappings")
        if mappings is None or mappings == "default":
            mappings = default_mapping_table().to_json()
        try:
            MappingTable.from_json(mappings)
        except ValueError as exc:
            raise ConfigError(f"bad mappings: {exc}") from None
        return cls(world=world_config_from_json(obj.get("world", {})),
                   mappings_json=mappings, seed=int(obj.get("seed", 0)))


@dataclass(frozen=True)
class ServerConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    pose_port: int = DEFAULT_POSE_PORT
    control_port: int = DEFAULT_CONTROL_PORT
    stream_port: int = DEFAULT_STREAM_PORT
    synth_sink: tuple = DEFAULT_SYNTH_SINK
    tick_rate: int = TICK_RATE
    snapshot_rate: int = SNAPSHOT_RATE
    json_snapshots: bool = False
    record_path: str = ""

    def validate(self) -> "ServerConfig":
        if self.tick_rate != TICK_RATE or self.snapshot_rate != SNAPSHOT_RATE:
            # dt is baked into the physics contract; other rates are a
            # config error rather than a silent behavior change
            raise ConfigError(
                f"tick_rate must be {TICK_RATE} and snapshot_rate {SNAPSHOT_RATE}")
        for name in ("pose_port", "control_port", "stream_port"):
            port = getattr(self, name)
            if not 0 <= port <= 65535:
                raise ConfigError(f"{name} {port} outside 0..65535")
        return self


def _parse_sink(text) -> tuple:
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return str(text[0]), int(text[1])
    if isinstance(text, str) and ":" in text:
        host, _, port = text.rpartition(":")
        try:
            return host, int(port)
        except ValueError:
            pass
    raise ConfigError(f"synth sink must be host:port, got {text!r}")


def server_config_from_json(obj: dict) -> ServerConfig:
    if not isinstance(obj, dict) or obj.get("schema") != SCHEMA_VERSION:
        raise ConfigError("server config must declare schema 1")
    engine = EngineConfig.from_json(
        {"schema": SCHEMA_VERSION, "seed": obj.get("seed", 0),
         "world": obj.get("world", {}), "mappings": obj.get("mappings")})
    try:
        config = ServerConfig(
            engine=engine,
            pose_port=int(obj.get("pose_port", DEFAULT_POSE_PORT)),
            control_port=int(obj.get("control_port", DEFAULT_CONTROL_PORT)),
            stream_port=int(obj.get("stream_port", DEFAULT_STREAM_PORT)),
            synth_sink=_parse_sink(obj.get("synth_sink", list(DEFAULT_SYNTH_SINK))),
            tick_rate=int(obj.get("tick_rate", TICK_RATE)),
            snapshot_rate=int(obj.get("snapshot_rate", SNAPSHOT_RATE)),
            json_snapshots=bool(obj.get("json_snapshots", False)),
            record_path=str(obj.get("record", "") or ""),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return config.validate()


def load_server_config(path) -> ServerConfig:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return server_config_from_json(obj)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
