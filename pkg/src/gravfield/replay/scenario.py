"""Scenario files: scripted agents plus a timed control script.

Scenarios share the server config schema family: JSON with
"schema": 1, a world section, and per-agent trajectory specs. Times
are seconds from session start; an event at time t is applied at the
drain of the tick covering t.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..server.config import ConfigError, EngineConfig
from .trajectory import trajectory_from_json, trajectory_to_json

TICK_RATE = 60


@dataclass(frozen=True)
class Scenario:
    agents: tuple              # (agent_id, trajectory spec) pairs
    duration: float
    engine: EngineConfig
    script: tuple = ()         # (time s, ControlEvent) pairs
    audio_script: tuple = ()   # (time s, level) pairs

    def validate(self) -> "Scenario":
        ids = [aid for aid, _ in self.agents]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate agent ids in scenario: {ids}")
        if not self.duration > 0:
            raise ConfigError("scenario duration must be > 0")
        for label, entries in (("script", self.script),
                               ("audio_script", self.audio_script)):
            times = [t for t, _ in entries]
            if any(t < 0 for t in times) or times != sorted(times):
                raise ConfigError(f"{label} times must be non-negative and non-decreasing")
        return self

    @property
    def ticks(self) -> int:
        return int(round(self.duration * TICK_RATE))


def tick_for_time(t: float) -> int:
    """The tick at whose drain an input timed t becomes visible."""
    return int(round(t * TICK_RATE)) + 1


def _event_from_json(obj: dict):
    from ..server.control import ControlError, handle_json_control
    try:
        event = handle_json_control(json.dumps(obj))
    except ControlError as exc:
        raise ConfigError(f"bad script event {obj!r}: {exc}") from None
    return event


def _event_to_json(event) -> dict:
    from ..mapping import event_to_json
    return event_to_json(event)


def scenario_from_json(obj: dict) -> Scenario:
    if not isinstance(obj, dict) or obj.get("schema") != 1:
        raise ConfigError("scenario must declare schema 1")
    try:
        agents = tuple(
            (int(a["agent_id"]), trajectory_from_json(a["trajectory"]))
            for a in obj.get("agents", []))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad agents section: {exc}") from None
    engine = EngineConfig.from_json(
        {"schema": 1, "seed": obj.get("seed", 0),
         "world": obj.get("world", {}), "mappings": obj.get("mappings")})
    script = tuple((float(e["t"]), _event_from_json(e["event"]))
                   for e in obj.get("script", []))
    audio = tuple((float(e["t"]), float(e["value"]))
                  for e in obj.get("audio_script", []))
    duration = obj.get("duration")
    if duration is None:
        raise ConfigError("scenario needs a duration in seconds")
    return Scenario(agents=agents, duration=float(duration), engine=engine,
                    script=script, audio_script=audio).validate()


def scenario_to_json(s: Scenario) -> dict:
    from ..server.config import world_config_to_json
    return {
        "schema": 1,
        "duration": s.duration,
        "seed": s.engine.seed,
        "world": world_config_to_json(s.engine.world),
        "mappings": s.engine.mappings_json,
        "agents": [{"agent_id": aid, "trajectory": trajectory_to_json(spec)}
                   for aid, spec in s.agents],
        "script": [{"t": t, "event": _event_to_json(ev)} for t, ev in s.script],
        "audio_script": [{"t": t, "value": v} for t, v in s.audio_script],
    }


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario {path} is not valid JSON: {exc}") from None
    return scenario_from_json(obj)
