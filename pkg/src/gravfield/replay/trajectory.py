"""Closed-form scripted agent motions used as physics oracles.

Each spec yields a pose for any time t. Circle runs in the ground
plane at a fixed height above the circle center; Oscillate swings
sinusoidally along one axis. Recorded pulls an agent's poses out of a
previously written session log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..physics.types import AgentPose, quat_identity, vec

TICK_RATE = 60


class TrajectoryError(ValueError):
    pass


@dataclass(frozen=True)
class Stand:
    position: tuple

    def pose_at(self, t: float, agent_id: int) -> AgentPose:
        return _pose(agent_id, vec(*self.position), t)


@dataclass(frozen=True)
class Circle:
    center: tuple
    radius: float
    period: float
    phase: float = 0.0
    height: float = 1.5

    def __post_init__(self):
        if not (self.radius > 0 and self.period > 0):
            raise TrajectoryError("circle radius and period must be > 0")

    def pose_at(self, t: float, agent_id: int) -> AgentPose:
        angle = 2.0 * math.pi * t / self.period + self.phase
        pos = vec(self.center[0] + self.radius * math.cos(angle),
                  self.center[1] + self.height,
                  self.center[2] + self.radius * math.sin(angle))
        return _pose(agent_id, pos, t)


@dataclass(frozen=True)
class Oscillate:
    axis: str                  # "x" | "y" | "z"
    center: tuple
    amplitude: float
    period: float

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise TrajectoryError(f"axis must be x, y or z, got {self.axis!r}")
        if not (self.amplitude > 0 and self.period > 0):
            raise TrajectoryError("oscillate amplitude and period must be > 0")

    def pose_at(self, t: float, agent_id: int) -> AgentPose:
        pos = vec(*self.center)
        pos["xyz".index(self.axis)] += self.amplitude * math.sin(
            2.0 * math.pi * t / self.period)
        return _pose(agent_id, pos, t)


@dataclass(frozen=True)
class Recorded:
    """Poses for one agent looked up from a session log by tick."""
    log_path: str
    poses_by_tick: dict = field(default_factory=dict, compare=False)

    def load(self):
        from .sessionlog import read_session_log
        from ..server.datagrams import parse_pose_datagram
        from ..server.engine import REC_POSE
        header, records = read_session_log(self.log_path)
        for tick, kind, payload in records:
            if kind == REC_POSE:
                d = parse_pose_datagram(payload)
                self.poses_by_tick.setdefault(d.agent_id, {})[tick] = d
        return self

    def pose_at(self, t: float, agent_id: int):
        if not self.poses_by_tick:
            self.load()
        tick = int(round(t * TICK_RATE)) + 1
        d = self.poses_by_tick.get(agent_id, {}).get(tick)
        if d is None:
            return None
        return _pose(agent_id, d.position, t, orientation=d.orientation)


def _pose(agent_id: int, position, t: float, orientation=None) -> AgentPose:
    return AgentPose(agent_id=agent_id, position=position,
                     orientation=quat_identity() if orientation is None else orientation,
                     timestamp_us=int(round(t * 1e6))).validate()


def trajectory_pose(spec, t: float, agent_id: int = 0):
    """Pose at time t, or None where a recorded log has a gap."""
    if t < 0:
        raise TrajectoryError("t must be >= 0")
    return spec.pose_at(t, agent_id)


def trajectory_to_json(spec) -> dict:
    if isinstance(spec, Stand):
        return {"kind": "stand", "position": list(spec.position)}
    if isinstance(spec, Circle):
        return {"kind": "circle", "center": list(spec.center),
                "radius": spec.radius, "period": spec.period,
                "phase": spec.phase, "height": spec.height}
    if isinstance(spec, Oscillate):
        return {"kind": "oscillate", "axis": spec.axis,
                "center": list(spec.center), "amplitude": spec.amplitude,
                "period": spec.period}
    if isinstance(spec, Recorded):
        return {"kind": "recorded", "log": spec.log_path}
    raise TrajectoryError(f"unknown trajectory {spec!r}")


def trajectory_from_json(obj: dict):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise TrajectoryError(f"trajectory must be an object with a kind: {obj!r}")
    kind = obj.get("kind")
    try:
        if kind == "stand":
            return Stand(position=tuple(obj["position"]))
        if kind == "circle":
            return Circle(center=tuple(obj["center"]), radius=obj["radius"],
                          period=obj["period"], phase=obj.get("phase", 0.0),
                          height=obj.get("height", 1.5))
        if kind == "oscillate":
            return Oscillate(axis=obj["axis"], center=tuple(obj["center"]),
                             amplitude=obj["amplitude"], period=obj["period"])
        if kind == "recorded":
            return Recorded(log_path=obj["log"])
    except KeyError as exc:
        raise TrajectoryError(f"trajectory {kind!r} missing field {exc}") from None
    raise TrajectoryError(f"unknown trajectory kind {kind!r}")
