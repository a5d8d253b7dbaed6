"""World orchestration: steps active objects, assembles SignalFrames.

The world owns object states and per-signal smoothing state. It is
mutated by exactly one caller (the engine's tick loop); every step
consumes the poses the registry declared present this tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import magnet, rope, spring
from .types import (DT, ArenaBounds, MagnetParams, RopeParams, SignalFrame,
                    SpringParams, vec)

OBJECT_NAMES = ("rope", "spring", "magnetic")

# snapshot mode byte: single-object modes keep the OSC 1..3 codes,
# anything composite reports 7
MODE_CODES = {frozenset(): 0, frozenset(["rope"]): 1,
              frozenset(["spring"]): 2, frozenset(["magnetic"]): 3}


def mode_code(active: frozenset) -> int:
    return MODE_CODES.get(active, 7)


@dataclass(frozen=True)
class WorldConfig:
    active: frozenset = frozenset()
    rope: RopeParams = field(default_factory=RopeParams)
    spring: SpringParams = field(default_factory=SpringParams)
    magnet: MagnetParams = field(default_factory=MagnetParams)
    rope_anchors: tuple = (0, 1)
    spring_anchors: tuple = (0, 1)
    arena: ArenaBounds = field(default_factory=ArenaBounds)

    def validate(self) -> "WorldConfig":
        unknown = self.active - set(OBJECT_NAMES)
        if unknown:
            raise ValueError(f"unknown active objects {sorted(unknown)}")
        self.rope.validate()
        self.spring.validate()
        self.magnet.validate()
        self.arena.validate()
        for pair in (self.rope_anchors, self.spring_anchors):
            if len(pair) != 2 or pair[0] == pair[1]:
                raise ValueError(f"anchor pair {pair} must name two distinct agents")
        return self


class World:
    def __init__(self, config: WorldConfig, rng: np.random.Generator):
        self.config = config.validate()
        self.rng = rng
        self.rope_state = None
        self.spring_state = None
        self.magnet_state = None
        self.rope_mid_velocity = vec()
        self.audio_env = 0.0
        self.prev_positions = {}

    def set_config(self, config: WorldConfig):
        """Swap configuration; deactivated objects drop their state."""
        old = self.config
        self.config = config
        if "rope" not in config.active or config.rope.node_count != old.rope.node_count:
            self.rope_state = None
            self.rope_mid_velocity = vec()
        if "spring" not in config.active:
            self.spring_state = None
        if ("magnetic" not in config.active
                or config.magnet.particle_count != old.magnet.particle_count):
            self.magnet_state = None

    def step(self, poses: dict, dt: float = DT) -> SignalFrame:
        """Advance every active object one tick and collect signals.

        poses maps agent_id -> AgentPose for agents present this tick.
        Objects whose anchors are missing freeze: state carries over and
        their signals are omitted from the frame.
        """
        cfg = self.config
        values = {}
        frozen = []

        speeds = {}
        for aid, pose in poses.items():
            prev = self.prev_positions.get(aid)
            if prev is None:
                speed = 0.0
            else:
                delta = pose.position - prev
                speed = math.sqrt(float(delta.dot(delta))) / dt
            speeds[aid] = speed
            values[f"agent.{aid}.speed"] = speed
        self.prev_positions = {aid: poses[aid].position for aid in poses}
        values["group.energy"] = (
            sum(s * s for s in speeds.values()) / len(speeds) if speeds else 0.0)
        values["audio.env"] = self.audio_env

        if "rope" in cfg.active:
            a_id, b_id = cfg.rope_anchors
            if a_id in poses and b_id in poses:
                pose_a, pose_b = poses[a_id], poses[b_id]
                try:
                    if self.rope_state is None:
                        self.rope_state = rope.attach_rope(cfg.rope, pose_a, pose_b)
                    self.rope_state = rope.step_rope(
                        self.rope_state, cfg.rope, pose_a, pose_b, dt)
                    sig = rope.rope_signals(
                        self.rope_state, self.rope_mid_velocity, pose_a, pose_b, dt)
                    self.rope_mid_velocity = sig.mid_velocity
                    values["rope.v"] = sig.v
                    values["rope.a"] = sig.a
                except rope.DegenerateAnchorsError:
                    frozen.append("rope")
            else:
                frozen.append("rope")

        if "spring" in cfg.active:
            a_id, b_id = cfg.spring_anchors
            if a_id in poses and b_id in poses:
                self.spring_state = spring.step_spring(
                    cfg.spring, poses[a_id], poses[b_id], self.audio_env, dt,
                    prev=self.spring_state)
                values["spring.d"] = self.spring_state.d
                values["spring.h"] = self.spring_state.h
                values["spring.t"] = self.spring_state.t
            else:
                frozen.append("spring")

        if "magnetic" in cfg.active:
            if self.magnet_state is None:
                self.magnet_state = magnet.init_magnetic(cfg.magnet, cfg.arena, self.rng)
            self.magnet_state = magnet.step_magnetic(
                self.magnet_state, cfg.magnet, poses, dt, self.rng, cfg.arena)
            values["magnet.d"] = self.magnet_state.d_sum

        return SignalFrame(values=values, frozen=tuple(frozen)).validate()
