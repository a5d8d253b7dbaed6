"""Spring between two agents: separation, height difference, tension.

The spring has no integrated state of its own; d, h and t follow the
anchor poses directly each tick. visual_amplitude tracks the external
audio envelope through an EMA so the broadcast visual breathes instead
of flickering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .types import DT, AgentPose, SpringParams

VISUAL_TAU = 0.2


@dataclass(frozen=True)
class SpringState:
    anchor_ids: tuple
    d: float                  # ground-plane separation, m
    h: float                  # signed vertical difference y_a - y_b, m
    t: float                  # signed tension k * (d - rest_length), N
    visual_amplitude: float   # EMA of audio.env, [0, 1]


def step_spring(params: SpringParams, pose_a: AgentPose, pose_b: AgentPose,
                audio_env: float, dt: float = DT,
                prev: Optional[SpringState] = None) -> SpringState:
    dx = pose_a.position[0] - pose_b.position[0]
    dz = pose_a.position[2] - pose_b.position[2]
    d = math.hypot(dx, dz)
    h = float(pose_a.position[1] - pose_b.position[1])
    t = params.stiffness_k * (d - params.rest_length)

    env = min(max(float(audio_env), 0.0), 1.0)
    va = 0.0 if prev is None else prev.visual_amplitude
    va += (env - va) * (1.0 - math.exp(-dt / VISUAL_TAU))
    return SpringState(anchor_ids=(pose_a.agent_id, pose_b.agent_id),
                       d=d, h=h, t=t, visual_amplitude=va)
