"""GFP1 pose datagram wire format and the latest-wins client registry.

Pose ingest is superseding telemetry: no retransmit, no ordering
guarantee, strictly-higher sequence numbers win. Everything else is
dropped and counted by reason.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..physics.types import ABSENT_AFTER_TICKS, MAX_AGENTS, AgentPose

POSE_MAGIC = b"GFP1"
_POSE = struct.Struct(">4sB3sIQ3f4f")
POSE_SIZE = _POSE.size
assert POSE_SIZE == 48

DROP_REASONS = ("length", "magic", "agent_id", "non_finite")


class DatagramError(ValueError):
    def __init__(self, reason: str, detail: str):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason


@dataclass(frozen=True)
class PoseDatagram:
    agent_id: int
    seq: int
    timestamp_us: int
    position: np.ndarray
    orientation: np.ndarray

    @property
    def pose(self) -> AgentPose:
        return AgentPose(agent_id=self.agent_id, position=self.position,
                         orientation=self.orientation,
                         timestamp_us=self.timestamp_us)


def parse_pose_datagram(data: bytes) -> PoseDatagram:
    if len(data) != POSE_SIZE:
        raise DatagramError("length", f"got {len(data)} bytes, need {POSE_SIZE}")
    magic, agent_id, _reserved, seq, ts, px, py, pz, qx, qy, qz, qw = _POSE.unpack(data)
    if magic != POSE_MAGIC:
        raise DatagramError("magic", f"got {magic!r}")
    if agent_id >= MAX_AGENTS:
        raise DatagramError("agent_id", f"agent {agent_id} outside 0..{MAX_AGENTS - 1}")
    position = np.array([px, py, pz], dtype=np.float64)
    orientation = np.array([qx, qy, qz, qw], dtype=np.float64)
    if not (np.isfinite(position).all() and np.isfinite(orientation).all()):
        raise DatagramError("non_finite", "position or orientation not finite")
    return PoseDatagram(agent_id=agent_id, seq=seq, timestamp_us=ts,
                        position=position, orientation=orientation)


def encode_pose_datagram(agent_id: int, seq: int, timestamp_us: int,
                         position, orientation) -> bytes:
    return _POSE.pack(POSE_MAGIC, agent_id, b"\x00\x00\x00", seq, timestamp_us,
                      float(position[0]), float(position[1]), float(position[2]),
                      float(orientation[0]), float(orientation[1]),
                      float(orientation[2]), float(orientation[3]))


@dataclass
class _AgentSlot:
    pose: AgentPose
    seq: int
    last_heard_tick: int


@dataclass
class ClientRegistry:
    """Latest pose per agent. Memory is O(MAX_AGENTS) by construction."""

    slots: dict = field(default_factory=dict)
    drops: dict = field(default_factory=lambda: {r: 0 for r in DROP_REASONS})
    stale: int = 0
    accepted: int = 0

    def ingest_bytes(self, data: bytes, tick: int):
        """Parse + ingest; returns the datagram if accepted, else None."""
        try:
            d = parse_pose_datagram(data)
        except DatagramError as exc:
            self.drops[exc.reason] += 1
            return None
        return d if self.ingest(d, tick) else None

    def ingest(self, d: PoseDatagram, tick: int) -> bool:
        slot = self.slots.get(d.agent_id)
        if slot is not None and d.seq <= slot.seq:
            self.stale += 1
            return False
        self.slots[d.agent_id] = _AgentSlot(pose=d.pose, seq=d.seq,
                                            last_heard_tick=tick)
        self.accepted += 1
        return True

    def present(self, tick: int) -> dict:
        """agent_id -> AgentPose for agents heard within the last second."""
        return {aid: slot.pose for aid, slot in self.slots.items()
                if tick - slot.last_heard_tick <= ABSENT_AFTER_TICKS}

    def known(self) -> dict:
        return {aid: slot.pose for aid, slot in self.slots.items()}
