"""GFS1 snapshot codec: self-describing full world state, big-endian.

Layout:
  "GFS1" | tick u64 | mode u8 | config_version u32
  agent block:  count u8, then per agent: id u8, present u8,
                position 3xf32, orientation 4xf32
  object block: count u8, then per object: type u8 (1 rope, 2 spring,
                3 magnetic), frozen u8, payload:
                  rope     node_count u16, nodes 3xf32 each
                  spring   end_a 3xf32, end_b 3xf32, d f32, h f32,
                           t f32, visual_amplitude f32
                  magnetic particle_count u32, particles 3xf32 each
  signal block: count u16, then per signal: fnv1a32(name) u32, f32,
                sorted by name
Signal names travel as fnv1a32 hashes; decoders resolve them against
the canonical name table.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..physics.types import CANONICAL_SIGNALS

MAGIC = b"GFS1"
OBJECT_CODES = {"rope": 1, "spring": 2, "magnetic": 3}
OBJECT_NAMES_BY_CODE = {v: k for k, v in OBJECT_CODES.items()}
MODE_NAMES_BY_CODE = {0: "none", 1: "rope", 2: "spring", 3: "magnetic", 7: "multi"}


def fnv1a32(name: str) -> int:
    h = 0x811C9DC5
    for byte in name.encode("ascii"):
        h ^= byte
        h = (h * 0x01000193) & 0xFFFFFFFF
    return h


KNOWN_HASHES = {fnv1a32(name): name for name in sorted(CANONICAL_SIGNALS)}


class SnapshotError(ValueError):
    pass


@dataclass(frozen=True)
class SnapshotAgent:
    agent_id: int
    present: bool
    position: tuple
    orientation: tuple


@dataclass(frozen=True)
class SnapshotObject:
    kind: str
    frozen: bool
    nodes: tuple = ()        # rope
    end_a: tuple = ()        # spring
    end_b: tuple = ()
    d: float = 0.0
    h: float = 0.0
    t: float = 0.0
    visual_amplitude: float = 0.0
    particles: tuple = ()    # magnetic


@dataclass(frozen=True)
class Snapshot:
    tick: int
    mode: int
    config_version: int
    agents: tuple
    objects: tuple
    signals: dict            # resolved name (or "hash:xxxxxxxx") -> float


def encode_snapshot(tick: int, mode: int, config_version: int,
                    agents, objects, signals: dict) -> bytes:
    """agents: (agent_id, present, position, orientation) tuples;
    objects: SnapshotObject values; signals: name -> float.
    """
    parts = [MAGIC, struct.pack(">QBI", tick, mode, config_version)]
    parts.append(struct.pack(">B", len(agents)))
    for aid, present, pos, quat in agents:
        parts.append(struct.pack(">BB3f4f", aid, 1 if present else 0,
                                 pos[0], pos[1], pos[2],
                                 quat[0], quat[1], quat[2], quat[3]))
    parts.append(struct.pack(">B", len(objects)))
    for obj in objects:
        parts.append(struct.pack(">BB", OBJECT_CODES[obj.kind],
                                 1 if obj.frozen else 0))
        if obj.kind == "rope":
            nodes = np.asarray(obj.nodes, dtype=np.float64)
            parts.append(struct.pack(">H", len(nodes)))
            parts.append(nodes.astype(">f4").tobytes())
        elif obj.kind == "spring":
            parts.append(struct.pack(">3f3f4f",
                                     *obj.end_a, *obj.end_b,
                                     obj.d, obj.h, obj.t, obj.visual_amplitude))
        else:
            particles = np.asarray(obj.particles, dtype=np.float64)
            parts.append(struct.pack(">I", len(particles)))
            parts.append(particles.astype(">f4").tobytes())
    names = sorted(signals)
    parts.append(struct.pack(">H", len(names)))
    for name in names:
        parts.append(struct.pack(">If", fnv1a32(name), signals[name]))
    return b"".join(parts)


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise SnapshotError(
                f"truncated snapshot at offset {self.pos}, needed {size} bytes")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out

    def take_vecs(self, count: int):
        size = 12 * count
        if self.pos + size > len(self.data):
            raise SnapshotError(
                f"truncated snapshot at offset {self.pos}, needed {size} bytes")
        flat = np.frombuffer(self.data, dtype=">f4", count=3 * count, offset=self.pos)
        self.pos += size
        return tuple(map(tuple, flat.astype(np.float64).reshape(count, 3)))


def decode_snapshot(data: bytes) -> Snapshot:
    if data[:4] != MAGIC:
        raise SnapshotError(f"bad magic {data[:4]!r}")
    c = _Cursor(data)
    c.pos = 4
    tick, mode, version = c.take(">QBI")

    (agent_count,) = c.take(">B")
    agents = []
    for _ in range(agent_count):
        aid, present = c.take(">BB")
        pos = c.take(">3f")
        quat = c.take(">4f")
        agents.append(SnapshotAgent(aid, bool(present), pos, quat))

    (object_count,) = c.take(">B")
    objects = []
    for _ in range(object_count):
        code, frozen = c.take(">BB")
        kind = OBJECT_NAMES_BY_CODE.get(code)
        if kind is None:
            raise SnapshotError(f"unknown object code {code} at offset {c.pos - 2}")
        if kind == "rope":
            (n,) = c.take(">H")
            objects.append(SnapshotObject(kind, bool(frozen), nodes=c.take_vecs(n)))
        elif kind == "spring":
            end_a = c.take(">3f")
            end_b = c.take(">3f")
            d, h, t, va = c.take(">4f")
            objects.append(SnapshotObject(kind, bool(frozen), end_a=end_a,
                                          end_b=end_b, d=d, h=h, t=t,
                                          visual_amplitude=va))
        else:
            (n,) = c.take(">I")
            objects.append(SnapshotObject(kind, bool(frozen),
                                          particles=c.take_vecs(n)))

    (signal_count,) = c.take(">H")
    signals = {}
    for _ in range(signal_count):
        name_hash, value = c.take(">If")
        name = KNOWN_HASHES.get(name_hash, f"hash:{name_hash:08x}")
        signals[name] = value
    if c.pos != len(data):
        raise SnapshotError(f"trailing bytes after offset {c.pos}")
    return Snapshot(tick=tick, mode=mode, config_version=version,
                    agents=tuple(agents), objects=tuple(objects), signals=signals)


def snapshot_to_json(snap: Snapshot) -> dict:
    """Debug form for --json-snapshots and console development."""
    return {
        "tick": snap.tick,
        "mode": MODE_NAMES_BY_CODE.get(snap.mode, snap.mode),
        "config_version": snap.config_version,
        "agents": [
            {"id": a.agent_id, "present": a.present,
             "position": list(a.position), "orientation": list(a.orientation)}
            for a in snap.agents
        ],
        "objects": [_object_json(o) for o in snap.objects],
        "signals": dict(sorted(snap.signals.items())),
    }


def _object_json(obj: SnapshotObject) -> dict:
    out = {"type": obj.kind, "frozen": obj.frozen}
    if obj.kind == "rope":
        out["nodes"] = [list(n) for n in obj.nodes]
    elif obj.kind == "spring":
        out.update(end_a=list(obj.end_a), end_b=list(obj.end_b), d=obj.d,
                   h=obj.h, t=obj.t, visual_amplitude=obj.visual_amplitude)
    else:
        out["particles"] = [list(p) for p in obj.particles]
    return out
