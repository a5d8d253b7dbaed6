"""Canonical 64-bit state hash with quantized floats.

Floats are quantized to 1e-5 before hashing so benign FP noise across
builds does not flip the digest, while any real divergence does. A
bitwise mode skips quantization for same-binary CI comparisons. The
PRNG state is part of the hash: two worlds that would diverge on their
next respawn draw must not collide.
"""

from __future__ import annotations

import hashlib
import json
import struct

import numpy as np

QUANTUM = 1e-5


class _Sink:
    def __init__(self, bitwise: bool):
        self.h = hashlib.blake2b(digest_size=8)
        self.bitwise = bitwise

    def tag(self, label: str):
        self.h.update(label.encode())

    def ints(self, *values):
        for v in values:
            self.h.update(struct.pack(">q", int(v)))

    def floats(self, array):
        arr = np.asarray(array, dtype=np.float64).ravel()
        if self.bitwise:
            self.h.update(arr.astype(">f8").tobytes())
        else:
            q = np.rint(arr / QUANTUM).astype(np.int64)  # int64 has no -0
            self.h.update(q.astype(">i8").tobytes())

    def text(self, s: str):
        raw = s.encode()
        self.ints(len(raw))
        self.h.update(raw)


def state_hash(engine, bitwise: bool = False) -> str:
    """Hex digest over everything that shapes future evolution."""
    s = _Sink(bitwise)
    s.tag("gfstate")
    s.ints(engine.tick, engine.config_version, engine.control_applied)
    s.floats([engine.audio_env])

    world = engine.world
    cfg = world.config
    s.tag("config")
    s.text(json.dumps(_config_json(cfg), sort_keys=True))

    s.tag("registry")
    for aid in sorted(engine.registry.slots):
        slot = engine.registry.slots[aid]
        s.ints(aid, slot.seq, slot.last_heard_tick)
        s.floats(slot.pose.position)
        s.floats(slot.pose.orientation)

    s.tag("speedstate")
    for aid in sorted(world.prev_positions):
        s.ints(aid)
        s.floats(world.prev_positions[aid])

    s.tag("rope")
    if world.rope_state is not None:
        s.floats(world.rope_state.nodes)
        s.floats(world.rope_state.prev_nodes)
        s.floats(world.rope_mid_velocity)

    s.tag("spring")
    if world.spring_state is not None:
        st = world.spring_state
        s.floats([st.d, st.h, st.t, st.visual_amplitude])

    s.tag("magnet")
    if world.magnet_state is not None:
        s.floats(world.magnet_state.particles)
        s.floats([world.magnet_state.d_sum])

    s.tag("mappings")
    s.text(json.dumps(engine.table.to_json(), sort_keys=True))
    for mapping_id in sorted(engine.table.ema_states):
        s.text(mapping_id)
        s.floats(engine.table.ema_states[mapping_id])

    s.tag("rng")
    rng_state = world.rng.bit_generator.state["state"]
    s.h.update(str((rng_state["state"], rng_state["inc"])).encode())

    return s.h.hexdigest()


def _config_json(cfg) -> dict:
    from ..server.config import world_config_to_json
    return world_config_to_json(cfg)
