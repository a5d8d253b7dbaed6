"""The tick machine: drain inputs, step the world, emit at half rate.

One Engine instance is owned by exactly one driver (the live asyncio
loop or the deterministic runner). Network receivers only append to
the input queues; every state change happens inside run_tick, which
keeps causality simple: an input queued before tick N's drain is
visible in tick N's state and never earlier.
"""

from __future__ import annotations

import json
import struct
import time
from collections import deque
from dataclasses import dataclass, field

from .. import osc
from ..mapping import apply_control_event, event_to_json
from ..physics.types import DT, ParamError
from ..physics.world import World, mode_code
from .config import EngineConfig, make_rng
from .control import (AudioInput, ControlError, event_error_reply,
                      handle_json_control, handle_osc_control)
from .datagrams import ClientRegistry
from .snapshot import SnapshotObject, encode_snapshot

EMIT_EVERY = 2          # 60 Hz simulation, 30 Hz emission
MAPPING_DT = DT * EMIT_EVERY

REC_POSE = 1
REC_CONTROL = 2
REC_AUDIO = 3


@dataclass
class TickResult:
    tick: int
    frame: object
    osc_out: bytes = b""
    snapshot_bytes: bytes = b""
    replies: list = field(default_factory=list)   # (reply_to, dict) pairs


class Engine:
    def __init__(self, config: EngineConfig, recorder=None):
        self.config = config
        self.world = World(config.world, make_rng(config.seed))
        self.table = config.build_table()
        self.registry = ClientRegistry()
        self.tick = 0
        self.config_version = 0
        self.audio_env = 0.0
        self.recorder = recorder
        self.pose_queue = deque()
        self.input_queue = deque()    # ("osc"|"json"|"event", payload, reply_to)
        self.control_applied = 0
        self.control_errors = 0
        self.tick_durations = deque(maxlen=1200)

    # ------------------------------------------------------------ inputs

    def feed_pose(self, data: bytes):
        self.pose_queue.append(bytes(data))

    def feed_control(self, source: str, payload, reply_to=None):
        self.input_queue.append((source, payload, reply_to))

    # ------------------------------------------------------------- drain

    def _drain_poses(self, tick: int):
        while self.pose_queue:
            data = self.pose_queue.popleft()
            accepted = self.registry.ingest_bytes(data, tick)
            if accepted is not None and self.recorder is not None:
                self.recorder.append(tick, REC_POSE, data)

    def _events_from(self, source: str, payload):
        if source == "event":
            return [payload]
        if source == "json":
            return [handle_json_control(payload)]
        packet = osc.decode_packet(payload)
        return [handle_osc_control(m) for m in osc.iter_messages(packet)]

    def _drain_inputs(self, tick: int):
        replies = []
        while self.input_queue:
            source, payload, reply_to = self.input_queue.popleft()
            try:
                events = self._events_from(source, payload)
            except (osc.OscDecodeError, ControlError, ValueError) as exc:
                self.control_errors += 1
                if reply_to is not None:
                    replies.append((reply_to, event_error_reply(exc)))
                continue
            for event in events:
                try:
                    self._apply_event(event, tick)
                except (ParamError, ValueError) as exc:
                    self.control_errors += 1
                    if reply_to is not None:
                        replies.append((reply_to, event_error_reply(exc)))
        return replies

    def _apply_event(self, event, tick: int):
        if isinstance(event, AudioInput):
            value = float(event.value)
            if not 0.0 <= value <= 1.0:
                raise ParamError(f"audio env {value} outside [0, 1]")
            # hold the f32 the wire and the log carry, not the f64 input,
            # so a replayed session sees bit-identical state
            packed = struct.pack(">f", value)
            self.audio_env = struct.unpack(">f", packed)[0]
            if self.recorder is not None:
                self.recorder.append(tick, REC_AUDIO, packed)
            return
        new_config = apply_control_event(self.world.config, self.table, event)
        self.world.set_config(new_config)
        self.config_version += 1
        self.control_applied += 1
        if self.recorder is not None:
            payload = json.dumps(event_to_json(event), sort_keys=True).encode()
            self.recorder.append(tick, REC_CONTROL, payload)

    # -------------------------------------------------------------- tick

    def run_tick(self) -> TickResult:
        started = time.perf_counter()
        tick = self.tick + 1
        self._drain_poses(tick)
        replies = self._drain_inputs(tick)

        self.world.audio_env = self.audio_env
        present = self.registry.present(tick)
        frame = self.world.step(present, DT)
        self.tick = tick

        result = TickResult(tick=tick, frame=frame, replies=replies)
        if tick % EMIT_EVERY == 0:
            outputs = self.table.eval_mappings(frame, MAPPING_DT)
            if outputs:
                bundle = osc.OscBundle(osc.IMMEDIATELY, tuple(
                    osc.OscMessage(addr, (float(value),)) for addr, value in outputs))
                result.osc_out = osc.encode_bundle(bundle)
            result.snapshot_bytes = self.build_snapshot(present, frame)
        self.tick_durations.append(time.perf_counter() - started)
        return result

    # ---------------------------------------------------------- snapshot

    def build_snapshot(self, present, frame) -> bytes:
        agents = []
        for aid in sorted(self.registry.slots):
            pose = self.registry.slots[aid].pose
            agents.append((aid, aid in present, tuple(pose.position),
                           tuple(pose.orientation)))
        cfg = self.world.config
        frozen = set(frame.frozen)
        objects = []
        if "rope" in cfg.active and self.world.rope_state is not None:
            objects.append(SnapshotObject(
                "rope", frozen="rope" in frozen,
                nodes=self.world.rope_state.nodes))
        if "spring" in cfg.active and self.world.spring_state is not None:
            a, b = cfg.spring_anchors
            state = self.world.spring_state
            end_a = tuple(present[a].position) if a in present else (0.0, 0.0, 0.0)
            end_b = tuple(present[b].position) if b in present else (0.0, 0.0, 0.0)
            objects.append(SnapshotObject(
                "spring", frozen="spring" in frozen,
                end_a=end_a, end_b=end_b, d=state.d, h=state.h, t=state.t,
                visual_amplitude=state.visual_amplitude))
        if "magnetic" in cfg.active and self.world.magnet_state is not None:
            objects.append(SnapshotObject(
                "magnetic", frozen=False,
                particles=self.world.magnet_state.particles))
        return encode_snapshot(self.tick, mode_code(cfg.active),
                               self.config_version, agents, objects,
                               dict(frame.values))
