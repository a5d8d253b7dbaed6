"""Deterministic drivers: simulate a scenario, replay a session log.

Both paths run the same Engine in a tight loop. Simulation routes
scripted poses through real GFP1 datagram bytes and scripted events
through canonical JSON, so a recorded log replays to bit-identical
state: the engine never sees anything the log cannot reproduce.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

from ..server.config import ConfigError, EngineConfig
from ..server.datagrams import encode_pose_datagram
from ..server.engine import Engine, REC_AUDIO, REC_CONTROL, REC_POSE
from .scenario import Scenario, tick_for_time
from .sessionlog import (KIND_AUDIO, KIND_CONTROL, KIND_POSE,
                         LogCorruptionError, SessionLogWriter, read_session_log)
from .statehash import state_hash
from .trajectory import trajectory_pose

TICK_RATE = 60
DT = 1.0 / TICK_RATE

TRACE_COLUMNS = (
    ["tick", "audio.env", "group.energy"]
    + [f"agent.{i}.speed" for i in range(4)]
    + ["rope.v", "rope.a", "spring.d", "spring.h", "spring.t", "magnet.d",
       "frozen"]
)


class TraceWriter:
    """Fixed-column CSV rows; repr floats so traces are byte-stable."""

    def __init__(self, path):
        self._fh = open(path, "w", newline="")
        self._w = csv.writer(self._fh, lineterminator="\n")
        self._w.writerow(TRACE_COLUMNS)

    def row(self, tick: int, frame):
        values = frame.values
        out = [str(tick)]
        for name in TRACE_COLUMNS[1:-1]:
            out.append(repr(values[name]) if name in values else "")
        out.append("+".join(frame.frozen))
        self._w.writerow(out)

    def close(self):
        self._fh.close()


@dataclass
class RunResult:
    final_hash: str
    ticks: int
    engine: Engine


def simulate(scenario: Scenario, record_path=None, trace_path=None,
             ticks_override=None) -> RunResult:
    """Run a scenario from scratch, optionally recording and tracing."""
    total_ticks = int(ticks_override) if ticks_override else scenario.ticks
    config_json = dict(scenario.engine.to_json(), ticks=total_ticks)
    recorder = None
    if record_path:
        recorder = SessionLogWriter(record_path, scenario.engine.seed, config_json)
    engine = Engine(scenario.engine, recorder=recorder)
    trace = TraceWriter(trace_path) if trace_path else None

    script = [(tick_for_time(t), ev) for t, ev in scenario.script]
    audio_script = [(tick_for_time(t), v) for t, v in scenario.audio_script]
    script_i = audio_i = 0

    try:
        for tick in range(1, total_ticks + 1):
            t = (tick - 1) * DT
            for agent_id, spec in scenario.agents:
                pose = trajectory_pose(spec, t, agent_id)
                if pose is None:
                    continue
                engine.feed_pose(encode_pose_datagram(
                    agent_id, tick, pose.timestamp_us, pose.position,
                    pose.orientation))
            while script_i < len(script) and script[script_i][0] <= tick:
                engine.feed_control("event", script[script_i][1])
                script_i += 1
            while audio_i < len(audio_script) and audio_script[audio_i][0] <= tick:
                from ..server.control import AudioInput
                engine.feed_control("event", AudioInput(audio_script[audio_i][1]))
                audio_i += 1
            result = engine.run_tick()
            if trace:
                trace.row(result.tick, result.frame)
    finally:
        if trace:
            trace.close()
        if recorder:
            recorder.close()
    return RunResult(final_hash=state_hash(engine), ticks=total_ticks, engine=engine)


def replay(log_path, trace_path=None, ticks_override=None) -> RunResult:
    """Re-run a session from its input log; no network, no wall clock.

    Duration comes from the log header's "ticks" when present, else the
    last record's tick; ticks_override trumps both.
    """
    header, records = read_session_log(log_path)
    config = header["config"]
    try:
        engine_config = EngineConfig.from_json(config)
    except ConfigError as exc:
        raise LogCorruptionError(0, f"log config invalid: {exc}") from None
    total_ticks = int(ticks_override or config.get("ticks", 0))
    if total_ticks <= 0:
        total_ticks = records[-1][0] if records else 0

    engine = Engine(engine_config)
    trace = TraceWriter(trace_path) if trace_path else None
    rec_i = 0
    try:
        for tick in range(1, total_ticks + 1):
            while rec_i < len(records) and records[rec_i][0] <= tick:
                _, kind, payload = records[rec_i]
                if kind == KIND_POSE:
                    engine.feed_pose(payload)
                elif kind == KIND_CONTROL:
                    engine.feed_control("json", payload.decode())
                elif kind == KIND_AUDIO:
                    from ..server.control import AudioInput
                    (value,) = struct.unpack(">f", payload)
                    engine.feed_control("event", AudioInput(value))
                rec_i += 1
            result = engine.run_tick()
            if trace:
                trace.row(result.tick, result.frame)
    finally:
        if trace:
            trace.close()
    return RunResult(final_hash=state_hash(engine), ticks=total_ticks, engine=engine)


assert (REC_POSE, REC_CONTROL, REC_AUDIO) == (KIND_POSE, KIND_CONTROL, KIND_AUDIO)
