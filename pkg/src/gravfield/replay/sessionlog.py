"""GFL1 session logs: every input the engine accepted, tick-stamped.

Layout (big-endian):
  "GFL1" | version u16 | seed u64 | config_len u32 | config JSON bytes
  records: tick u64 | kind u8 (1 pose, 2 control, 3 audio) | len u32 |
           payload bytes
Pose payloads are the raw 48-byte datagrams; control payloads are
canonical event JSON; audio payloads are one f32. Replaying the log
feeds each record at its tick, which reproduces the run exactly.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

MAGIC = b"GFL1"
VERSION = 1
_HEAD = struct.Struct(">4sHQI")
_REC = struct.Struct(">QBI")

KIND_POSE = 1
KIND_CONTROL = 2
KIND_AUDIO = 3
KINDS = (KIND_POSE, KIND_CONTROL, KIND_AUDIO)


class LogCorruptionError(ValueError):
    def __init__(self, offset: int, reason: str):
        super().__init__(f"byte offset {offset}: {reason}")
        self.offset = offset
        self.reason = reason


class SessionLogWriter:
    def __init__(self, path, seed: int, config_json: dict):
        self.path = Path(path)
        payload = json.dumps(config_json, sort_keys=True).encode()
        self._fh = open(self.path, "wb")
        self._fh.write(_HEAD.pack(MAGIC, VERSION, seed, len(payload)))
        self._fh.write(payload)
        self.records = 0
        self.failed = False

    def append(self, tick: int, kind: int, payload: bytes):
        if self.failed:
            return
        try:
            self._fh.write(_REC.pack(tick, kind, len(payload)))
            self._fh.write(payload)
            self.records += 1
        except (OSError, ValueError):
            # recording must never take the live session down with it;
            # ValueError covers writes after the handle already died
            self.failed = True
            try:
                self._fh.close()
            except OSError:
                pass

    def close(self):
        if not self.failed:
            self._fh.flush()
            self._fh.close()


def read_session_log(path):
    """Returns (header dict, list of (tick, kind, payload)).

    header carries seed, version, and the engine config JSON.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEAD.size:
        raise LogCorruptionError(len(data), "file shorter than header")
    magic, version, seed, config_len = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise LogCorruptionError(0, f"bad magic {magic!r}")
    if version != VERSION:
        raise LogCorruptionError(4, f"unsupported log version {version}")
    pos = _HEAD.size
    if pos + config_len > len(data):
        raise LogCorruptionError(pos, "config JSON truncated")
    try:
        config = json.loads(data[pos:pos + config_len])
    except json.JSONDecodeError as exc:
        raise LogCorruptionError(pos, f"config JSON unparseable: {exc}") from None
    pos += config_len

    records = []
    prev_tick = 0
    while pos < len(data):
        if pos + _REC.size > len(data):
            raise LogCorruptionError(pos, "record header truncated")
        tick, kind, length = _REC.unpack_from(data, pos)
        if kind not in KINDS:
            raise LogCorruptionError(pos + 8, f"unknown record kind {kind}")
        if tick < prev_tick:
            raise LogCorruptionError(pos, f"tick {tick} decreases from {prev_tick}")
        body = pos + _REC.size
        if body + length > len(data):
            raise LogCorruptionError(body, "record payload truncated")
        records.append((tick, kind, data[body:body + length]))
        prev_tick = tick
        pos = body + length
    header = {"version": version, "seed": seed, "config": config}
    return header, records
