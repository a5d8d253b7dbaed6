"""Translate inbound control payloads into validated events.

Two transports feed the same queue: OSC 1.0 on the control port
(TouchOSC-style surfaces) and JSON text frames from console stream
sessions. The audio envelope travels these channels too but is an
input signal, not configuration, so it gets its own event type.

OSC address scheme:
  /gravfield/mode                     i  1 rope, 2 spring, 3 magnetic
  /gravfield/rope/mass                f  -> rope.mass_total
  /gravfield/rope/width               f
  /gravfield/rope/elasticity          f
  /gravfield/spring/wavelength        f     (also: shake_speed,
      shake_strength, wave_width, rotation_speed, offset,
      stiffness -> stiffness_k, rest_length)
  /gravfield/magnet/<agent>/strength  f  -> SetMonopole
  /gravfield/audio/env                f  0..1 ambient loudness feed
  /gravfield/mapping/set              s  MappingSpec as JSON
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..mapping import (MappingError, MappingSpec, RemoveMapping, SetMapping,
                       SetMonopole, SetParam, SwitchMode)
from ..osc import OscMessage
from ..physics.types import ParamError

MODE_BY_CODE = {1: "rope", 2: "spring", 3: "magnetic"}

_ROPE_ADDR = {"mass": "mass_total", "width": "width", "elasticity": "elasticity"}
_SPRING_ADDR = {"wavelength": "wavelength", "shake_speed": "shake_speed",
                "shake_strength": "shake_strength", "wave_width": "wave_width",
                "rotation_speed": "rotation_speed", "offset": "offset",
                "stiffness": "stiffness_k", "rest_length": "rest_length"}


@dataclass(frozen=True)
class AudioInput:
    """External ambient-loudness sample, 0..1. Not a config change."""
    value: float


class ControlError(ValueError):
    def __init__(self, reason: str, detail: str):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason
        self.detail = detail

    def reply(self) -> dict:
        return {"error": {"reason": self.reason, "detail": self.detail}}


def _one_arg(msg: OscMessage, kind):
    if len(msg.args) != 1:
        raise ControlError("arity", f"{msg.address} expects 1 argument, got {len(msg.args)}")
    arg = msg.args[0]
    if kind is float and isinstance(arg, int) and not isinstance(arg, bool):
        arg = float(arg)
    if not isinstance(arg, kind) or isinstance(arg, bool):
        raise ControlError("type", f"{msg.address} expects {kind.__name__}, "
                                   f"got {type(arg).__name__}")
    return arg


def handle_osc_control(msg: OscMessage):
    """OSC control message -> ControlEvent or AudioInput."""
    parts = msg.address.strip("/").split("/")
    if len(parts) < 2 or parts[0] != "gravfield":
        raise ControlError("address", f"unknown address {msg.address}")

    if parts[1] == "mode" and len(parts) == 2:
        code = _one_arg(msg, int)
        if code not in MODE_BY_CODE:
            raise ControlError("range", f"mode code {code} outside 1..3")
        return SwitchMode(MODE_BY_CODE[code])

    if parts[1] == "rope" and len(parts) == 3 and parts[2] in _ROPE_ADDR:
        return SetParam("rope", _ROPE_ADDR[parts[2]], _one_arg(msg, float))

    if parts[1] == "spring" and len(parts) == 3 and parts[2] in _SPRING_ADDR:
        return SetParam("spring", _SPRING_ADDR[parts[2]], _one_arg(msg, float))

    if parts[1] == "magnet" and len(parts) == 4 and parts[3] == "strength":
        try:
            agent_id = int(parts[2])
        except ValueError:
            raise ControlError("address", f"bad agent id {parts[2]!r}") from None
        return SetMonopole(agent_id, _one_arg(msg, float))

    if parts[1] == "audio" and len(parts) == 3 and parts[2] == "env":
        value = _one_arg(msg, float)
        if not 0.0 <= value <= 1.0:
            raise ControlError("range", f"audio env {value} outside [0, 1]")
        return AudioInput(value)

    if parts[1] == "mapping" and len(parts) == 3 and parts[2] == "set":
        raw = _one_arg(msg, str)
        try:
            spec = MappingSpec.from_json(json.loads(raw))
        except (json.JSONDecodeError, MappingError) as exc:
            raise ControlError("mapping", str(exc)) from None
        return SetMapping(spec)

    raise ControlError("address", f"unknown address {msg.address}")


def handle_json_control(text: str):
    """Console JSON frame -> ControlEvent or AudioInput."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ControlError("json", f"unparseable frame: {exc}") from None
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ControlError("json", "frame must be an object with one command key")
    key, body = next(iter(obj.items()))

    try:
        if key == "set_param":
            return SetParam(str(body["object"]), str(body["param"]), body["value"])
        if key == "switch_mode":
            return SwitchMode(str(body))
        if key == "set_monopole":
            return SetMonopole(body["agent"], body["value"])
        if key == "set_mapping":
            try:
                return SetMapping(MappingSpec.from_json(body))
            except MappingError as exc:
                raise ControlError("mapping", str(exc)) from None
        if key == "remove_mapping":
            return RemoveMapping(str(body["mapping_id"]))
        if key == "audio_env":
            value = float(body)
            if not 0.0 <= value <= 1.0:
                raise ControlError("range", f"audio env {value} outside [0, 1]")
            return AudioInput(value)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ControlError):
            raise
        raise ControlError("json", f"malformed {key} frame: {exc}") from None
    raise ControlError("json", f"unknown command {key!r}")


def event_error_reply(exc) -> dict:
    if isinstance(exc, ControlError):
        return exc.reply()
    if isinstance(exc, (ParamError, MappingError)):
        return {"error": {"reason": "rejected", "detail": str(exc)}}
    return {"error": {"reason": "internal", "detail": str(exc)}}
