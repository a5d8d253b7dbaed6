"""Declarative signal-to-OSC mapping and live control events.

A MappingTable turns each tick's SignalFrame into (address, value)
pairs through per-mapping transfer chains. Tables and world config are
reconfigured through validated ControlEvents; application is atomic,
so a rejected event leaves no partial state behind.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

from .physics.types import (CANONICAL_SIGNALS, MAX_AGENTS, ParamError,
                            updated_params)
from .physics.world import WorldConfig

SCHEMA_VERSION = 1


class MappingError(ValueError):
    """Invalid transfer stage, spec, or table operation."""


# ------------------------------------------------------ transfer stages

@dataclass(frozen=True)
class Linear:
    a: float
    b: float


@dataclass(frozen=True)
class Clamp:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi >= self.lo:
            raise MappingError(f"clamp hi {self.hi} < lo {self.lo}")


@dataclass(frozen=True)
class RangeMap:
    in_lo: float
    in_hi: float
    out_lo: float
    out_hi: float
    gamma: float = 1.0

    def __post_init__(self):
        if self.in_hi == self.in_lo:
            raise MappingError("rangemap input span is empty")
        if not self.gamma > 0:
            raise MappingError(f"rangemap gamma {self.gamma} must be > 0")


@dataclass(frozen=True)
class Ema:
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise MappingError(f"ema tau {self.tau} must be > 0")


@dataclass(frozen=True)
class Invert:
    pass


STAGE_KINDS = {"linear": Linear, "clamp": Clamp, "rangemap": RangeMap,
               "ema": Ema, "invert": Invert}


def stage_to_json(stage) -> dict:
    kind = next(k for k, cls in STAGE_KINDS.items() if isinstance(stage, cls))
    return {"kind": kind, **dataclasses.asdict(stage)}


def stage_from_json(obj: dict):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MappingError(f"stage must be an object with a kind, got {obj!r}")
    kind = obj["kind"]
    if kind not in STAGE_KINDS:
        raise MappingError(f"unknown stage kind {kind!r}")
    kwargs = {k: v for k, v in obj.items() if k != "kind"}
    try:
        return STAGE_KINDS[kind](**kwargs)
    except TypeError as exc:
        raise MappingError(f"bad fields for stage {kind!r}: {exc}") from None


def _apply_stage(stage, x: float, dt: float, ema_state: float):
    """Returns (y, new_ema_state or None)."""
    if isinstance(stage, Linear):
        return stage.a * x + stage.b, None
    if isinstance(stage, Clamp):
        return min(max(x, stage.lo), stage.hi), None
    if isinstance(stage, RangeMap):
        u = (x - stage.in_lo) / (stage.in_hi - stage.in_lo)
        u = min(max(u, 0.0), 1.0)
        return stage.out_lo + (stage.out_hi - stage.out_lo) * u**stage.gamma, None
    if isinstance(stage, Ema):
        y = ema_state + (x - ema_state) * (1.0 - math.exp(-dt / stage.tau))
        return y, y
    if isinstance(stage, Invert):
        return -x, None
    raise MappingError(f"unknown stage {stage!r}")


def eval_transfer(chain, x: float, dt: float, ema_states=None):
    """Apply a chain to one sample. ema_states lists one float per Ema
    stage, in chain order (missing entries start at 0); returns
    (y, updated_states). Non-finite intermediates raise MappingError.
    """
    states = list(ema_states or [])
    ema_index = 0
    y = x
    for stage in chain:
        state = 0.0
        if isinstance(stage, Ema):
            while len(states) <= ema_index:
                states.append(0.0)
            state = states[ema_index]
        y, new_state = _apply_stage(stage, y, dt, state)
        if isinstance(stage, Ema):
            states[ema_index] = new_state
            ema_index += 1
        if not math.isfinite(y):
            raise MappingError(f"non-finite value after stage {stage!r}")
    return y, states


# -------------------------------------------------------- mapping table

def _valid_signal(name) -> bool:
    return isinstance(name, str) and name in CANONICAL_SIGNALS


def _valid_address(addr) -> bool:
    if not isinstance(addr, str) or not addr.startswith("/"):
        return False
    return all(0x21 <= ord(c) <= 0x7E and c != "#" for c in addr[1:])


@dataclass(frozen=True)
class MappingSpec:
    mapping_id: str
    source: str
    chain: tuple
    target_address: str
    target_type: str = "float32"

    def validate(self) -> "MappingSpec":
        if not self.mapping_id or not isinstance(self.mapping_id, str):
            raise MappingError("mapping_id must be a non-empty string")
        if not _valid_signal(self.source):
            raise MappingError(f"source {self.source!r} is not a canonical signal")
        if not _valid_address(self.target_address):
            raise MappingError(f"bad OSC target address {self.target_address!r}")
        if self.target_type != "float32":
            raise MappingError(f"unsupported target_type {self.target_type!r}")
        return self

    def to_json(self) -> dict:
        return {"mapping_id": self.mapping_id, "source": self.source,
                "chain": [stage_to_json(s) for s in self.chain],
                "target_address": self.target_address,
                "target_type": self.target_type}

    @classmethod
    def from_json(cls, obj: dict) -> "MappingSpec":
        if not isinstance(obj, dict):
            raise MappingError("mapping spec must be an object")
        try:
            chain = tuple(stage_from_json(s) for s in obj.get("chain", []))
            spec = cls(mapping_id=obj["mapping_id"], source=obj["source"],
                       chain=chain, target_address=obj["target_address"],
                       target_type=obj.get("target_type", "float32"))
        except KeyError as exc:
            raise MappingError(f"mapping spec missing field {exc}") from None
        return spec.validate()


class MappingTable:
    """Ordered mappings plus their per-mapping EMA smoothing state."""

    def __init__(self, specs=()):
        self.specs = []
        self.ema_states = {}
        self.suppressed = 0
        for spec in specs:
            self.set_mapping(spec)

    def set_mapping(self, spec: MappingSpec):
        """Insert or replace by mapping_id; replacing resets its EMA state."""
        spec.validate()
        for i, existing in enumerate(self.specs):
            if existing.mapping_id == spec.mapping_id:
                self.specs[i] = spec
                break
        else:
            self.specs.append(spec)
        self.ema_states[spec.mapping_id] = []

    def remove_mapping(self, mapping_id: str):
        for i, existing in enumerate(self.specs):
            if existing.mapping_id == mapping_id:
                del self.specs[i]
                self.ema_states.pop(mapping_id, None)
                return
        raise MappingError(f"unknown mapping_id {mapping_id!r}")

    def eval_mappings(self, frame, dt: float):
        """One (address, value) per mapping whose source is present,
        in table order. Mappings that hit a non-finite intermediate are
        suppressed for the tick and counted.
        """
        out = []
        for spec in self.specs:
            if spec.source not in frame.values:
                continue
            try:
                y, states = eval_transfer(spec.chain, frame.values[spec.source],
                                          dt, self.ema_states.get(spec.mapping_id))
            except MappingError:
                self.suppressed += 1
                continue
            self.ema_states[spec.mapping_id] = states
            out.append((spec.target_address, y))
        return out

    def to_json(self) -> dict:
        return {"schema": SCHEMA_VERSION,
                "mappings": [s.to_json() for s in self.specs]}

    @classmethod
    def from_json(cls, obj: dict) -> "MappingTable":
        if not isinstance(obj, dict) or obj.get("schema") != SCHEMA_VERSION:
            raise MappingError("mapping config must declare schema 1")
        return cls(MappingSpec.from_json(m) for m in obj.get("mappings", []))


def default_mapping_table() -> MappingTable:
    """Shipped defaults. Output ranges are placeholder synth values;
    directionality is the contract: faster swing raises amp, higher
    spring anchor raises cutoff, closer agents raise glitch.
    """
    return MappingTable([
        MappingSpec("rope.amp", "rope.v", (RangeMap(0.0, 3.0, 0.0, 1.0),),
                    "/synth/amp"),
        MappingSpec("rope.pitch", "rope.a", (RangeMap(0.0, 10.0, 100.0, 1000.0),),
                    "/synth/pitch"),
        MappingSpec("spring.pitch", "spring.d", (RangeMap(0.0, 5.0, 100.0, 1000.0),),
                    "/synth/pitch"),
        MappingSpec("spring.cutoff", "spring.h", (RangeMap(-2.0, 2.0, 200.0, 8000.0),),
                    "/synth/cutoff"),
        MappingSpec("magnet.glitch", "magnet.d", (RangeMap(0.0, 20.0, 1.0, 0.0),),
                    "/synth/glitch"),
    ])


# -------------------------------------------------------- control plane

@dataclass(frozen=True)
class SetParam:
    object: str
    param: str
    value: float


@dataclass(frozen=True)
class SwitchMode:
    mode: str  # rope | spring | magnetic | none


@dataclass(frozen=True)
class SetMapping:
    spec: MappingSpec


@dataclass(frozen=True)
class RemoveMapping:
    mapping_id: str


@dataclass(frozen=True)
class SetMonopole:
    agent_id: int
    value: float


MODES = ("none", "rope", "spring", "magnetic")


def apply_control_event(config: WorldConfig, table: MappingTable, event):
    """Apply one event; returns the updated WorldConfig.

    Raises ParamError or MappingError on rejection, in which case both
    config and table are untouched (validation happens before any
    mutation; WorldConfig is immutable).
    """
    if isinstance(event, SetParam):
        if event.object == "rope":
            return dataclasses.replace(
                config, rope=updated_params(config.rope, event.param, event.value))
        if event.object == "spring":
            return dataclasses.replace(
                config, spring=updated_params(config.spring, event.param, event.value))
        if event.object in ("magnet", "magnetic"):
            return dataclasses.replace(
                config, magnet=updated_params(config.magnet, event.param, event.value))
        raise ParamError(f"unknown object {event.object!r}")

    if isinstance(event, SwitchMode):
        if event.mode not in MODES:
            raise ParamError(f"unknown mode {event.mode!r}")
        active = frozenset() if event.mode == "none" else frozenset([event.mode])
        return dataclasses.replace(config, active=active)

    if isinstance(event, SetMonopole):
        if not (isinstance(event.agent_id, int) and 0 <= event.agent_id < MAX_AGENTS):
            raise ParamError(f"monopole agent_id {event.agent_id!r} outside 0..3")
        lo, hi = config.magnet.MONOPOLE_RANGE
        value = event.value
        if not isinstance(value, (int, float)) or isinstance(value, bool) \
                or not math.isfinite(value) or not lo <= value <= hi:
            raise ParamError(f"monopole strength {value!r} outside [{lo}, {hi}]")
        monopoles = list(config.magnet.monopoles)
        monopoles[event.agent_id] = float(value)
        return dataclasses.replace(
            config, magnet=dataclasses.replace(config.magnet, monopoles=tuple(monopoles)))

    if isinstance(event, SetMapping):
        event.spec.validate()  # reject before mutating the table
        table.set_mapping(event.spec)
        return config

    if isinstance(event, RemoveMapping):
        table.remove_mapping(event.mapping_id)
        return config

    raise ParamError(f"unknown control event {event!r}")


def event_to_json(event) -> dict:
    if isinstance(event, SetParam):
        return {"set_param": {"object": event.object, "param": event.param,
                              "value": event.value}}
    if isinstance(event, SwitchMode):
        return {"switch_mode": event.mode}
    if isinstance(event, SetMonopole):
        return {"set_monopole": {"agent": event.agent_id, "value": event.value}}
    if isinstance(event, SetMapping):
        return {"set_mapping": event.spec.to_json()}
    if isinstance(event, RemoveMapping):
        return {"remove_mapping": {"mapping_id": event.mapping_id}}
    raise ParamError(f"unknown control event {event!r}")


def load_mapping_file(path) -> MappingTable:
    with open(path) as fh:
        return MappingTable.from_json(json.load(fh))
