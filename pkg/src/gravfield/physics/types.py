"""Domain types shared across the physics engine.

Coordinate convention: y is vertical, gravity acts along -y. Lengths
are meters, times seconds. Positions are numpy float64 arrays of shape
(3,); orientations are unit quaternions stored (x, y, z, w).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

DT = 1.0 / 60.0
GRAVITY = 9.81
MAX_AGENTS = 4

# simulation ticks without a datagram before an agent counts as absent (> 1 s)
ABSENT_AFTER_TICKS = 60


class ParamError(ValueError):
    """A parameter update or construction was rejected; state unchanged."""


def vec(x=0.0, y=0.0, z=0.0) -> np.ndarray:
    return np.array([x, y, z], dtype=np.float64)


def quat_identity() -> np.ndarray:
    return np.array([0.0, 0.0, 0.0, 1.0], dtype=np.float64)


@dataclass(frozen=True)
class AgentPose:
    agent_id: int
    position: np.ndarray
    orientation: np.ndarray
    timestamp_us: int = 0

    def validate(self) -> "AgentPose":
        if not 0 <= self.agent_id < MAX_AGENTS:
            raise ParamError(f"agent_id {self.agent_id} outside 0..{MAX_AGENTS - 1}")
        if not np.isfinite(self.position).all() or self.position.shape != (3,):
            raise ParamError("pose position must be a finite Vec3")
        if self.orientation.shape != (4,) or not np.isfinite(self.orientation).all():
            raise ParamError("pose orientation must be a finite quaternion")
        norm = float(np.linalg.norm(self.orientation))
        if abs(norm - 1.0) > 1e-3:
            raise ParamError(f"quaternion norm {norm:.6f} not within 1e-3 of 1")
        return self


def _check_range(name: str, value, lo, hi):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParamError(f"{name} must be numeric, got {type(value).__name__}")
    if not np.isfinite(value):
        raise ParamError(f"{name} must be finite")
    if not lo <= value <= hi:
        raise ParamError(f"{name}={value} outside [{lo}, {hi}]")


@dataclass(frozen=True)
class RopeParams:
    mass_total: float = 1.0
    elasticity: float = 0.5
    natural_length: float = 3.0
    width: float = 0.05       # visual pass-through, no effect on dynamics
    node_count: int = 17

    RANGES = {
        "mass_total": (0.1, 10.0),
        "elasticity": (0.0, 1.0),
        "natural_length": (1.0, 6.0),
        "width": (0.005, 0.5),
        "node_count": (3, 257),
    }

    def validate(self) -> "RopeParams":
        for name, (lo, hi) in self.RANGES.items():
            _check_range(f"rope.{name}", getattr(self, name), lo, hi)
        if int(self.node_count) != self.node_count:
            raise ParamError("rope.node_count must be an integer")
        return self


@dataclass(frozen=True)
class SpringParams:
    stiffness_k: float = 2.0
    rest_length: float = 1.0
    # visual pass-throughs: stored, validated, broadcast, never simulated
    wavelength: float = 1.0
    shake_speed: float = 1.0
    shake_strength: float = 1.0
    wave_width: float = 1.0
    rotation_speed: float = 1.0
    offset: float = 0.0

    RANGES = {
        "stiffness_k": (1e-6, 1000.0),
        "rest_length": (1e-6, 10.0),
        "wavelength": (-1000.0, 1000.0),
        "shake_speed": (-1000.0, 1000.0),
        "shake_strength": (-1000.0, 1000.0),
        "wave_width": (-1000.0, 1000.0),
        "rotation_speed": (-1000.0, 1000.0),
        "offset": (-1000.0, 1000.0),
    }

    def validate(self) -> "SpringParams":
        for name, (lo, hi) in self.RANGES.items():
            _check_range(f"spring.{name}", getattr(self, name), lo, hi)
        return self


@dataclass(frozen=True)
class MagnetParams:
    monopoles: tuple = (1.0, 1.0, 1.0, 1.0)   # per-agent strength o_i
    particle_count: int = 500
    mobility: float = 1.0
    softening_eps: float = 0.1
    respawn_radius: float = 0.15

    MONOPOLE_RANGE = (-3.0, 3.0)
    RANGES = {
        "particle_count": (1, 20000),
        "mobility": (1e-6, 10.0),
        "softening_eps": (1e-3, 1.0),
        "respawn_radius": (0.0, 2.0),
    }

    def validate(self) -> "MagnetParams":
        if len(self.monopoles) != MAX_AGENTS:
            raise ParamError("magnet.monopoles must hold one strength per agent slot")
        lo, hi = self.MONOPOLE_RANGE
        for i, o in enumerate(self.monopoles):
            _check_range(f"magnet.monopoles[{i}]", o, lo, hi)
        for name, (lo, hi) in self.RANGES.items():
            _check_range(f"magnet.{name}", getattr(self, name), lo, hi)
        if int(self.particle_count) != self.particle_count:
            raise ParamError("magnet.particle_count must be an integer")
        return self


@dataclass(frozen=True)
class ArenaBounds:
    min_corner: np.ndarray = field(default_factory=lambda: vec(-4.0, 0.0, -8.0))
    max_corner: np.ndarray = field(default_factory=lambda: vec(4.0, 3.0, 8.0))

    def validate(self) -> "ArenaBounds":
        if not (np.isfinite(self.min_corner).all() and np.isfinite(self.max_corner).all()):
            raise ParamError("arena corners must be finite")
        if not (self.max_corner > self.min_corner).all():
            raise ParamError("arena extents must be positive")
        return self

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask over an (n, 3) array of points."""
        return ((points >= self.min_corner) & (points <= self.max_corner)).all(axis=-1)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.min_corner, self.max_corner, size=(n, 3))


def updated_params(params, name: str, value):
    """Return a copy of a params dataclass with one field changed.

    Rejects unknown fields and out-of-range values without touching the
    input (atomic by construction: dataclasses are frozen).
    """
    if name not in {f.name for f in dataclasses.fields(params)} or name == "monopoles":
        raise ParamError(f"unknown parameter {name!r} for {type(params).__name__}")
    if name in ("node_count", "particle_count"):
        if isinstance(value, bool) or (isinstance(value, float) and int(value) != value):
            raise ParamError(f"{name} must be an integer")
        value = int(value)
    return dataclasses.replace(params, **{name: value}).validate()


# canonical signal names; agent speeds are agent.<i>.speed for i in 0..3
CANONICAL_SIGNALS = frozenset(
    ["rope.v", "rope.a", "spring.d", "spring.h", "spring.t", "magnet.d",
     "audio.env", "group.energy"]
    + [f"agent.{i}.speed" for i in range(MAX_AGENTS)]
)


@dataclass(frozen=True)
class SignalFrame:
    """Named scalar physics signals for one tick.

    frozen lists active objects whose anchor agents were missing this
    tick; their signals are omitted from values.
    """
    values: dict
    frozen: tuple = ()

    def validate(self) -> "SignalFrame":
        for name, value in self.values.items():
            if not np.isfinite(value):
                raise AssertionError(f"non-finite signal {name}={value}")
        return self
