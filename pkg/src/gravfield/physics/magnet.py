"""Monopole field and tracer particle advection.

Each agent sources an inverse-square radial field scaled by a signed
monopole strength; particles ride the superposed field. All randomness
(initial seeding, respawns) flows through the caller's PRNG so runs
are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .types import DT, ArenaBounds, MagnetParams

SPEED_CLAMP = 3.0  # m/s


@dataclass(frozen=True)
class MagneticState:
    particles: np.ndarray  # (particle_count, 3)
    d_sum: float           # sum of unordered pairwise agent distances, m


def field_at(point: np.ndarray, sources, softening_eps: float) -> np.ndarray:
    """B(p) = sum_i o_i * (p - x_i) / max(|p - x_i|, eps)^3.

    sources is a sequence of (position, strength) pairs.
    """
    total = np.zeros(3)
    for pos, strength in sources:
        rel = point - pos
        dist = max(float(np.linalg.norm(rel)), softening_eps)
        total += strength * rel / dist**3
    return total


def _field_at_many(points: np.ndarray, sources, softening_eps: float) -> np.ndarray:
    total = np.zeros_like(points)
    for pos, strength in sources:
        rel = points - pos
        dist = np.linalg.norm(rel, axis=1)
        np.maximum(dist, softening_eps, out=dist)
        total += strength * rel / (dist**3)[:, None]
    return total


def init_magnetic(params: MagnetParams, arena: ArenaBounds,
                  rng: np.random.Generator) -> MagneticState:
    return MagneticState(particles=arena.sample(rng, params.particle_count), d_sum=0.0)


def step_magnetic(state: MagneticState, params: MagnetParams, poses: dict,
                  dt: float, rng: np.random.Generator,
                  arena: ArenaBounds) -> MagneticState:
    """Advect particles and respawn strays; recompute d_sum.

    poses maps agent_id -> AgentPose for the agents present this tick.
    Particles leaving the arena, or entering the capture radius of an
    attracting (negative) monopole, respawn uniformly in bounds so the
    tracer density stays steady.
    """
    ids = sorted(poses)
    sources = [(poses[i].position, params.monopoles[i]) for i in ids]

    particles = state.particles
    if sources:
        vel = params.mobility * _field_at_many(particles, sources, params.softening_eps)
        speed = np.linalg.norm(vel, axis=1)
        over = speed > SPEED_CLAMP
        if over.any():
            vel[over] *= (SPEED_CLAMP / speed[over])[:, None]
        particles = particles + vel * dt

        dead = ~arena.contains(particles)
        for pos, strength in sources:
            if strength < 0.0:
                near = np.linalg.norm(particles - pos, axis=1) < params.respawn_radius
                dead |= near
        count = int(dead.sum())
        if count:
            particles[dead] = arena.sample(rng, count)

    d_sum = 0.0
    for i, j in combinations(ids, 2):
        d_sum += float(np.linalg.norm(poses[i].position - poses[j].position))
    return MagneticState(particles=particles, d_sum=d_sum)
