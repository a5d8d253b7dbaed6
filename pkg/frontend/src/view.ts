/**
 * Spectator-side state: top-down scene projection and signal meters.
 *
 * renderTopdown is a pure function from one immutable snapshot to a
 * draw list; the canvas code consumes it without touching network
 * state. LiveView owns the latest snapshot, a 30 s ring buffer per
 * signal for the meters, and the decode-error badge counter.
 */

import {
  decodeSnapshot,
  SnapshotDecodeError,
  type Snapshot,
  type Vec3,
} from "./protocol.js";

export type Point2 = [number, number];

export interface SceneAgent {
  id: number;
  label: string;
  present: boolean;
  at: Point2;
}

export interface SceneSpring {
  a: Point2;
  b: Point2;
  d: number;
  h: number;
  t: number;
}

export interface TopdownScene {
  agents: SceneAgent[];
  rope: Point2[] | null;
  spring: SceneSpring | null;
  particles: Point2[];
}

// Ground-plane projection: world x -> scene x, world z -> scene y,
// height (world y) dropped.
function ground(p: Vec3): Point2 {
  return [p[0], p[2]];
}

export function renderTopdown(snap: Snapshot): TopdownScene {
  const scene: TopdownScene = { agents: [], rope: null, spring: null, particles: [] };
  for (const agent of snap.agents) {
    scene.agents.push({
      id: agent.id,
      label: `A${agent.id}`,
      present: agent.present,
      at: ground(agent.position),
    });
  }
  for (const obj of snap.objects) {
    if (obj.type === "rope") {
      scene.rope = obj.nodes.map(ground);
    } else if (obj.type === "spring") {
      scene.spring = { a: ground(obj.end_a), b: ground(obj.end_b), d: obj.d, h: obj.h, t: obj.t };
    } else {
      scene.particles = obj.particles.map(ground);
    }
  }
  return scene;
}

export const METER_WINDOW_S = 30;
export const SNAPSHOT_RATE = 30;
const CAPACITY = METER_WINDOW_S * SNAPSHOT_RATE;

export interface Meter {
  value: number;
  lo: number;
  hi: number;
  /** value scaled into 0..1 against the window's min/max. */
  norm: number;
}

class RingBuffer {
  private data = new Float64Array(CAPACITY);
  private head = 0;
  private count = 0;

  push(value: number): void {
    this.data[this.head] = value;
    this.head = (this.head + 1) % CAPACITY;
    if (this.count < CAPACITY) this.count++;
  }

  get length(): number {
    return this.count;
  }

  last(): number {
    if (this.count === 0) return 0;
    return this.data[(this.head - 1 + CAPACITY) % CAPACITY]!;
  }

  bounds(): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    for (let i = 0; i < this.count; i++) {
      const v = this.data[i]!;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    return [lo, hi];
  }
}

export class LiveView {
  latest: Snapshot | null = null;
  decodeErrors = 0;
  snapshotsSeen = 0;

  private buffers = new Map<string, RingBuffer>();

  /** Decode one binary frame; bad bytes bump the badge counter. */
  ingest(bytes: Uint8Array): Snapshot | null {
    let snap: Snapshot;
    try {
      snap = decodeSnapshot(bytes);
    } catch (err) {
      if (err instanceof SnapshotDecodeError) {
        this.decodeErrors++;
        return null;
      }
      throw err;
    }
    this.accept(snap);
    return snap;
  }

  /** Record an already-decoded snapshot (JSON-snapshot debug mode). */
  accept(snap: Snapshot): void {
    this.latest = snap;
    this.snapshotsSeen++;
    for (const [name, value] of Object.entries(snap.signals)) {
      let buffer = this.buffers.get(name);
      if (buffer === undefined) {
        buffer = new RingBuffer();
        this.buffers.set(name, buffer);
      }
      buffer.push(value);
    }
  }

  signalNames(): string[] {
    return [...this.buffers.keys()].sort();
  }

  /** Auto-scaled meter over the 30 s window; null before first sample. */
  meter(name: string): Meter | null {
    const buffer = this.buffers.get(name);
    if (buffer === undefined || buffer.length === 0) return null;
    const value = buffer.last();
    let [lo, hi] = buffer.bounds();
    if (hi - lo < 1e-12) {
      // flat signal: widen so the needle sits mid-scale instead of jumping
      lo -= 0.5;
      hi += 0.5;
    }
    return { value, lo, hi, norm: (value - lo) / (hi - lo) };
  }

  bufferLength(name: string): number {
    return this.buffers.get(name)?.length ?? 0;
  }
}
