/**
 * Wire protocol for the session-server stream endpoint (`/ws`).
 *
 * Inbound traffic is either JSON text (hello on connect, error replies
 * to bad control frames) or binary GFS1 snapshots. Snapshot layout,
 * big-endian throughout:
 *
 *   "GFS1" | tick u64 | mode u8 | config_version u32
 *   agent block:  count u8, then per agent: id u8, present u8,
 *                 position 3xf32, orientation 4xf32
 *   object block: count u8, then per object: type u8 (1 rope,
 *                 2 spring, 3 magnetic), frozen u8, payload:
 *                   rope     node_count u16, nodes 3xf32 each
 *                   spring   end_a 3xf32, end_b 3xf32, d f32, h f32,
 *                            t f32, visual_amplitude f32
 *                   magnetic particle_count u32, particles 3xf32 each
 *   signal block: count u16, then per signal: fnv1a32(name) u32, f32,
 *                 sorted by name
 *
 * Signal names travel as fnv1a32 hashes; this decoder resolves them
 * against the canonical name table and labels strangers "hash:xxxxxxxx".
 * The byte layout is covered by golden vectors shared with the server
 * test suite, so keep any change here in lockstep with the encoder.
 */

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number];

export interface SnapshotAgent {
  id: number;
  present: boolean;
  position: Vec3;
  orientation: Quat;
}

export type ObjectKind = "rope" | "spring" | "magnetic";

export interface RopeObject {
  type: "rope";
  frozen: boolean;
  nodes: Vec3[];
}

export interface SpringObject {
  type: "spring";
  frozen: boolean;
  end_a: Vec3;
  end_b: Vec3;
  d: number;
  h: number;
  t: number;
  visual_amplitude: number;
}

export interface MagneticObject {
  type: "magnetic";
  frozen: boolean;
  particles: Vec3[];
}

export type SnapshotObject = RopeObject | SpringObject | MagneticObject;

export interface Snapshot {
  tick: number;
  mode: number; // 0 none, 1 rope, 2 spring, 3 magnetic, 7 composite
  config_version: number;
  agents: SnapshotAgent[];
  objects: SnapshotObject[];
  signals: Record<string, number>;
}

// Single-object modes keep the OSC 1..3 codes; any composite set of
// active objects reports 7. The hello frame carries the full word.
export const MODE_WORDS: Record<number, string> = {
  0: "none",
  1: "rope",
  2: "spring",
  3: "magnetic",
  7: "multi",
};

export function modeWord(mode: number): string {
  return MODE_WORDS[mode] ?? `mode:${mode}`;
}

/** FNV-1a 32-bit over the ASCII bytes of `name`. */
export function fnv1a32(name: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < name.length; i++) {
    const code = name.charCodeAt(i);
    if (code > 0x7f) throw new Error(`fnv1a32: non-ascii character in ${JSON.stringify(name)}`);
    h ^= code;
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

/** Canonical signal names the server may publish, per the interface docs. */
export const CANONICAL_SIGNALS = [
  "agent.0.speed",
  "agent.1.speed",
  "agent.2.speed",
  "agent.3.speed",
  "audio.env",
  "group.energy",
  "magnet.d",
  "rope.a",
  "rope.v",
  "spring.d",
  "spring.h",
  "spring.t",
];

const KNOWN_HASHES = new Map<number, string>(CANONICAL_SIGNALS.map((n) => [fnv1a32(n), n]));

export class SnapshotDecodeError extends Error {}

const OBJECT_KINDS_BY_CODE: Record<number, ObjectKind> = { 1: "rope", 2: "spring", 3: "magnetic" };

class Cursor {
  private view: DataView;
  pos = 0;

  constructor(private data: Uint8Array) {
    this.view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  }

  private need(size: number): number {
    if (this.pos + size > this.data.byteLength) {
      throw new SnapshotDecodeError(`truncated snapshot at offset ${this.pos}, needed ${size} bytes`);
    }
    const at = this.pos;
    this.pos += size;
    return at;
  }

  u8(): number {
    return this.view.getUint8(this.need(1));
  }

  u16(): number {
    return this.view.getUint16(this.need(2));
  }

  u32(): number {
    return this.view.getUint32(this.need(4));
  }

  u64(): number {
    const big = this.view.getBigUint64(this.need(8));
    if (big > BigInt(Number.MAX_SAFE_INTEGER)) {
      throw new SnapshotDecodeError(`u64 value ${big} exceeds safe integer range`);
    }
    return Number(big);
  }

  f32(): number {
    return this.view.getFloat32(this.need(4));
  }

  vec3(): Vec3 {
    return [this.f32(), this.f32(), this.f32()];
  }

  vecs(count: number): Vec3[] {
    const out: Vec3[] = new Array(count);
    for (let i = 0; i < count; i++) out[i] = this.vec3();
    return out;
  }

  get remaining(): number {
    return this.data.byteLength - this.pos;
  }
}

export function decodeSnapshot(data: Uint8Array): Snapshot {
  if (data.byteLength < 4 || data[0] !== 0x47 || data[1] !== 0x46 || data[2] !== 0x53 || data[3] !== 0x31) {
    throw new SnapshotDecodeError("bad magic, want GFS1");
  }
  const c = new Cursor(data);
  c.pos = 4;
  const tick = c.u64();
  const mode = c.u8();
  const config_version = c.u32();

  const agents: SnapshotAgent[] = [];
  const agentCount = c.u8();
  for (let i = 0; i < agentCount; i++) {
    const id = c.u8();
    const present = c.u8() !== 0;
    const position = c.vec3();
    const orientation: Quat = [c.f32(), c.f32(), c.f32(), c.f32()];
    agents.push({ id, present, position, orientation });
  }

  const objects: SnapshotObject[] = [];
  const objectCount = c.u8();
  for (let i = 0; i < objectCount; i++) {
    const code = c.u8();
    const kind = OBJECT_KINDS_BY_CODE[code];
    if (kind === undefined) {
      throw new SnapshotDecodeError(`unknown object code ${code} at offset ${c.pos - 1}`);
    }
    const frozen = c.u8() !== 0;
    if (kind === "rope") {
      objects.push({ type: "rope", frozen, nodes: c.vecs(c.u16()) });
    } else if (kind === "spring") {
      objects.push({
        type: "spring",
        frozen,
        end_a: c.vec3(),
        end_b: c.vec3(),
        d: c.f32(),
        h: c.f32(),
        t: c.f32(),
        visual_amplitude: c.f32(),
      });
    } else {
      objects.push({ type: "magnetic", frozen, particles: c.vecs(c.u32()) });
    }
  }

  const signals: Record<string, number> = {};
  const signalCount = c.u16();
  for (let i = 0; i < signalCount; i++) {
    const hash = c.u32();
    const value = c.f32();
    const name = KNOWN_HASHES.get(hash) ?? `hash:${hash.toString(16).padStart(8, "0")}`;
    signals[name] = value;
  }
  if (c.remaining !== 0) {
    throw new SnapshotDecodeError(`trailing bytes after offset ${c.pos}`);
  }
  return { tick, mode, config_version, agents, objects, signals };
}

/** Plain-JSON form matching the shared golden vectors ("decoded" entries). */
export function snapshotToJson(snap: Snapshot): unknown {
  return {
    tick: snap.tick,
    mode: snap.mode,
    config_version: snap.config_version,
    agents: snap.agents.map((a) => ({
      id: a.id,
      present: a.present,
      position: [...a.position],
      orientation: [...a.orientation],
    })),
    objects: snap.objects.map((o) => {
      if (o.type === "rope") {
        return { type: o.type, frozen: o.frozen, nodes: o.nodes.map((n) => [...n]) };
      }
      if (o.type === "spring") {
        return {
          type: o.type,
          frozen: o.frozen,
          end_a: [...o.end_a],
          end_b: [...o.end_b],
          d: o.d,
          h: o.h,
          t: o.t,
          visual_amplitude: o.visual_amplitude,
        };
      }
      return { type: o.type, frozen: o.frozen, particles: o.particles.map((p) => [...p]) };
    }),
    signals: snap.signals,
  };
}

// --- JSON text frames -------------------------------------------------

export type ParamRanges = Record<string, Record<string, [number, number]>>;

export interface HelloFrame {
  kind: "hello";
  schema: number;
  config_version: number;
  mode: string;
  tick: number;
  ranges: ParamRanges;
}

export interface ErrorFrame {
  kind: "error";
  reason: string;
  detail: string;
}

export type TextFrame = HelloFrame | ErrorFrame;

/** Parse a JSON text frame from the server; null for anything foreign. */
export function parseTextFrame(text: string): TextFrame | null {
  let obj: any;
  try {
    obj = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  if (typeof obj.hello === "object" && obj.hello !== null) {
    const h = obj.hello;
    return {
      kind: "hello",
      schema: Number(h.schema),
      config_version: Number(h.config_version),
      mode: String(h.mode),
      tick: Number(h.tick),
      ranges: (h.ranges ?? {}) as ParamRanges,
    };
  }
  if (typeof obj.error === "object" && obj.error !== null) {
    return { kind: "error", reason: String(obj.error.reason), detail: String(obj.error.detail) };
  }
  return null;
}
