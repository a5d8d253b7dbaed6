import { describe, expect, it } from "vitest";

import {
  decodeSnapshot,
  fnv1a32,
  modeWord,
  parseTextFrame,
  SnapshotDecodeError,
} from "../src/protocol.js";
import { hexToBytes, loadGolden, mulberry32 } from "./util.js";

const SAMPLE = hexToBytes(loadGolden<{ hex: string }[]>("gfs1.json")[1]!.hex);

/** Test-local little builder for synthetic snapshot buffers. */
class Builder {
  private parts: number[] = [];

  u8(v: number) {
    this.parts.push(v & 0xff);
    return this;
  }
  u16(v: number) {
    return this.u8(v >> 8).u8(v);
  }
  u32(v: number) {
    return this.u16(v >>> 16).u16(v);
  }
  u64(v: number) {
    return this.u32(Math.floor(v / 2 ** 32)).u32(v >>> 0);
  }
  f32(v: number) {
    const scratch = new DataView(new ArrayBuffer(4));
    scratch.setFloat32(0, v);
    for (let i = 0; i < 4; i++) this.parts.push(scratch.getUint8(i));
    return this;
  }
  magic() {
    for (const ch of "GFS1") this.parts.push(ch.charCodeAt(0));
    return this;
  }
  bytes(): Uint8Array {
    return Uint8Array.from(this.parts);
  }
}

function header(tick: number, mode: number, version: number): Builder {
  return new Builder().magic().u64(tick).u8(mode).u32(version);
}

describe("decodeSnapshot", () => {
  it("rejects bad magic", () => {
    const bad = SAMPLE.slice();
    bad[0] = 0x58;
    expect(() => decodeSnapshot(bad)).toThrow(SnapshotDecodeError);
    expect(() => decodeSnapshot(new Uint8Array(0))).toThrow(/magic/);
  });

  it("rejects every strict prefix as truncated", () => {
    for (let len = 4; len < SAMPLE.byteLength; len++) {
      expect(() => decodeSnapshot(SAMPLE.slice(0, len)), `len ${len}`).toThrow(SnapshotDecodeError);
    }
  });

  it("rejects trailing bytes", () => {
    const padded = new Uint8Array(SAMPLE.byteLength + 1);
    padded.set(SAMPLE);
    expect(() => decodeSnapshot(padded)).toThrow(/trailing/);
  });

  it("rejects unknown object codes", () => {
    const bytes = header(1, 1, 0).u8(0).u8(1).u8(9).u8(0).bytes();
    expect(() => decodeSnapshot(bytes)).toThrow(/unknown object code/);
  });

  it("labels unknown signal hashes", () => {
    const bytes = header(1, 0, 0)
      .u8(0) // agents
      .u8(0) // objects
      .u16(2)
      .u32(fnv1a32("rope.v"))
      .f32(0.5)
      .u32(0xdeadbeef)
      .f32(2.0)
      .bytes();
    const snap = decodeSnapshot(bytes);
    expect(snap.signals).toEqual({ "rope.v": 0.5, "hash:deadbeef": 2.0 });
  });

  it("decodes an empty object block to agents only", () => {
    const bytes = header(42, 0, 5)
      .u8(1)
      .u8(3)
      .u8(1)
      .f32(1.0)
      .f32(2.0)
      .f32(3.0)
      .f32(0)
      .f32(0)
      .f32(0)
      .f32(1)
      .u8(0)
      .u16(0)
      .bytes();
    const snap = decodeSnapshot(bytes);
    expect(snap.tick).toBe(42);
    expect(snap.agents).toEqual([
      { id: 3, present: true, position: [1, 2, 3], orientation: [0, 0, 0, 1] },
    ]);
    expect(snap.objects).toEqual([]);
  });

  it("survives random garbage without out-of-bounds reads", () => {
    const rand = mulberry32(0xc0ffee);
    for (let trial = 0; trial < 300; trial++) {
      const len = Math.floor(rand() * 200);
      const bytes = new Uint8Array(len);
      for (let i = 0; i < len; i++) bytes[i] = Math.floor(rand() * 256);
      if (rand() < 0.5 && len >= 4) {
        bytes[0] = 0x47;
        bytes[1] = 0x46;
        bytes[2] = 0x53;
        bytes[3] = 0x31;
      }
      try {
        decodeSnapshot(bytes);
      } catch (err) {
        expect(err).toBeInstanceOf(SnapshotDecodeError);
      }
    }
  });
});

describe("modeWord", () => {
  it("maps the single-object codes and the composite marker", () => {
    expect(modeWord(0)).toBe("none");
    expect(modeWord(1)).toBe("rope");
    expect(modeWord(2)).toBe("spring");
    expect(modeWord(3)).toBe("magnetic");
    expect(modeWord(7)).toBe("multi");
    expect(modeWord(5)).toBe("mode:5");
  });
});

describe("parseTextFrame", () => {
  it("parses the hello handshake", () => {
    const frame = parseTextFrame(
      JSON.stringify({
        hello: {
          schema: 1,
          config_version: 4,
          mode: "rope",
          tick: 120,
          ranges: { rope: { mass_total: [0.1, 10.0] } },
        },
      }),
    );
    expect(frame).toEqual({
      kind: "hello",
      schema: 1,
      config_version: 4,
      mode: "rope",
      tick: 120,
      ranges: { rope: { mass_total: [0.1, 10.0] } },
    });
  });

  it("parses error replies", () => {
    const frame = parseTextFrame(JSON.stringify({ error: { reason: "range", detail: "x outside" } }));
    expect(frame).toEqual({ kind: "error", reason: "range", detail: "x outside" });
  });

  it("returns null for foreign payloads", () => {
    expect(parseTextFrame("not json")).toBeNull();
    expect(parseTextFrame("42")).toBeNull();
    expect(parseTextFrame('{"other":1}')).toBeNull();
  });
});
