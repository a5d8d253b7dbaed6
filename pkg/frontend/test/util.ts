import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

// golden/ lives at the repository root, shared with the server suite
export const GOLDEN_DIR = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "..", "golden");

export function loadGolden<T = any>(name: string): T {
  return JSON.parse(readFileSync(path.join(GOLDEN_DIR, name), "utf8")) as T;
}

export function hexToBytes(hex: string): Uint8Array {
  if (hex.length % 2 !== 0) throw new Error("odd hex length");
  const out = new Uint8Array(hex.length / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = parseInt(hex.slice(2 * i, 2 * i + 2), 16);
  }
  return out;
}

export function bytesToHex(bytes: Uint8Array): string {
  return [...bytes].map((b) => b.toString(16).padStart(2, "0")).join("");
}

/** Tiny deterministic PRNG so fuzz failures reproduce. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
