/**
 * Builders for the session-server JSON control schema.
 *
 * Each helper returns the exact wire string for one command frame.
 * The server replies to a bad frame with {"error":{reason,detail}};
 * successful config changes are acknowledged only by the next
 * snapshot's config_version, never by a direct reply.
 */

export type ModeWord = "none" | "rope" | "spring" | "magnetic" | "all";

export function setParam(object: string, param: string, value: number): string {
  return JSON.stringify({ set_param: { object, param, value } });
}

export function switchMode(mode: ModeWord): string {
  return JSON.stringify({ switch_mode: mode });
}

export function setMonopole(agent: number, value: number): string {
  return JSON.stringify({ set_monopole: { agent, value } });
}

/** Ambient loudness feed, 0..1. An input signal, not a config change. */
export function audioEnv(value: number): string {
  return JSON.stringify({ audio_env: value });
}

export interface StageJson {
  kind: "linear" | "clamp" | "rangemap" | "ema" | "invert";
  [key: string]: unknown;
}

export interface MappingSpecJson {
  mapping_id: string;
  source: string;
  chain: StageJson[];
  target_address: string;
  target_type?: "float32";
}

export function setMapping(spec: MappingSpecJson): string {
  return JSON.stringify({ set_mapping: spec });
}

export function removeMapping(mappingId: string): string {
  return JSON.stringify({ remove_mapping: { mapping_id: mappingId } });
}
