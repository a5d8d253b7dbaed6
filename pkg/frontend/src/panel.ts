/**
 * PanelModel: server-authoritative state behind the OJ control surface.
 *
 * The panel never displays a value the server has not confirmed.
 * A UI action emits exactly one control frame and parks a pending
 * entry; the entry commits when a snapshot arrives whose
 * config_version covers it (each applied control bumps the version by
 * one) and is dropped when the server replies with an error. Until
 * then the sliders keep showing the last acknowledged state.
 *
 * While disconnected, actions queue for up to one second and are then
 * dropped with a visible warning.
 */

import { setMonopole, setParam, switchMode } from "./control.js";
import { modeWord, type HelloFrame, type ParamRanges, type Snapshot } from "./protocol.js";

export type ConnectionState = "connecting" | "connected" | "disconnected";
export type TabName = "rope" | "spring" | "magnetic";

export const QUEUE_TTL_MS = 1000;
export const MONOPOLE_STEP = 0.5;
export const EXPOSED_MONOPOLES = 3; // steppers for agents 0..2

export const ROPE_SLIDERS = ["mass_total", "width", "elasticity"] as const;
export const SPRING_SLIDERS = [
  "wavelength",
  "shake_speed",
  "shake_strength",
  "wave_width",
  "rotation_speed",
  "offset",
] as const;

// Engine defaults; the hello frame carries ranges but not current
// values, so these seed the display until the first acknowledged edit.
const DEFAULT_VALUES: Record<string, Record<string, number>> = {
  rope: { mass_total: 1.0, width: 0.05, elasticity: 0.5 },
  spring: {
    wavelength: 1.0,
    shake_speed: 1.0,
    shake_strength: 1.0,
    wave_width: 1.0,
    rotation_speed: 1.0,
    offset: 0.0,
  },
};

const KEY_MODES: Record<string, TabName> = { "1": "rope", "2": "spring", "3": "magnetic" };

interface Pending {
  label: string;
  commit: () => void;
}

interface Queued {
  frame: string;
  at: number;
  label: string;
  commit: () => void;
}

export class PanelModel {
  connection: ConnectionState = "connecting";
  /** Last server-acknowledged config version. */
  configVersion = 0;
  /** Active mode word derived from the latest snapshot's mode byte. */
  mode = "none";
  tick = 0;
  /** Which parameter page is open. Local navigation, not server state. */
  tab: TabName = "rope";
  ranges: ParamRanges | null = null;
  warnings: string[] = [];

  private values: Record<string, Record<string, number>> = {
    rope: { ...DEFAULT_VALUES.rope },
    spring: { ...DEFAULT_VALUES.spring },
  };
  private monopoles: number[] = new Array(EXPOSED_MONOPOLES).fill(1.0);
  private pending: Pending[] = [];
  private queued: Queued[] = [];

  constructor(
    private send: (frame: string) => void,
    private now: () => number = () => Date.now(),
  ) {}

  // ---------------------------------------------------------- reads

  /** Acknowledged slider value (object "rope" | "spring"). */
  value(object: string, param: string): number {
    return this.values[object]?.[param] ?? 0;
  }

  /** Acknowledged monopole strength for one exposed agent. */
  monopole(agent: number): number {
    return this.monopoles[agent] ?? 0;
  }

  pendingCount(): number {
    return this.pending.length;
  }

  queuedCount(): number {
    this.prune();
    return this.queued.length;
  }

  range(object: string, param: string): [number, number] | null {
    return this.ranges?.[object]?.[param] ?? null;
  }

  // ------------------------------------------------------- UI actions

  /** Slider release: clamp to the advertised range and send one frame. */
  setSlider(object: "rope" | "spring", param: string, value: number): void {
    const clamped = this.clampTo(object, param, value);
    this.dispatch(setParam(object, param, clamped), `${object}.${param}`, () => {
      const page = this.values[object];
      if (page) page[param] = clamped;
    });
  }

  /** Stepper +/- on one of the exposed monopoles, step 0.5. */
  stepMonopole(agent: number, direction: 1 | -1): void {
    const next = this.clampTo("magnet", "strength", this.monopole(agent) + direction * MONOPOLE_STEP);
    this.dispatch(setMonopole(agent, next), `magnet.${agent}`, () => {
      this.monopoles[agent] = next;
    });
  }

  /** Mode tabs double as the mode switch, TouchOSC style. */
  selectTab(tab: TabName): void {
    this.tab = tab;
    this.dispatch(switchMode(tab), `mode.${tab}`, () => {});
  }

  /** Keyboard shortcut; returns false for keys the panel ignores. */
  pressKey(key: string): boolean {
    const tab = KEY_MODES[key];
    if (tab === undefined) return false;
    this.selectTab(tab);
    return true;
  }

  // --------------------------------------------------- network events

  onOpen(hello: HelloFrame): void {
    this.connection = "connected";
    this.configVersion = hello.config_version;
    this.mode = hello.mode;
    this.tick = hello.tick;
    this.ranges = hello.ranges;
    this.flushQueue();
  }

  onClose(): void {
    this.connection = "disconnected";
    // in-flight acks are lost with the socket; keep displayed state as-is
    this.pending = [];
  }

  onSnapshot(snap: Snapshot): void {
    this.tick = snap.tick;
    this.mode = modeWord(snap.mode);
    if (snap.config_version > this.configVersion) {
      let commits = snap.config_version - this.configVersion;
      while (commits > 0 && this.pending.length > 0) {
        this.pending.shift()!.commit();
        commits--;
      }
      this.configVersion = snap.config_version;
    }
  }

  onError(reason: string, detail: string): void {
    const dropped = this.pending.shift();
    const label = dropped ? ` (${dropped.label})` : "";
    this.warnings.push(`rejected${label}: ${reason}: ${detail}`);
  }

  /** Drop queued actions older than QUEUE_TTL_MS; call from the UI loop. */
  prune(): void {
    const cutoff = this.now() - QUEUE_TTL_MS;
    const keep: Queued[] = [];
    for (const entry of this.queued) {
      if (entry.at < cutoff) {
        this.warnings.push(`dropped while disconnected: ${entry.label}`);
      } else {
        keep.push(entry);
      }
    }
    this.queued = keep;
  }

  takeWarnings(): string[] {
    const out = this.warnings;
    this.warnings = [];
    return out;
  }

  // ---------------------------------------------------------- private

  private clampTo(object: string, param: string, value: number): number {
    const range = this.range(object, param);
    if (range === null) return value;
    return Math.min(Math.max(value, range[0]), range[1]);
  }

  private dispatch(frame: string, label: string, commit: () => void): void {
    if (this.connection === "connected") {
      this.pending.push({ label, commit });
      this.send(frame);
    } else {
      this.prune();
      this.queued.push({ frame, at: this.now(), label, commit });
    }
  }

  private flushQueue(): void {
    this.prune();
    const backlog = this.queued;
    this.queued = [];
    for (const entry of backlog) {
      this.pending.push({ label: entry.label, commit: entry.commit });
      this.send(entry.frame);
    }
  }
}
