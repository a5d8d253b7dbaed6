/**
 * oj-console browser entry.
 *
 * Connects to a gravfield session server's `/ws` stream, builds the
 * control panel from the hello handshake, and draws the top-down
 * spectator view plus auto-scaled signal meters from GFS1 snapshots.
 *
 * Keyboard: 1 rope, 2 spring, 3 magnetic.
 */

import { PanelModel, ROPE_SLIDERS, SPRING_SLIDERS, EXPOSED_MONOPOLES, type TabName } from "./panel.js";
import { parseTextFrame } from "./protocol.js";
import { LiveView, renderTopdown } from "./view.js";

const params = new URLSearchParams(location.search);
const wsUrl = params.get("ws") ?? `ws://${location.hostname || "localhost"}:13602/ws`;

function mustGet<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`#${id} not found`);
  return el as T;
}

const canvas = mustGet<HTMLCanvasElement>("view");
const maybeCtx = canvas.getContext("2d");
if (!maybeCtx) throw new Error("2D context unavailable");
const ctx: CanvasRenderingContext2D = maybeCtx;

const panelDiv = mustGet<HTMLDivElement>("panel");
const metersDiv = mustGet<HTMLDivElement>("meters");
const statusDiv = mustGet<HTMLDivElement>("status");
const warningsDiv = mustGet<HTMLDivElement>("warnings");

let socket: WebSocket | null = null;
const panel = new PanelModel((frame) => {
  if (socket && socket.readyState === WebSocket.OPEN) socket.send(frame);
});
const live = new LiveView();
const recentWarnings: string[] = [];

// ==============================
// Connection
// ==============================

function connect(): void {
  const ws = new WebSocket(wsUrl);
  ws.binaryType = "arraybuffer";
  socket = ws;

  ws.onmessage = (event: MessageEvent) => {
    if (typeof event.data === "string") {
      const frame = parseTextFrame(event.data);
      if (frame === null) return;
      if (frame.kind === "hello") {
        panel.onOpen(frame);
        buildPanel();
      } else {
        panel.onError(frame.reason, frame.detail);
      }
      return;
    }
    const snap = live.ingest(new Uint8Array(event.data as ArrayBuffer));
    if (snap !== null) panel.onSnapshot(snap);
  };

  ws.onclose = () => {
    panel.onClose();
    socket = null;
    setTimeout(connect, 1000); // retry until the server comes back
  };
  ws.onerror = () => ws.close();
}

// ==============================
// Panel DOM
// ==============================

const TABS: TabName[] = ["rope", "spring", "magnetic"];
let sliderInputs: { object: "rope" | "spring"; param: string; input: HTMLInputElement }[] = [];
let monopoleSpans: HTMLSpanElement[] = [];
let versionSpan: HTMLSpanElement | null = null;

function buildPanel(): void {
  panelDiv.textContent = "";
  sliderInputs = [];
  monopoleSpans = [];

  const tabBar = document.createElement("div");
  tabBar.className = "tabs";
  for (const tab of TABS) {
    const btn = document.createElement("button");
    btn.textContent = tab;
    btn.dataset.tab = tab;
    btn.onclick = () => {
      panel.selectTab(tab); // tabs double as the mode switch
      refreshPanel();
    };
    tabBar.appendChild(btn);
  }
  panelDiv.appendChild(tabBar);

  const pages: Record<TabName, HTMLDivElement> = {
    rope: document.createElement("div"),
    spring: document.createElement("div"),
    magnetic: document.createElement("div"),
  };
  for (const tab of TABS) {
    pages[tab].className = "page";
    pages[tab].dataset.page = tab;
    panelDiv.appendChild(pages[tab]);
  }

  for (const param of ROPE_SLIDERS) addSlider(pages.rope, "rope", param);
  for (const param of SPRING_SLIDERS) addSlider(pages.spring, "spring", param);
  for (let agent = 0; agent < EXPOSED_MONOPOLES; agent++) addStepper(pages.magnetic, agent);

  const version = document.createElement("div");
  version.className = "version";
  versionSpan = document.createElement("span");
  version.append("config_version ", versionSpan);
  panelDiv.appendChild(version);

  refreshPanel();
}

function addSlider(page: HTMLDivElement, object: "rope" | "spring", param: string): void {
  const range = panel.range(object, param);
  const row = document.createElement("label");
  row.className = "slider-row";
  const input = document.createElement("input");
  input.type = "range";
  if (range) {
    input.min = String(range[0]);
    input.max = String(range[1]);
  }
  input.step = "any";
  input.value = String(panel.value(object, param));
  // commit on release only: one UI action, one control frame
  input.onchange = () => panel.setSlider(object, param, Number(input.value));
  const caption = document.createElement("span");
  caption.textContent = param;
  row.append(caption, input);
  page.appendChild(row);
  sliderInputs.push({ object, param, input });
}

function addStepper(page: HTMLDivElement, agent: number): void {
  const row = document.createElement("div");
  row.className = "stepper-row";
  const minus = document.createElement("button");
  minus.textContent = "-";
  minus.onclick = () => panel.stepMonopole(agent, -1);
  const plus = document.createElement("button");
  plus.textContent = "+";
  plus.onclick = () => panel.stepMonopole(agent, 1);
  const value = document.createElement("span");
  monopoleSpans.push(value);
  row.append(`agent ${agent} strength `, minus, value, plus);
  page.appendChild(row);
}

function refreshPanel(): void {
  for (const btn of panelDiv.querySelectorAll<HTMLButtonElement>(".tabs button")) {
    btn.classList.toggle("open", btn.dataset.tab === panel.tab);
    btn.classList.toggle("active", btn.dataset.tab === panel.mode || panel.mode === "all");
  }
  for (const page of panelDiv.querySelectorAll<HTMLDivElement>(".page")) {
    page.style.display = page.dataset.page === panel.tab ? "" : "none";
  }
  // reflect only acknowledged values; a slider the user is about to
  // drag again gets snapped back if the server rejected the change
  for (const { object, param, input } of sliderInputs) {
    if (document.activeElement !== input) input.value = String(panel.value(object, param));
  }
  monopoleSpans.forEach((span, agent) => {
    span.textContent = panel.monopole(agent).toFixed(1);
  });
  if (versionSpan) versionSpan.textContent = String(panel.configVersion);
}

// ==============================
// Drawing
// ==============================

function worldToCanvas(): (p: [number, number]) => [number, number] {
  // arena is x in [-4, 4], z in [-8, 8]; leave a margin and keep aspect
  const margin = 20;
  const sx = (canvas.width - 2 * margin) / 8;
  const sy = (canvas.height - 2 * margin) / 16;
  const s = Math.min(sx, sy);
  return ([x, y]) => [canvas.width / 2 + x * s, canvas.height / 2 + y * s];
}

function draw(): void {
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, 0, w, h);

  if (live.latest !== null) {
    const scene = renderTopdown(live.latest);
    const toPx = worldToCanvas();

    ctx.fillStyle = "#9fb4c7";
    for (const p of scene.particles) {
      const [x, y] = toPx(p);
      ctx.fillRect(x - 1, y - 1, 2, 2);
    }

    if (scene.rope !== null && scene.rope.length > 1) {
      ctx.strokeStyle = "#e8c26a";
      ctx.lineWidth = 2;
      ctx.beginPath();
      scene.rope.forEach((p, i) => {
        const [x, y] = toPx(p);
        if (i === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      });
      ctx.stroke();
    }

    if (scene.spring !== null) {
      const [ax, ay] = toPx(scene.spring.a);
      const [bx, by] = toPx(scene.spring.b);
      ctx.strokeStyle = "#7ad0a0";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(ax, ay);
      ctx.lineTo(bx, by);
      ctx.stroke();
      ctx.fillStyle = "#7ad0a0";
      ctx.font = "11px monospace";
      const label = `d=${scene.spring.d.toFixed(2)} h=${scene.spring.h.toFixed(2)} t=${scene.spring.t.toFixed(2)}`;
      ctx.fillText(label, (ax + bx) / 2 + 6, (ay + by) / 2 - 6);
    }

    ctx.font = "12px monospace";
    for (const agent of scene.agents) {
      const [x, y] = toPx(agent.at);
      ctx.strokeStyle = agent.present ? "#6ab0f3" : "#53606d";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(x, y, 8, 0, Math.PI * 2);
      ctx.stroke();
      ctx.fillStyle = ctx.strokeStyle;
      ctx.fillText(agent.label, x + 10, y + 4);
    }
  }

  if (live.decodeErrors > 0) {
    ctx.fillStyle = "#e05555";
    ctx.font = "12px monospace";
    ctx.fillText(`decode errors: ${live.decodeErrors}`, 8, 16);
  }
}

function drawMeters(): void {
  metersDiv.textContent = "";
  for (const name of live.signalNames()) {
    const meter = live.meter(name);
    if (meter === null) continue;
    const row = document.createElement("div");
    row.className = "meter";
    const bar = document.createElement("div");
    bar.className = "bar";
    bar.style.width = `${Math.round(meter.norm * 100)}%`;
    const caption = document.createElement("span");
    caption.textContent = `${name} ${meter.value.toFixed(3)} [${meter.lo.toFixed(2)}, ${meter.hi.toFixed(2)}]`;
    row.append(bar, caption);
    metersDiv.appendChild(row);
  }
}

// ==============================
// Main loop
// ==============================

window.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLInputElement) return;
  if (panel.pressKey(event.key)) refreshPanel();
});

function frame(): void {
  panel.prune();
  for (const warning of panel.takeWarnings()) {
    recentWarnings.push(warning);
    if (recentWarnings.length > 5) recentWarnings.shift();
  }
  statusDiv.textContent =
    `${panel.connection} | mode ${panel.mode} | tick ${panel.tick} | v${panel.configVersion}` +
    (panel.queuedCount() > 0 ? ` | queued ${panel.queuedCount()}` : "");
  warningsDiv.textContent = recentWarnings.join("\n");
  refreshPanel();
  draw();
  drawMeters();
  requestAnimationFrame(frame);
}

connect();
requestAnimationFrame(frame);
