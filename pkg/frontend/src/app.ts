/**
 * DOM glue for the authoring UI. All reasoning stays server-side: this file
 * only wires the models in sketch.ts / timeline.ts / playback.ts to canvas
 * and form elements. Logic worth testing lives in those modules.
 */
import { ApiClient, ApiError } from "./api.js";
import { OverlayState, TYPE_STYLES, overlayBoxes } from "./overlay.js";
import { PlaybackModel } from "./playback.js";
import { SketchModel } from "./sketch.js";
import { TimelineModel } from "./timeline.js";
import type { EntityType, EventStepWire, FrameTemplateWire } from "./types.js";

const api = new ApiClient("");
const sketch = new SketchModel();
const timeline = new TimelineModel();
const playback = new PlaybackModel();
const overlay = new OverlayState();

let datasetId: string | null = null;
let currentTool: EntityType = "person";
const derivedSteps: EventStepWire[] = [];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string, isError = false): void {
  const status = el<HTMLElement>("status");
  status.textContent = text;
  status.classList.toggle("error", isError);
}

function reportError(err: unknown): void {
  setStatus(err instanceof ApiError ? `server: ${err.message}` : String(err), true);
}

// --- sketch canvas -----------------------------------------------------------

function drawSketch(): void {
  const canvas = el<HTMLCanvasElement>("sketch-canvas");
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (const entity of sketch.drawnEntities()) {
    const style = TYPE_STYLES[entity.type];
    ctx.strokeStyle = style.color;
    ctx.setLineDash(style.dashed ? [6, 4] : []);
    ctx.lineWidth = entity.id === sketch.selectedId ? 3 : 1.5;
    ctx.strokeRect(
      entity.box.x - entity.box.w / 2,
      entity.box.y - entity.box.h / 2,
      entity.box.w,
      entity.box.h,
    );
    ctx.setLineDash([]);
    ctx.fillStyle = style.color;
    ctx.fillText(entity.id, entity.box.x - entity.box.w / 2, entity.box.y - entity.box.h / 2 - 3);
    // orientation handle; not applicable to static regions
    if (entity.type !== "static") {
      const angle = (entity.orient * Math.PI) / 180;
      ctx.beginPath();
      ctx.moveTo(entity.box.x, entity.box.y);
      ctx.lineTo(entity.box.x + 12 * Math.cos(angle), entity.box.y - 12 * Math.sin(angle));
      ctx.stroke();
    }
  }
  const tray = el<HTMLElement>("tray");
  tray.textContent = sketch.trayEntities().map((e) => e.id).join(", ") || "(empty)";
  const selected = sketch.selected();
  el<HTMLElement>("inspector").textContent = selected
    ? `${selected.id}: ${selected.type} box(${selected.box.x},${selected.box.y},` +
      `${selected.box.w}x${selected.box.h}) orient ${selected.orient}`
    : "nothing selected";
}

function hitTest(x: number, y: number): string | null {
  for (const entity of [...sketch.drawnEntities()].reverse()) {
    if (
      Math.abs(x - entity.box.x) <= entity.box.w / 2 &&
      Math.abs(y - entity.box.y) <= entity.box.h / 2
    ) {
      return entity.id;
    }
  }
  return null;
}

function wireSketch(): void {
  const canvas = el<HTMLCanvasElement>("sketch-canvas");
  canvas.addEventListener("click", (event) => {
    const rect = canvas.getBoundingClientRect();
    const x = event.clientX - rect.left;
    const y = event.clientY - rect.top;
    const hit = hitTest(x, y);
    if (hit) {
      sketch.select(hit);
    } else {
      const size = currentTool === "static" ? { w: 80, h: 50 } : { w: 24, h: 44 };
      sketch.addEntity(currentTool, { x, y, ...size });
    }
    drawSketch();
  });
  for (const tool of ["person", "object", "static"] as const) {
    el<HTMLButtonElement>(`tool-${tool}`).addEventListener("click", () => {
      currentTool = tool;
      setStatus(`tool: add ${tool}`);
    });
  }
  el<HTMLButtonElement>("to-tray").addEventListener("click", () => {
    if (sketch.selectedId) {
      sketch.sendToTray(sketch.selectedId);
      drawSketch();
    }
  });
  el<HTMLButtonElement>("delete-entity").addEventListener("click", () => {
    if (sketch.selectedId) {
      sketch.deleteEntity(sketch.selectedId);
      drawSketch();
    }
  });
  el<HTMLButtonElement>("derive-template").addEventListener("click", async () => {
    try {
      const stepId = `step${derivedSteps.length}`;
      const template = await api.deriveFrameTemplate(sketch.toPayload(stepId));
      showTemplate(template);
      derivedSteps.push({ id: stepId, template, mode: "instant", threshold: 1.0 });
      timeline.addBar(stepId, 10 + 60 * (derivedSteps.length - 1), 50 + 60 * (derivedSteps.length - 1));
      drawTimeline();
    } catch (err) {
      reportError(err);
    }
  });
}

function showTemplate(template: FrameTemplateWire): void {
  // display the server's derivation verbatim; nothing is computed locally
  el<HTMLElement>("template-view").textContent = JSON.stringify(template, null, 2);
}

// --- timeline ----------------------------------------------------------------

function drawTimeline(): void {
  const canvas = el<HTMLCanvasElement>("timeline-canvas");
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  timeline.allBars().forEach((bar, row) => {
    ctx.fillStyle = bar.stepId === timeline.selectedId ? "#4a8" : "#79b";
    ctx.fillRect(bar.x0, 12 + row * 24, bar.x1 - bar.x0, 16);
    ctx.fillStyle = "#000";
    ctx.fillText(bar.stepId, bar.x0, 10 + row * 24);
  });
}

function wireTimeline(): void {
  el<HTMLButtonElement>("derive-event").addEventListener("click", async () => {
    try {
      const event = await api.deriveEventTemplate("authored", derivedSteps, timeline.toPayload());
      el<HTMLElement>("constraints-view").textContent = JSON.stringify(event.constraints, null, 2);
      if (datasetId) await api.registerTemplate(datasetId, event);
    } catch (err) {
      reportError(err);
    }
  });
}

// --- playback ----------------------------------------------------------------

async function showFrame(frame: number): Promise<void> {
  if (!datasetId) return;
  const tag = overlay.request(frame);
  try {
    const response = await api.getFrame(datasetId, frame);
    if (!overlay.accept(tag, overlayBoxes(response))) return; // stale answer
  } catch (err) {
    reportError(err);
    return;
  }
  const canvas = el<HTMLCanvasElement>("playback-canvas");
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const image = el<HTMLImageElement>("frame-image");
  image.src = `/assets/${datasetId}/${frame}.jpg`; // missing images degrade to box-only
  const visible = overlay.visible();
  if (!visible) return;
  for (const box of visible.boxes) {
    ctx.strokeStyle = box.color;
    ctx.setLineDash(box.dashed ? [6, 4] : []);
    ctx.strokeRect(box.x, box.y, box.w, box.h);
    ctx.setLineDash([]);
    ctx.fillStyle = box.color;
    ctx.fillText(box.label, box.x, box.y - 3);
  }
  el<HTMLElement>("frame-label").textContent = `frame ${frame}`;
}

async function pollDetections(): Promise<void> {
  if (!playback.detectionEnabled) return;
  try {
    const response = await api.listDetections(playback.pollCursor);
    const fresh = playback.acceptDetections(response.next, response.detections);
    if (fresh.length) {
      el<HTMLElement>("detections-view").textContent = playback.detections
        .map((d) => `${d.event} ${JSON.stringify(d.bindings)} @ ${JSON.stringify(d.steps)}`)
        .join("\n");
    }
  } catch (err) {
    reportError(err);
  }
}

function wirePlayback(): void {
  el<HTMLButtonElement>("upload").addEventListener("click", async () => {
    try {
      const cvml = el<HTMLTextAreaElement>("cvml-input").value;
      const uploaded = await api.uploadDataset(cvml);
      datasetId = uploaded.dataset_id;
      const range = await api.getRange(datasetId);
      playback.setRange(range.min, range.max);
      setStatus(`loaded ${datasetId}: frames ${range.min}..${range.max}`);
      await showFrame(playback.current);
    } catch (err) {
      reportError(err);
    }
  });
  el<HTMLButtonElement>("jump").addEventListener("click", async () => {
    const target = Number(el<HTMLInputElement>("jump-frame").value);
    const result = playback.jumpTo(target);
    if (result.notice) setStatus(result.notice);
    await showFrame(result.frame);
  });
  el<HTMLButtonElement>("step").addEventListener("click", () => showFrame(playback.step()));
  el<HTMLButtonElement>("play").addEventListener("click", () => {
    playback.playing = !playback.playing;
  });
  el<HTMLInputElement>("detect-toggle").addEventListener("change", (event) => {
    playback.toggleDetection((event.target as HTMLInputElement).checked);
    if (!playback.detectionEnabled) el<HTMLElement>("detections-view").textContent = "";
  });
  window.setInterval(async () => {
    if (playback.playing) await showFrame(playback.step());
    await pollDetections();
  }, 250);
}

export function start(): void {
  wireSketch();
  wireTimeline();
  wirePlayback();
  drawSketch();
  drawTimeline();
  setStatus("ready");
}

if (typeof document !== "undefined" && document.getElementById("sketch-canvas")) {
  start();
}
