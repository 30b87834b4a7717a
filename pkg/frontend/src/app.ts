/** DOM glue: wires the form, canvas, banner, and tooltip to the pure
 * state/viewport/scene modules. Everything interesting is tested there;
 * this file only routes events.
 */
import { NeighborsClient } from "./api";
import { hitTest, render } from "./scene";
import {
  ViewState,
  applyBoxZoom,
  applyFit,
  applyPan,
  applyResult,
  initialState,
  setMode,
} from "./state";
import { CanvasSize, ScreenRect } from "./types";

const canvas = document.getElementById("plot") as HTMLCanvasElement;
const form = document.getElementById("query-form") as HTMLFormElement;
const input = document.getElementById("query-input") as HTMLInputElement;
const bannerEl = document.getElementById("banner") as HTMLDivElement;
const tooltipEl = document.getElementById("tooltip") as HTMLDivElement;

const client = new NeighborsClient();
let state: ViewState = initialState();
let size: CanvasSize = { width: 0, height: 0 };
let dragRect: ScreenRect | null = null;
let panLast: [number, number] | null = null;

function resize(): void {
  const dpr = window.devicePixelRatio || 1;
  size = { width: canvas.clientWidth, height: canvas.clientHeight };
  canvas.width = Math.round(size.width * dpr);
  canvas.height = Math.round(size.height * dpr);
  const ctx = canvas.getContext("2d");
  ctx?.setTransform(dpr, 0, 0, dpr, 0, 0);
  draw();
}

function draw(): void {
  const ctx = canvas.getContext("2d");
  if (ctx !== null) {
    render(ctx, size, state.points, state.viewport, dragRect);
  }
}

function syncBanner(): void {
  if (state.banner === null) {
    bannerEl.classList.add("hidden");
    bannerEl.textContent = "";
  } else {
    bannerEl.classList.remove("hidden");
    bannerEl.classList.toggle("info", state.banner.kind === "warn");
    bannerEl.textContent = state.banner.text;
  }
}

function hideTooltip(): void {
  tooltipEl.classList.add("hidden");
}

function canvasPos(ev: MouseEvent): [number, number] {
  const box = canvas.getBoundingClientRect();
  return [ev.clientX - box.left, ev.clientY - box.top];
}

form.addEventListener("submit", (ev) => {
  ev.preventDefault();
  const tag = input.value.trim();
  if (tag === "") {
    return;
  }
  void client.submit(tag).then((result) => {
    state = applyResult(state, tag, result);
    syncBanner();
    draw();
  });
});

canvas.addEventListener("mousedown", (ev) => {
  if (state.viewport === null) {
    return;
  }
  ev.preventDefault();
  hideTooltip();
  const [sx, sy] = canvasPos(ev);
  if (ev.shiftKey) {
    state = setMode(state, "panning");
    panLast = [sx, sy];
  } else {
    state = setMode(state, "box-select");
    dragRect = { x0: sx, y0: sy, x1: sx, y1: sy };
  }
});

canvas.addEventListener("mousemove", (ev) => {
  const [sx, sy] = canvasPos(ev);
  if (state.mode === "panning" && panLast !== null) {
    state = applyPan(state, size, sx - panLast[0], sy - panLast[1]);
    panLast = [sx, sy];
    draw();
  } else if (state.mode === "box-select" && dragRect !== null) {
    dragRect = { ...dragRect, x1: sx, y1: sy };
    draw();
  } else {
    const hit = hitTest(state.points, state.viewport, size, sx, sy);
    if (hit === null) {
      hideTooltip();
    } else {
      tooltipEl.textContent = hit.similarity === null
        ? `${hit.tag} (query)`
        : `${hit.tag}  sim ${hit.similarity.toFixed(4)}`;
      tooltipEl.style.left = `${hit.sx + 12}px`;
      tooltipEl.style.top = `${hit.sy + 12}px`;
      tooltipEl.classList.remove("hidden");
    }
  }
});

function finishInteraction(): void {
  if (state.mode === "box-select" && dragRect !== null) {
    state = applyBoxZoom(state, size, dragRect);
  }
  dragRect = null;
  panLast = null;
  state = setMode(state, "idle");
  draw();
}

canvas.addEventListener("mouseup", finishInteraction);
canvas.addEventListener("mouseleave", () => {
  hideTooltip();
  if (state.mode !== "idle") {
    finishInteraction();
  }
});

canvas.addEventListener("dblclick", () => {
  state = applyFit(state);
  draw();
});

window.addEventListener("resize", resize);
resize();
input.focus();

void client.healthy().then((ok) => {
  if (!ok) {
    state = {
      ...state,
      banner: { kind: "error", text: "service is not ready yet, retry shortly" },
    };
    syncBanner();
  }
});
