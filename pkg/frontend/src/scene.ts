/** Canvas scene: markers, labels with greedy declutter, query highlight.
 *
 * Rendering goes through the Ctx2D subset below so tests can drive it with
 * a recording stub instead of a real 2D context. Label collision uses a
 * fixed character-width estimate; close enough for declutter and fully
 * deterministic.
 */
import { CanvasSize, NeighborsResponse, ScreenRect, Viewport } from "./types";
import { dataToScreen } from "./viewport";

export const QUERY_COLOR = "#c0392b";
export const POINT_COLOR = "#33506e";
export const LABEL_COLOR = "#1c2430";
export const MARKER_RADIUS = 3;
export const QUERY_RING_RADIUS = 8;
export const LABEL_MAX_CHARS = 24;
export const HIT_RADIUS_PX = 8;

const LABEL_CHAR_W = 6.6;
const LABEL_H = 12;
const LABEL_GAP = 6;

/** Subset of CanvasRenderingContext2D the renderer needs. */
export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  setLineDash(segments: number[]): void;
}

/** Hashtag string shown next to a marker; long tags get ellipsized. */
export function ellipsize(tag: string): string {
  if (tag.length <= LABEL_MAX_CHARS) {
    return tag;
  }
  return tag.slice(0, LABEL_MAX_CHARS - 1) + "…";
}

interface LabelBox {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

function labelBox(sx: number, sy: number, text: string): LabelBox {
  const x0 = sx + LABEL_GAP;
  const y0 = sy - LABEL_H / 2;
  return { x0, y0, x1: x0 + text.length * LABEL_CHAR_W, y1: y0 + LABEL_H };
}

function overlaps(a: LabelBox, b: LabelBox): boolean {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

export interface PlacedLabel {
  sx: number;
  sy: number;
  text: string;
}

/**
 * Greedy declutter in the order given: a label is kept when its box does
 * not overlap any box kept so far. Entries flagged required are always
 * kept and their boxes still block later labels (the query label).
 */
export function placeLabels(
  labels: ReadonlyArray<PlacedLabel & { required?: boolean }>,
): boolean[] {
  const kept: LabelBox[] = [];
  const decisions: boolean[] = [];
  for (const label of labels) {
    const box = labelBox(label.sx, label.sy, label.text);
    const free = !kept.some((other) => overlaps(box, other));
    if (label.required || free) {
      kept.push(box);
      decisions.push(true);
    } else {
      decisions.push(false);
    }
  }
  return decisions;
}

function inside(size: CanvasSize, sx: number, sy: number): boolean {
  return sx >= 0 && sx <= size.width && sy >= 0 && sy <= size.height;
}

/**
 * Draw the loaded result into ctx. The query point is drawn last: marker,
 * red highlight ring, and a never-ellipsized, never-decluttered label.
 * `dragRect` is the in-progress box-zoom rectangle, if any.
 */
export function render(
  ctx: Ctx2D,
  size: CanvasSize,
  points: NeighborsResponse | null,
  view: Viewport | null,
  dragRect: ScreenRect | null = null,
): void {
  ctx.clearRect(0, 0, size.width, size.height);
  if (points === null || view === null) {
    return;
  }

  const neighbors = points.neighbors.map((nb) => {
    const [sx, sy] = dataToScreen(view, size, nb.x, nb.y);
    return { sx, sy, text: ellipsize(nb.tag) };
  });
  const [qx, qy] = dataToScreen(view, size, points.x, points.y);
  const labels = [
    { sx: qx, sy: qy, text: points.query, required: true },
    ...neighbors,
  ];
  const keep = placeLabels(labels);

  ctx.font = `${LABEL_H - 1}px system-ui, sans-serif`;
  neighbors.forEach((nb, i) => {
    if (!inside(size, nb.sx, nb.sy)) {
      return;
    }
    ctx.fillStyle = POINT_COLOR;
    ctx.beginPath();
    ctx.arc(nb.sx, nb.sy, MARKER_RADIUS, 0, 2 * Math.PI);
    ctx.fill();
    if (keep[i + 1]) {
      ctx.fillStyle = LABEL_COLOR;
      ctx.fillText(nb.text, nb.sx + LABEL_GAP, nb.sy + LABEL_H / 2 - 2);
    }
  });

  if (inside(size, qx, qy)) {
    ctx.fillStyle = QUERY_COLOR;
    ctx.beginPath();
    ctx.arc(qx, qy, MARKER_RADIUS, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = QUERY_COLOR;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(qx, qy, QUERY_RING_RADIUS, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.fillStyle = QUERY_COLOR;
    ctx.fillText(points.query, qx + LABEL_GAP, qy + LABEL_H / 2 - 2);
  }

  if (dragRect !== null) {
    ctx.strokeStyle = POINT_COLOR;
    ctx.lineWidth = 1;
    ctx.setLineDash([4, 3]);
    ctx.strokeRect(Math.min(dragRect.x0, dragRect.x1),
                   Math.min(dragRect.y0, dragRect.y1),
                   Math.abs(dragRect.x1 - dragRect.x0),
                   Math.abs(dragRect.y1 - dragRect.y0));
    ctx.setLineDash([]);
  }
}

export interface Hit {
  tag: string;
  similarity: number | null;
  sx: number;
  sy: number;
}

/** Closest marker within HIT_RADIUS_PX of a screen point, query included. */
export function hitTest(
  points: NeighborsResponse | null,
  view: Viewport | null,
  size: CanvasSize,
  sx: number,
  sy: number,
): Hit | null {
  if (points === null || view === null) {
    return null;
  }
  let best: Hit | null = null;
  let bestD2 = HIT_RADIUS_PX * HIT_RADIUS_PX;
  const candidates = [
    { tag: points.query, similarity: null as number | null, x: points.x, y: points.y },
    ...points.neighbors.map((nb) => (
      { tag: nb.tag, similarity: nb.similarity as number | null, x: nb.x, y: nb.y })),
  ];
  for (const c of candidates) {
    const [px, py] = dataToScreen(view, size, c.x, c.y);
    const d2 = (px - sx) * (px - sx) + (py - sy) * (py - sy);
    if (d2 <= bestD2) {
      bestD2 = d2;
      best = { tag: c.tag, similarity: c.similarity, sx: px, sy: py };
    }
  }
  return best;
}
