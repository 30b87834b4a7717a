/** Pure viewport math: data <-> screen mapping, auto-fit, box zoom, pan.
 *
 * Screen space has y growing downward, data space upward; every mapping
 * here flips y once. Nothing in this module touches the DOM.
 */
import { CanvasSize, ScreenRect, Viewport } from "./types";

/** Fraction of the point spread added on each side by fitViewport. */
export const FIT_MARGIN = 0.05;

/** Drags with a smaller screen-pixel area are treated as clicks. */
export const MIN_ZOOM_AREA_PX = 16;

export function dataToScreen(
  view: Viewport, size: CanvasSize, x: number, y: number,
): [number, number] {
  const sx = ((x - view.xmin) / (view.xmax - view.xmin)) * size.width;
  const sy = size.height - ((y - view.ymin) / (view.ymax - view.ymin)) * size.height;
  return [sx, sy];
}

export function screenToData(
  view: Viewport, size: CanvasSize, sx: number, sy: number,
): [number, number] {
  const x = view.xmin + (sx / size.width) * (view.xmax - view.xmin);
  const y = view.ymin + ((size.height - sy) / size.height) * (view.ymax - view.ymin);
  return [x, y];
}

/**
 * Smallest viewport containing every point, padded by `margin` of the span
 * on each side. Degenerate spans (single point, collinear data) get one
 * data unit of padding so the viewport invariant xmin < xmax still holds.
 */
export function fitViewport(
  points: ReadonlyArray<{ x: number; y: number }>, margin: number = FIT_MARGIN,
): Viewport {
  if (points.length === 0) {
    return { xmin: -1, xmax: 1, ymin: -1, ymax: 1 };
  }
  let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
  for (const p of points) {
    xmin = Math.min(xmin, p.x);
    xmax = Math.max(xmax, p.x);
    ymin = Math.min(ymin, p.y);
    ymax = Math.max(ymax, p.y);
  }
  const padX = xmax > xmin ? (xmax - xmin) * margin : 1;
  const padY = ymax > ymin ? (ymax - ymin) * margin : 1;
  return { xmin: xmin - padX, xmax: xmax + padX, ymin: ymin - padY, ymax: ymax + padY };
}

/**
 * Viewport whose screen image is the drawn rectangle, aspect preserved by
 * growing the rectangle's shorter side (relative to the canvas aspect)
 * about its center before mapping. Sub-threshold drags return the viewport
 * unchanged. A full-canvas rectangle is the identity.
 */
export function boxZoom(
  view: Viewport, size: CanvasSize, rect: ScreenRect,
): Viewport {
  let rw = Math.abs(rect.x1 - rect.x0);
  let rh = Math.abs(rect.y1 - rect.y0);
  if (rw * rh <= MIN_ZOOM_AREA_PX) {
    return view;
  }
  const cx = (rect.x0 + rect.x1) / 2;
  const cy = (rect.y0 + rect.y1) / 2;
  const aspect = size.width / size.height;
  if (rw / rh < aspect) {
    rw = rh * aspect;
  } else {
    rh = rw / aspect;
  }
  const [xmin, ymax] = screenToData(view, size, cx - rw / 2, cy - rh / 2);
  const [xmax, ymin] = screenToData(view, size, cx + rw / 2, cy + rh / 2);
  return { xmin, xmax, ymin, ymax };
}

/**
 * Viewport after the content moved by (dxPx, dyPx) screen pixels, i.e. the
 * viewport itself slides the opposite way. pan(v, s, dx, dy) followed by
 * pan(.., -dx, -dy) restores v up to floating-point noise.
 */
export function pan(
  view: Viewport, size: CanvasSize, dxPx: number, dyPx: number,
): Viewport {
  const shiftX = (dxPx / size.width) * (view.xmax - view.xmin);
  const shiftY = (dyPx / size.height) * (view.ymax - view.ymin);
  return {
    xmin: view.xmin - shiftX,
    xmax: view.xmax - shiftX,
    ymin: view.ymin + shiftY,
    ymax: view.ymax + shiftY,
  };
}
