/** View state and its pure transitions.
 *
 * The DOM layer owns nothing but event wiring; every rule the tests care
 * about (view reset on a new query, plot kept on failures, exactly one
 * query highlight) lives in these reducers.
 */
import { CanvasSize, NeighborsResponse, ScreenRect, Viewport } from "./types";
import { boxZoom, fitViewport, pan } from "./viewport";

export type Mode = "idle" | "box-select" | "panning";

export interface Banner {
  kind: "warn" | "error";
  text: string;
}

export interface ViewState {
  query: string | null;
  points: NeighborsResponse | null;
  viewport: Viewport | null;
  mode: Mode;
  banner: Banner | null;
}

export type QueryResult =
  | { kind: "ok"; data: NeighborsResponse }
  | { kind: "unknown-hashtag" }
  | { kind: "error"; message: string }
  | { kind: "aborted" };

export function initialState(): ViewState {
  return { query: null, points: null, viewport: null, mode: "idle", banner: null };
}

/** Neighbors plus the query point itself; the auto-fit must include both. */
export function allPoints(data: NeighborsResponse): Array<{ x: number; y: number }> {
  return [{ x: data.x, y: data.y }, ...data.neighbors];
}

/**
 * Fold one query outcome into the state. Success replaces the plot and
 * refits the viewport (a new query resets any zoom or pan); unknown-hashtag
 * and errors raise a banner and keep the previous plot and viewport;
 * aborted outcomes change nothing (a newer query is already in flight).
 */
export function applyResult(
  state: ViewState, tag: string, result: QueryResult,
): ViewState {
  switch (result.kind) {
    case "ok":
      return {
        query: result.data.query,
        points: result.data,
        viewport: fitViewport(allPoints(result.data)),
        mode: "idle",
        banner: null,
      };
    case "unknown-hashtag":
      return { ...state, banner: { kind: "warn", text: `unknown hashtag: ${tag}` } };
    case "error":
      return { ...state, banner: { kind: "error", text: `${result.message} (retry?)` } };
    case "aborted":
      return state;
  }
}

export function applyBoxZoom(
  state: ViewState, size: CanvasSize, rect: ScreenRect,
): ViewState {
  if (state.viewport === null) {
    return state;
  }
  return { ...state, viewport: boxZoom(state.viewport, size, rect) };
}

export function applyPan(
  state: ViewState, size: CanvasSize, dxPx: number, dyPx: number,
): ViewState {
  if (state.viewport === null) {
    return state;
  }
  return { ...state, viewport: pan(state.viewport, size, dxPx, dyPx) };
}

/** Refit the viewport to the loaded points (double-click reset). */
export function applyFit(state: ViewState): ViewState {
  if (state.points === null) {
    return state;
  }
  return { ...state, viewport: fitViewport(allPoints(state.points)) };
}

export function setMode(state: ViewState, mode: Mode): ViewState {
  return state.mode === mode ? state : { ...state, mode };
}
