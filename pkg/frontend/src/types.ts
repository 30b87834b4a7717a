/** One neighbor row as returned by /api/neighbors. */
export interface NeighborPoint {
  tag: string;
  similarity: number;
  x: number;
  y: number;
}

/** Successful /api/neighbors response body. */
export interface NeighborsResponse {
  query: string;
  x: number;
  y: number;
  neighbors: NeighborPoint[];
}

/** Visible region in atlas coordinate units; xmin < xmax and ymin < ymax. */
export interface Viewport {
  xmin: number;
  xmax: number;
  ymin: number;
  ymax: number;
}

/** Logical (CSS pixel) canvas size. */
export interface CanvasSize {
  width: number;
  height: number;
}

/** Drag rectangle in screen pixels; corners in any order. */
export interface ScreenRect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}
