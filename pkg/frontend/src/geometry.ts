/**
 * Stroke path geometry shared by the renderer and the pointer handlers.
 *
 * Drawing rules match the glyph data format: 2 control points draw a
 * straight segment, 3 draw one quadratic curve, 4 draw a straight lead-in
 * followed by a quadratic.
 */

import type { StrokeState } from "./api.js";

export type Point = [number, number];

export const HIT_RADIUS = 8;

export interface PathPiece {
  kind: "line" | "quad";
  pts: Point[];
}

export function strokePieces(points: Point[]): PathPiece[] {
  if (points.length < 2 || points.length > 4) {
    throw new Error(`stroke has ${points.length} control points, expected 2..4`);
  }
  if (points.length === 2) {
    return [{ kind: "line", pts: [points[0], points[1]] }];
  }
  if (points.length === 3) {
    return [{ kind: "quad", pts: [points[0], points[1], points[2]] }];
  }
  return [
    { kind: "line", pts: [points[0], points[1]] },
    { kind: "quad", pts: [points[1], points[2], points[3]] },
  ];
}

function quadAt(p0: Point, p1: Point, p2: Point, t: number): Point {
  const u = 1 - t;
  return [
    u * u * p0[0] + 2 * u * t * p1[0] + t * t * p2[0],
    u * u * p0[1] + 2 * u * t * p1[1] + t * t * p2[1],
  ];
}

/** Dense polyline of the drawn path, piece endpoints included exactly. */
export function flattenStroke(points: Point[], steps = 32): Point[] {
  const out: Point[] = [];
  for (const piece of strokePieces(points)) {
    const start = out.length > 0 ? 1 : 0;
    if (piece.kind === "line") {
      if (start === 0) {
        out.push(piece.pts[0]);
      }
      out.push(piece.pts[1]);
      continue;
    }
    for (let i = start; i <= steps; i++) {
      out.push(quadAt(piece.pts[0], piece.pts[1], piece.pts[2], i / steps));
    }
  }
  return out;
}

export interface PointRef {
  stroke: number;
  point: number;
}

/**
 * Nearest control point within the hit radius, or null. Equal distances go
 * to the lower stroke index, then the lower point index.
 */
export function hitPoint(
  strokes: StrokeState[],
  x: number,
  y: number,
  radius = HIT_RADIUS,
): PointRef | null {
  let best: PointRef | null = null;
  let bestDist = radius;
  for (let s = 0; s < strokes.length; s++) {
    const pts = strokes[s].points;
    for (let p = 0; p < pts.length; p++) {
      const d = Math.hypot(pts[p][0] - x, pts[p][1] - y);
      if (d < bestDist || (best === null && d <= bestDist)) {
        best = { stroke: s, point: p };
        bestDist = d;
      }
    }
  }
  return best;
}

export function clampToCanvas(x: number, y: number, width: number, height: number): Point {
  return [
    Math.min(Math.max(x, 0), Math.max(width - 1, 0)),
    Math.min(Math.max(y, 0), Math.max(height - 1, 0)),
  ];
}
