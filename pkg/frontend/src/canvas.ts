/**
 * Overlay renderer: sample PNG backdrop with the editable skeleton on top.
 *
 * Colors and marker sizes match the service's own overlay endpoint, so the
 * client-side drawing can be cross-checked against GET .../overlay.png.
 */

import type { StrokeState } from "./api.js";
import type { PointRef } from "./geometry.js";
import { strokePieces, type Point } from "./geometry.js";

export const STROKE_COLOR = "rgb(220, 60, 40)";
export const POINT_COLOR = "rgb(40, 90, 230)";
export const SELECTED_COLOR = "rgb(255, 170, 0)";
export const POINT_RADIUS = 3;

export interface Drawable {
  readonly width: number;
  readonly height: number;
}

interface Context2dLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  drawImage(img: unknown, x: number, y: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  quadraticCurveTo(cx: number, cy: number, x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
}

interface CanvasLike {
  width: number;
  height: number;
  getContext(kind: "2d"): Context2dLike | null;
}

export class OverlayRenderer {
  private readonly canvas: CanvasLike;
  private readonly ctx: Context2dLike;
  private backdrop: (Drawable & object) | null = null;

  constructor(canvas: CanvasLike) {
    this.canvas = canvas;
    const ctx = canvas.getContext("2d");
    if (ctx === null) {
      throw new Error("2d canvas context unavailable");
    }
    this.ctx = ctx;
  }

  /** Size the canvas to the sample image; coordinates stay 1:1 pixels. */
  setBackdrop(image: Drawable & object): void {
    this.backdrop = image;
    this.canvas.width = image.width;
    this.canvas.height = image.height;
  }

  draw(strokes: StrokeState[], selected: PointRef | null): void {
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.backdrop !== null) {
      ctx.drawImage(this.backdrop, 0, 0);
    }
    ctx.lineWidth = 2;
    ctx.strokeStyle = STROKE_COLOR;
    for (const s of strokes) {
      ctx.beginPath();
      for (const piece of strokePieces(s.points as Point[])) {
        ctx.moveTo(piece.pts[0][0], piece.pts[0][1]);
        if (piece.kind === "line") {
          ctx.lineTo(piece.pts[1][0], piece.pts[1][1]);
        } else {
          ctx.quadraticCurveTo(piece.pts[1][0], piece.pts[1][1], piece.pts[2][0], piece.pts[2][1]);
        }
      }
      ctx.stroke();
    }
    for (let s = 0; s < strokes.length; s++) {
      const pts = strokes[s].points;
      for (let p = 0; p < pts.length; p++) {
        const isSel = selected !== null && selected.stroke === s && selected.point === p;
        ctx.fillStyle = isSel ? SELECTED_COLOR : POINT_COLOR;
        ctx.beginPath();
        ctx.arc(pts[p][0], pts[p][1], POINT_RADIUS, 0, Math.PI * 2);
        ctx.fill();
      }
    }
  }
}
