/**
 * Session state store.
 *
 * The rendered skeleton always equals the last server-acknowledged strokes
 * plus at most one optimistic edit (the point currently being dragged).
 * Server responses replace the acknowledged state; a rejected edit reverts
 * the overlay to it.
 */

import type { SessionState, StrokeState } from "./api.js";
import type { PointRef } from "./geometry.js";

export type SyncStatus = "idle" | "syncing" | "error";

export interface OptimisticEdit {
  stroke: number;
  point: number;
  x: number;
  y: number;
  cooperative: boolean;
}

export interface UiSessionState {
  id: string;
  codepoint: string;
  acked: StrokeState[];
  committed: boolean;
  selected: PointRef | null;
  dirty: boolean;
  status: SyncStatus;
  message: string | null;
  edit: OptimisticEdit | null;
}

export type Listener = (state: UiSessionState) => void;

function cloneStroke(s: StrokeState): StrokeState {
  return { ...s, points: s.points.map((p) => [p[0], p[1]] as [number, number]) };
}

export class SessionStore {
  private state: UiSessionState | null = null;
  private listeners: Listener[] = [];

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((f) => f !== fn);
    };
  }

  private emit(): void {
    if (this.state !== null) {
      for (const fn of this.listeners) {
        fn(this.state);
      }
    }
  }

  get current(): UiSessionState {
    if (this.state === null) {
      throw new Error("no session loaded");
    }
    return this.state;
  }

  get loaded(): boolean {
    return this.state !== null;
  }

  load(server: SessionState): void {
    this.state = {
      id: server.id,
      codepoint: server.codepoint,
      acked: server.strokes.map(cloneStroke),
      committed: server.committed,
      selected: null,
      dirty: false,
      status: "idle",
      message: null,
      edit: null,
    };
    this.emit();
  }

  /** Replace the acknowledged state with a server response. */
  applyServer(server: SessionState): void {
    const s = this.current;
    s.acked = server.strokes.map(cloneStroke);
    s.committed = server.committed;
    s.status = "idle";
    this.emit();
  }

  select(ref: PointRef | null): void {
    this.current.selected = ref;
    this.emit();
  }

  beginEdit(ref: PointRef, x: number, y: number, cooperative: boolean): void {
    const s = this.current;
    if (s.committed) {
      throw new Error("session is committed");
    }
    s.edit = { stroke: ref.stroke, point: ref.point, x, y, cooperative };
    this.emit();
  }

  updateEdit(x: number, y: number): void {
    const s = this.current;
    if (s.edit === null) {
      throw new Error("no edit in progress");
    }
    s.edit = { ...s.edit, x, y };
    this.emit();
  }

  /** Drop the optimistic edit; the overlay falls back to acked state. */
  clearEdit(): void {
    const s = this.current;
    s.edit = null;
    this.emit();
  }

  revertEdit(message: string): void {
    const s = this.current;
    s.edit = null;
    s.status = "error";
    s.message = message;
    this.emit();
  }

  markDirty(): void {
    this.current.dirty = true;
    this.emit();
  }

  setStatus(status: SyncStatus): void {
    this.current.status = status;
    this.emit();
  }

  setMessage(message: string | null): void {
    this.current.message = message;
    this.emit();
  }

  lockCommitted(): void {
    const s = this.current;
    s.committed = true;
    s.edit = null;
    s.selected = null;
    this.emit();
  }

  /** Acknowledged strokes with the optimistic edit applied, if any. */
  renderedStrokes(): StrokeState[] {
    const s = this.current;
    const strokes = s.acked.map(cloneStroke);
    const e = s.edit;
    if (e === null) {
      return strokes;
    }
    const pts = strokes[e.stroke].points;
    if (e.cooperative && e.point === 0) {
      const dx = e.x - s.acked[e.stroke].points[0][0];
      const dy = e.y - s.acked[e.stroke].points[0][1];
      for (const p of pts) {
        p[0] += dx;
        p[1] += dy;
      }
    } else {
      pts[e.point] = [e.x, e.y];
    }
    return strokes;
  }
}
