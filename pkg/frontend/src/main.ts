/**
 * Adjustment UI controller and browser bootstrap.
 *
 * AdjustApp is platform-free: pointer handlers take canvas coordinates and
 * the toolbar is described by small structural interfaces, so the whole
 * flow runs headless in tests. The bootstrap at the bottom wires real DOM
 * events to it when the page is served at /ui/.
 */

import { AdjustClient, ApiError, type AutoMode, type SessionState } from "./api.js";
import { OverlayRenderer, type Drawable } from "./canvas.js";
import { clampToCanvas, hitPoint } from "./geometry.js";
import { SessionStore } from "./state.js";

/* 20 requests per second during a drag */
export const MIN_SEND_INTERVAL_MS = 50;

export interface ButtonLike {
  disabled: boolean;
}

export interface ToggleLike {
  checked: boolean;
}

export interface TextLike {
  textContent: string | null;
}

export interface AppElements {
  canvas: {
    width: number;
    height: number;
    getContext(kind: "2d"): unknown;
  };
  scaleBtn: ButtonLike;
  rotateBtn: ButtonLike;
  undoBtn: ButtonLike;
  commitBtn: ButtonLike;
  cooperative: ToggleLike;
  status: TextLike;
}

export interface AppOptions {
  confirmFn?: (message: string) => boolean;
  now?: () => number;
  minSendIntervalMs?: number;
}

export class AdjustApp {
  readonly store = new SessionStore();
  private readonly client: AdjustClient;
  private readonly els: AppElements;
  private readonly renderer: OverlayRenderer;
  private readonly confirmFn: (message: string) => boolean;
  private readonly now: () => number;
  private readonly minSendInterval: number;

  private dragging = false;
  private patchInFlight = false;
  private lastSendAt = -Infinity;
  private busy = 0;
  private pending = new Set<Promise<unknown>>();
  /* server edits per completed user action; a drag's throttled PATCHes
     count as one gesture so the undo button reverts them together */
  private gestureLog: number[] = [];
  private activeGestureEdits = 0;

  constructor(client: AdjustClient, els: AppElements, opts: AppOptions = {}) {
    this.client = client;
    this.els = els;
    this.renderer = new OverlayRenderer(els.canvas as never);
    this.confirmFn = opts.confirmFn ?? ((m) => (typeof confirm === "function" ? confirm(m) : true));
    this.now = opts.now ?? (() => Date.now());
    this.minSendInterval = opts.minSendIntervalMs ?? MIN_SEND_INTERVAL_MS;
    this.store.subscribe(() => this.render());
    this.updateControls();
  }

  /** Resolve once every request issued so far has settled. */
  async settle(): Promise<void> {
    while (this.pending.size > 0) {
      await Promise.allSettled([...this.pending]);
    }
  }

  private track<T>(p: Promise<T>): Promise<T> {
    this.pending.add(p);
    const drop = () => this.pending.delete(p);
    p.then(drop, drop);
    return p;
  }

  private render(): void {
    if (this.store.loaded) {
      this.renderer.draw(this.store.renderedStrokes(), this.store.current.selected);
    }
    this.updateControls();
  }

  private updateControls(): void {
    const loaded = this.store.loaded;
    const locked = !loaded || this.store.current.committed || this.busy > 0;
    this.els.scaleBtn.disabled = locked;
    this.els.rotateBtn.disabled = locked;
    this.els.undoBtn.disabled = locked;
    this.els.commitBtn.disabled = locked;
    if (loaded) {
      const s = this.store.current;
      const note = s.message ?? (s.status === "syncing" ? "working..." : "");
      this.els.status.textContent = s.committed && s.message === null ? "committed" : note;
    } else {
      this.els.status.textContent = "no session";
    }
  }

  async loadSession(codepoint: string, samplePngBase64: string, backdrop?: Drawable & object): Promise<void> {
    const id = await this.track(this.client.createSession(codepoint, samplePngBase64));
    const state = await this.track(this.client.getState(id));
    if (backdrop !== undefined) {
      this.renderer.setBackdrop(backdrop);
    } else {
      this.els.canvas.width = Math.max(this.els.canvas.width, 400);
      this.els.canvas.height = Math.max(this.els.canvas.height, 400);
    }
    this.gestureLog = [];
    this.activeGestureEdits = 0;
    this.store.load(state);
  }

  /** Buttons stay disabled while a request is in flight. */
  async runAuto(mode: AutoMode): Promise<void> {
    if (!this.store.loaded || this.store.current.committed || this.busy > 0) {
      return;
    }
    this.busy += 1;
    this.store.setMessage(null);
    this.store.setStatus("syncing");
    try {
      const state = await this.track(this.client.runAuto(this.store.current.id, mode));
      this.store.applyServer(state);
      this.store.markDirty();
      this.gestureLog.push(1);
    } catch (err) {
      this.fail(err, `auto ${mode} failed`);
    } finally {
      this.busy -= 1;
      this.updateControls();
    }
  }

  /** Revert the whole most recent user action, however many edits it sent. */
  async undo(): Promise<void> {
    if (!this.store.loaded || this.store.current.committed || this.busy > 0) {
      return;
    }
    this.busy += 1;
    this.store.setMessage(null);
    this.store.setStatus("syncing");
    const count = this.gestureLog.pop() ?? 1;
    try {
      let state = null;
      for (let i = 0; i < count; i++) {
        state = await this.track(this.client.undo(this.store.current.id));
      }
      if (state !== null) {
        this.store.applyServer(state);
      }
    } catch (err) {
      this.fail(err, "undo failed");
    } finally {
      this.busy -= 1;
      this.updateControls();
    }
  }

  /** Confirmation first; on success the session locks for good. */
  async commitFlow(): Promise<string | null> {
    if (!this.store.loaded || this.store.current.committed || this.busy > 0) {
      return null;
    }
    const name = this.store.current.codepoint;
    if (!this.confirmFn(`Commit the adjusted skeleton for ${name}?`)) {
      return null;
    }
    this.busy += 1;
    this.store.setStatus("syncing");
    try {
      const path = await this.track(this.client.commit(this.store.current.id));
      this.store.lockCommitted();
      this.store.setStatus("idle");
      this.store.setMessage(`committed to ${path}`);
      return path;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.store.lockCommitted();
        this.store.setMessage("already committed");
      } else {
        this.fail(err, "commit failed");
      }
      return null;
    } finally {
      this.busy -= 1;
      this.updateControls();
    }
  }

  pointerDown(x: number, y: number): void {
    if (!this.store.loaded || this.store.current.committed) {
      return;
    }
    const hit = hitPoint(this.store.current.acked, x, y);
    this.store.select(hit);
    if (hit === null) {
      return;
    }
    const start = this.store.current.acked[hit.stroke].points[hit.point];
    this.store.beginEdit(hit, start[0], start[1], this.els.cooperative.checked);
    this.dragging = true;
    this.lastSendAt = -Infinity;
  }

  pointerMove(x: number, y: number): void {
    if (!this.dragging || !this.store.loaded) {
      return;
    }
    const [cx, cy] = clampToCanvas(x, y, this.els.canvas.width, this.els.canvas.height);
    this.store.updateEdit(cx, cy);
    if (!this.patchInFlight && this.now() - this.lastSendAt >= this.minSendInterval) {
      this.sendEdit(false);
    }
  }

  pointerUp(x: number, y: number): Promise<void> {
    if (!this.dragging || !this.store.loaded) {
      return Promise.resolve();
    }
    this.dragging = false;
    const [cx, cy] = clampToCanvas(x, y, this.els.canvas.width, this.els.canvas.height);
    this.store.updateEdit(cx, cy);
    return this.sendEdit(true);
  }

  private sendEdit(final: boolean): Promise<void> {
    const s = this.store.current;
    const e = s.edit;
    if (e === null) {
      return Promise.resolve();
    }
    this.patchInFlight = true;
    this.lastSendAt = this.now();
    const done = this.track(
      this.client.movePoint(s.id, e.stroke, e.point, e.x, e.y, e.cooperative),
    )
      .then((state) => {
        this.patchInFlight = false;
        this.activeGestureEdits += 1;
        this.store.applyServer(state);
        this.store.markDirty();
        /* only the release PATCH ends the gesture: a throttled response
           landing after pointer-up must not split the drag in two */
        if (final) {
          this.store.clearEdit();
          this.endGesture();
        }
      })
      .catch((err) => {
        this.patchInFlight = false;
        this.dragging = false;
        this.endGesture();
        if (err instanceof ApiError && err.status === 409) {
          this.store.lockCommitted();
          this.store.setMessage("already committed");
        } else {
          this.store.revertEdit(err instanceof Error ? err.message : String(err));
        }
      });
    return done;
  }

  private endGesture(): void {
    if (this.activeGestureEdits > 0) {
      this.gestureLog.push(this.activeGestureEdits);
      this.activeGestureEdits = 0;
    }
  }

  private fail(err: unknown, fallback: string): void {
    const detail = err instanceof Error && err.message ? err.message : fallback;
    this.store.setStatus("error");
    this.store.setMessage(detail);
  }
}

/* --- browser bootstrap --------------------------------------------------- */

async function fileToBase64(file: File): Promise<string> {
  const bytes = new Uint8Array(await file.arrayBuffer());
  let binary = "";
  const chunk = 0x8000;
  for (let i = 0; i < bytes.length; i += chunk) {
    binary += String.fromCharCode(...bytes.subarray(i, i + chunk));
  }
  return btoa(binary);
}

function bootstrap(doc: Document): void {
  const get = <T>(id: string): T => {
    const el = doc.getElementById(id);
    if (el === null) {
      throw new Error(`missing element #${id}`);
    }
    return el as unknown as T;
  };
  const canvas = get<HTMLCanvasElement>("overlay");
  const app = new AdjustApp(new AdjustClient(""), {
    canvas,
    scaleBtn: get<HTMLButtonElement>("auto-scale"),
    rotateBtn: get<HTMLButtonElement>("auto-rotate"),
    undoBtn: get<HTMLButtonElement>("undo"),
    commitBtn: get<HTMLButtonElement>("commit"),
    cooperative: get<HTMLInputElement>("cooperative"),
    status: get<HTMLElement>("status"),
  });

  const toCanvas = (ev: PointerEvent): [number, number] => {
    const rect = canvas.getBoundingClientRect();
    const sx = rect.width > 0 ? canvas.width / rect.width : 1;
    const sy = rect.height > 0 ? canvas.height / rect.height : 1;
    return [(ev.clientX - rect.left) * sx, (ev.clientY - rect.top) * sy];
  };
  canvas.addEventListener("pointerdown", (ev) => {
    canvas.setPointerCapture(ev.pointerId);
    app.pointerDown(...toCanvas(ev));
  });
  canvas.addEventListener("pointermove", (ev) => app.pointerMove(...toCanvas(ev)));
  canvas.addEventListener("pointerup", (ev) => {
    void app.pointerUp(...toCanvas(ev));
  });

  get<HTMLButtonElement>("auto-scale").addEventListener("click", () => void app.runAuto("scale"));
  get<HTMLButtonElement>("auto-rotate").addEventListener("click", () => void app.runAuto("rotate"));
  get<HTMLButtonElement>("undo").addEventListener("click", () => void app.undo());
  get<HTMLButtonElement>("commit").addEventListener("click", () => void app.commitFlow());

  const fileInput = get<HTMLInputElement>("sample");
  const cpInput = get<HTMLInputElement>("codepoint");
  get<HTMLButtonElement>("load").addEventListener("click", () => {
    void (async () => {
      const file = fileInput.files?.[0];
      if (file === undefined || cpInput.value.trim() === "") {
        get<HTMLElement>("status").textContent = "pick a codepoint and a sample PNG first";
        return;
      }
      const image = new Image();
      image.src = URL.createObjectURL(file);
      await image.decode();
      await app.loadSession(cpInput.value.trim(), await fileToBase64(file), image);
    })();
  });
}

declare global {
  interface Window {
    __gfNoBootstrap?: boolean;
  }
}

if (
  typeof document !== "undefined" &&
  typeof window !== "undefined" &&
  window.__gfNoBootstrap !== true &&
  document.getElementById("gf-app") !== null
) {
  bootstrap(document);
}

export type { SessionState };
