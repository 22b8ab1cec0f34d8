/**
 * Typed client for the adjustment service HTTP API.
 *
 * Every mutating call is pushed through a single FIFO promise chain, so
 * requests to one session reach the server strictly in issue order even
 * when callers do not await each other.
 */

export interface StrokeState {
  line_type: number;
  start_shape: number;
  end_shape: number;
  points: [number, number][];
}

export interface SessionState {
  id: string;
  codepoint: string;
  strokes: StrokeState[];
  committed: boolean;
}

export type AutoMode = "scale" | "rotate";

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class AdjustClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  private queue: Promise<unknown> = Promise.resolve();

  constructor(baseUrl = "", fetchFn: FetchLike = (u, i) => fetch(u, i)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  /** Chain a request onto the FIFO queue; failures do not poison the chain. */
  private enqueue<T>(run: () => Promise<T>): Promise<T> {
    const next = this.queue.then(run, run);
    this.queue = next.catch(() => undefined);
    return next;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const data = (await res.json()) as { detail?: unknown };
        if (data && data.detail !== undefined) {
          detail = typeof data.detail === "string" ? data.detail : JSON.stringify(data.detail);
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  createSession(codepoint: string, samplePngBase64: string): Promise<string> {
    return this.enqueue(async () => {
      const data = await this.request<{ id: string }>("POST", "/api/sessions", {
        codepoint,
        sample_png_base64: samplePngBase64,
      });
      return data.id;
    });
  }

  getState(id: string): Promise<SessionState> {
    return this.request<SessionState>("GET", `/api/sessions/${id}`);
  }

  runAuto(id: string, mode: AutoMode): Promise<SessionState> {
    return this.enqueue(() =>
      this.request<SessionState>("POST", `/api/sessions/${id}/auto`, { mode }),
    );
  }

  movePoint(
    id: string,
    stroke: number,
    point: number,
    x: number,
    y: number,
    cooperative: boolean,
  ): Promise<SessionState> {
    return this.enqueue(() =>
      this.request<SessionState>("PATCH", `/api/sessions/${id}/strokes/${stroke}/points/${point}`, {
        x,
        y,
        cooperative,
      }),
    );
  }

  undo(id: string): Promise<SessionState> {
    return this.enqueue(() => this.request<SessionState>("POST", `/api/sessions/${id}/undo`));
  }

  commit(id: string): Promise<string> {
    return this.enqueue(async () => {
      const data = await this.request<{ path: string }>("POST", `/api/sessions/${id}/commit`);
      return data.path;
    });
  }

  overlayUrl(id: string): string {
    return `${this.baseUrl}/api/sessions/${id}/overlay.png`;
  }
}
