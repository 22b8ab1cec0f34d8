"""Session-based HTTP service for interactive skeleton adjustment.

A session pairs a sample image with a mutable copy of its dataset glyph.
Every mutation is recorded as a replayable edit, so replaying the history
from the dataset glyph always reproduces the working glyph; undo pops the
last edit and replays the rest. Mutations within one session are applied
strictly in arrival order under the session lock.

HTTP surface (JSON bodies):

    POST  /api/sessions {codepoint, sample_png_base64} -> {id}
    GET   /api/sessions/{id} -> {strokes, committed}
    POST  /api/sessions/{id}/auto {mode: "scale"|"rotate"} -> state
    PATCH /api/sessions/{id}/strokes/{k}/points/{i} {x, y, cooperative} -> state
    POST  /api/sessions/{id}/undo -> state
    GET   /api/sessions/{id}/overlay.png -> image/png
    POST  /api/sessions/{id}/commit -> {path}

Errors: 400 invalid body or un-adjustable data, 404 unknown id or index,
409 committed session, 500 internal.
"""

from __future__ import annotations

import base64
import binascii
import io
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from PIL import Image, ImageDraw
from pydantic import BaseModel
from scipy.spatial import cKDTree

from .config import PipelineConfig
from .errors import DataError, GlyphForgeError
from .geometry import cum_lengths, resample_polyline, rotation_about
from .glyphdata import Glyph, parse_glyph_file, serialize_glyph, write_glyph_file
from .imageio import binarize
from .raster import thin

ICP_MAX_ITER = 50
ICP_TOL = 1e-4  # radians
ICP_GATE = 20.0  # px, correspondences farther than this are dropped
MIN_MEDIAL_POINTS = 10
CLOUD_SPACING = 2.0  # px between skeleton points fed to the ICP

STROKE_COLOR = (220, 60, 40)
POINT_COLOR = (40, 90, 230)
POINT_RADIUS = 3


class SessionCommitted(GlyphForgeError):
    """Raised when an edit reaches a session that was already committed."""


# --- edits and sessions -----------------------------------------------------


@dataclass(frozen=True)
class TransformEdit:
    """An affine step (auto scale or auto rotate), stored as its matrix."""

    matrix: tuple[tuple[float, float, float], ...]

    def apply(self, g: Glyph) -> Glyph:
        return g.transformed(np.asarray(self.matrix, dtype=float))


@dataclass(frozen=True)
class MoveEdit:
    stroke: int
    point: int
    x: float
    y: float
    cooperative: bool

    def apply(self, g: Glyph) -> Glyph:
        s = g.strokes[self.stroke]
        pts = list(s.points)
        if self.cooperative and self.point == 0:
            dx = self.x - pts[0][0]
            dy = self.y - pts[0][1]
            pts = [(px + dx, py + dy) for px, py in pts]
        else:
            pts[self.point] = (self.x, self.y)
        out = list(g.strokes)
        out[self.stroke] = s.with_points(pts)
        return g.with_strokes(out)


@dataclass
class AdjustSession:
    """One sample image and the glyph being aligned to it."""

    id: str
    sample: np.ndarray
    base: Glyph
    working: Glyph
    history: list = field(default_factory=list)
    committed: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def replay(self) -> Glyph:
        g = self.base
        for edit in self.history:
            g = edit.apply(g)
        return g


def _push(session: AdjustSession, edit) -> Glyph:
    if session.committed:
        raise SessionCommitted(f"session {session.id} is committed")
    session.history.append(edit)
    session.working = edit.apply(session.working)
    return session.working


# --- operations ---------------------------------------------------------------


def auto_scale(session: AdjustSession) -> Glyph:
    """Uniform scale plus translation taking the skeleton bounding box onto
    the sample-foreground bounding box.

    With unequal aspect ratios the scale is the geometric mean of the two
    side ratios; box centers always coincide exactly.
    """
    fg = binarize(session.sample)
    if not fg.any():
        raise DataError("sample image is blank")
    ys, xs = np.nonzero(fg)
    sw = float(xs.max() - xs.min() + 1)
    sh = float(ys.max() - ys.min() + 1)
    bx, by, bw, bh = session.working.bbox()
    if bw <= 0.0 or bh <= 0.0:
        raise DataError("skeleton bounding box is degenerate")
    s = float(np.sqrt((sw / bw) * (sh / bh)))
    scx = (float(xs.min()) + float(xs.max())) / 2.0
    scy = (float(ys.min()) + float(ys.max())) / 2.0
    m = np.array(
        [
            [s, 0.0, scx - s * (bx + bw / 2.0)],
            [0.0, s, scy - s * (by + bh / 2.0)],
            [0.0, 0.0, 1.0],
        ]
    )
    return _push(session, TransformEdit(tuple(map(tuple, m))))


def medial_points(sample: np.ndarray) -> np.ndarray:
    """Centers of the thinned foreground pixels as an (n, 2) xy array."""
    sk = thin(binarize(sample))
    ys, xs = np.nonzero(sk)
    return np.stack([xs, ys], axis=1).astype(float)


def skeleton_cloud(g: Glyph, spacing: float = CLOUD_SPACING) -> np.ndarray:
    """Points along every stroke path at uniform arc-length density.

    Per-stroke sample counts would overweight short strokes and drag the
    cloud centroid off the ink centroid, which biases the rotation fit.
    """
    pts = []
    for s in g.strokes:
        line = s.polyline()
        n = max(int(np.ceil(cum_lengths(line)[-1] / spacing)) + 1, 2)
        pts.append(resample_polyline(line, n))
    return np.vstack(pts)


def fit_rotation(
    points: np.ndarray,
    targets: np.ndarray,
    *,
    gate: float = ICP_GATE,
    max_iter: int = ICP_MAX_ITER,
    tol: float = ICP_TOL,
) -> float:
    """Rotation aligning points to targets, by ICP about the shared centroid.

    Both clouds are matched relative to their own centroids, nearest
    neighbor with far pairs dropped. Each iteration also fits a scale so
    the matching stays honest when the clouds disagree in extent (the
    skeleton box covers the inked outline, the medial axis retracts from
    it), but only the accumulated rotation is returned.
    """
    src = np.asarray(points, dtype=float)
    tgt = np.asarray(targets, dtype=float)
    src = src - src.mean(axis=0)
    tgt = tgt - tgt.mean(axis=0)
    tree = cKDTree(tgt)
    theta, scale = 0.0, 1.0
    for _ in range(max_iter):
        c, s = np.cos(theta), np.sin(theta)
        cur = scale * (src @ np.array([[c, s], [-s, c]]))
        dist, j = tree.query(cur)
        keep = dist <= gate
        if keep.sum() < 3:
            break
        a = cur[keep]
        b = tgt[j[keep]]
        cross = float(np.sum(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]))
        dot = float(np.sum(a * b))
        dtheta = float(np.arctan2(cross, dot))
        theta += dtheta
        scale *= float(np.hypot(cross, dot) / np.sum(a * a))
        if abs(dtheta) < tol:
            break
    return theta


def auto_rotate(session: AdjustSession) -> Glyph:
    """Rotate the skeleton onto the sample's medial axis.

    The sample is thinned to 1 px medial points, then rotation-only ICP
    aligns the skeleton path cloud to them; the fitted angle is applied
    about the cloud centroid.
    """
    med = medial_points(session.sample)
    if len(med) < MIN_MEDIAL_POINTS:
        raise DataError(f"thinning left only {len(med)} medial points")
    cloud = skeleton_cloud(session.working)
    theta = fit_rotation(cloud, med)
    m = rotation_about(theta, tuple(cloud.mean(axis=0)))
    return _push(session, TransformEdit(tuple(map(tuple, m))))


def move_point(
    session: AdjustSession,
    stroke: int,
    point: int,
    x: float,
    y: float,
    cooperative: bool = False,
) -> Glyph:
    """Set one control point; a cooperative start move drags the whole stroke."""
    if not 0 <= stroke < len(session.working.strokes):
        raise IndexError(f"stroke {stroke} out of range")
    if not 0 <= point < len(session.working.strokes[stroke].points):
        raise IndexError(f"point {point} out of range for stroke {stroke}")
    return _push(session, MoveEdit(stroke, point, float(x), float(y), bool(cooperative)))


def undo(session: AdjustSession) -> Glyph:
    """Drop the last edit and rebuild; without history this is a no-op."""
    if session.committed:
        raise SessionCommitted(f"session {session.id} is committed")
    if session.history:
        session.history.pop()
        session.working = session.replay()
    return session.working


def render_overlay(session: AdjustSession) -> bytes:
    """Sample in gray with stroke paths and control-point markers, as PNG."""
    img = Image.fromarray(session.sample).convert("RGB")
    draw = ImageDraw.Draw(img)
    for s in session.working.strokes:
        draw.line([(float(x), float(y)) for x, y in s.polyline()], fill=STROKE_COLOR, width=2)
    for s in session.working.strokes:
        for px, py in s.points:
            draw.ellipse(
                [px - POINT_RADIUS, py - POINT_RADIUS, px + POINT_RADIUS, py + POINT_RADIUS],
                fill=POINT_COLOR,
            )
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def commit(session: AdjustSession, directory: str | Path) -> Path:
    """Write the working glyph as U+hex.gd and lock the session."""
    if session.committed:
        raise SessionCommitted(f"session {session.id} is already committed")
    path = write_glyph_file(session.working, directory)
    session.committed = True
    return path


# --- HTTP layer ------------------------------------------------------------------


def _parse_codepoint(value) -> int:
    if isinstance(value, int):
        cp = value
    else:
        text = str(value).strip().upper()
        if text.startswith("U+"):
            text = text[2:]
        try:
            cp = int(text, 16)
        except ValueError:
            raise DataError(f"bad codepoint {value!r}, expected U+<hex>") from None
    if not 0 < cp <= 0x10FFFF:
        raise DataError(f"codepoint {value!r} out of range")
    return cp


def _decode_sample(encoded: str) -> np.ndarray:
    try:
        raw = base64.b64decode(encoded, validate=True)
        img = Image.open(io.BytesIO(raw))
        return np.asarray(img.convert("L"), dtype=np.uint8)
    except (binascii.Error, OSError, ValueError) as exc:
        raise DataError(f"sample_png_base64 is not a PNG image: {exc}") from None


def session_state(session: AdjustSession) -> dict:
    return {
        "id": session.id,
        "codepoint": session.working.name,
        "strokes": [
            {
                "line_type": s.line_type,
                "start_shape": s.start_shape,
                "end_shape": s.end_shape,
                "points": [[px, py] for px, py in s.points],
            }
            for s in session.working.strokes
        ],
        "committed": session.committed,
    }


class CreateBody(BaseModel):
    codepoint: str | int
    sample_png_base64: str


class AutoBody(BaseModel):
    mode: Literal["scale", "rotate"]


class MoveBody(BaseModel):
    x: float
    y: float
    cooperative: bool = False


def create_app(cfg: PipelineConfig, *, ui_dir: str | Path | None = None):
    """Adjustment service bound to this config's dataset and adjusted dirs.

    Mounts the browser client at /ui/ when a built frontend is found
    (frontend/dist by default).
    """
    from fastapi import FastAPI, HTTPException
    from fastapi.exceptions import RequestValidationError
    from fastapi.responses import JSONResponse, Response

    app = FastAPI(title="glyphforge adjustment service")
    sessions: dict[str, AdjustSession] = {}
    snapshot_dir = cfg.path("adjusted_dir") / ".sessions"

    @app.exception_handler(RequestValidationError)
    async def _bad_body(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def _get(sid: str) -> AdjustSession:
        session = sessions.get(sid)
        if session is None:
            raise HTTPException(404, f"unknown session {sid}")
        return session

    def _snapshot(session: AdjustSession) -> None:
        # Cheap crash insurance: the latest working glyph always sits on
        # disk; an operator can rename it into the adjusted directory.
        snapshot_dir.mkdir(parents=True, exist_ok=True)
        path = snapshot_dir / f"{session.id}_{session.working.name}.gd"
        path.write_text(serialize_glyph(session.working), encoding="utf-8")

    def _mutate(sid: str, op) -> dict:
        session = _get(sid)
        with session.lock:
            if session.committed:
                raise HTTPException(409, f"session {sid} is committed")
            try:
                op(session)
            except DataError as exc:
                raise HTTPException(400, str(exc)) from None
            except IndexError as exc:
                raise HTTPException(404, str(exc)) from None
            _snapshot(session)
        return session_state(session)

    @app.post("/api/sessions")
    def create_session(body: CreateBody):
        try:
            cp = _parse_codepoint(body.codepoint)
            sample = _decode_sample(body.sample_png_base64)
            if not binarize(sample).any():
                raise DataError("sample image is blank")
        except DataError as exc:
            raise HTTPException(400, str(exc)) from None
        dataset_path = cfg.path("dataset_dir") / f"U+{cp:04X}.gd"
        if not dataset_path.is_file():
            raise HTTPException(404, f"no dataset glyph for U+{cp:04X}")
        glyph = parse_glyph_file(dataset_path, sample_count=cfg.n_samples_per_skeleton)
        if not glyph.strokes:
            raise HTTPException(400, f"dataset glyph U+{cp:04X} has no strokes")
        sid = uuid.uuid4().hex
        sessions[sid] = AdjustSession(sid, sample, glyph, glyph)
        return {"id": sid}

    @app.get("/api/sessions/{sid}")
    def get_state(sid: str):
        return session_state(_get(sid))

    @app.post("/api/sessions/{sid}/auto")
    def run_auto(sid: str, body: AutoBody):
        op = auto_scale if body.mode == "scale" else auto_rotate
        return _mutate(sid, op)

    @app.patch("/api/sessions/{sid}/strokes/{stroke}/points/{point}")
    def patch_point(sid: str, stroke: int, point: int, body: MoveBody):
        return _mutate(
            sid,
            lambda s: move_point(s, stroke, point, body.x, body.y, body.cooperative),
        )

    @app.post("/api/sessions/{sid}/undo")
    def undo_edit(sid: str):
        return _mutate(sid, undo)

    @app.get("/api/sessions/{sid}/overlay.png")
    def overlay(sid: str):
        session = _get(sid)
        with session.lock:
            data = render_overlay(session)
        return Response(content=data, media_type="image/png")

    @app.post("/api/sessions/{sid}/commit")
    def commit_session(sid: str):
        session = _get(sid)
        with session.lock:
            if session.committed:
                raise HTTPException(409, f"session {sid} is already committed")
            path = commit(session, cfg.path("adjusted_dir"))
            stale = snapshot_dir / f"{session.id}_{session.working.name}.gd"
            stale.unlink(missing_ok=True)
        return {"path": str(path)}

    if ui_dir is not None:
        ui = Path(ui_dir)
    else:
        # cwd-relative first, then the checkout the package was installed from
        ui = Path("frontend") / "dist"
        if not ui.is_dir():
            ui = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui), html=True), name="ui")
    return app
