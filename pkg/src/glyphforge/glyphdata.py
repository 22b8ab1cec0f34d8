"""Skeleton glyph model, text format, resampling, and rasterization.

A glyph is an ordered list of strokes. Each stroke is a skeleton: a few
control points plus three attribute codes (line type, start shape, end
shape). Strokes are drawn on a 200x200 design grid with the origin at the
top left; y grows downward.

Line types with a fixed drawing rule:
  1 straight   2 control points, one segment
  2 curve      3 control points, one quadratic Bezier
  3 vertical   4 control points, a segment followed by a quadratic Bezier
Types 4..6 are kept as raw codes and drawn by the rule matching their
point count. Start shape codes run 0..6 and end shape codes 0..14; they
are stored and compared but add no geometry when rendering.

Glyph files (one glyph per file, named U+<hex>.gd) hold one stroke per
line:

    STROKE <line_type> <start_shape> <end_shape> <x1> <y1> ... <xk> <yk>

Blank lines and lines starting with '#' are ignored. Coordinates are
decimals; dataset files use the design grid, adjusted files reuse the same
format in canvas pixel coordinates.

Each skeleton also carries a fixed-size sample matrix: a 3 x n homogeneous
matrix of points spaced uniformly by arc length along the drawn path
(piece boundaries of multi-piece paths are always sampled). Rasterization
paints every pixel whose center lies within a thickness radius of the
drawn path.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import geometry
from .errors import ParseError

GRID_SIZE = 200.0
DEFAULT_SAMPLE_COUNT = 32

LINE_STRAIGHT = 1
LINE_CURVE = 2
LINE_VERTICAL = 3

_POINT_COUNTS = {LINE_STRAIGHT: 2, LINE_CURVE: 3, LINE_VERTICAL: 4}
_CODEPOINT_RE = re.compile(r"^[Uu]\+([0-9A-Fa-f]{4,6})$")


@dataclass(frozen=True)
class Skeleton:
    """One stroke: attribute codes, control points, and cached samples."""

    line_type: int
    start_shape: int
    end_shape: int
    points: tuple[tuple[float, float], ...]
    sample_count: int = DEFAULT_SAMPLE_COUNT
    samples: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 1 <= self.line_type <= 6:
            raise ValueError(f"line type {self.line_type} out of range 1..6")
        if not 0 <= self.start_shape <= 6:
            raise ValueError(f"start shape {self.start_shape} out of range 0..6")
        if not 0 <= self.end_shape <= 14:
            raise ValueError(f"end shape {self.end_shape} out of range 0..14")
        k = len(self.points)
        want = _POINT_COUNTS.get(self.line_type)
        if want is not None and k != want:
            raise ValueError(f"point count {k} invalid for line type {self.line_type}")
        if want is None and not 2 <= k <= 4:
            raise ValueError(f"point count {k} invalid for line type {self.line_type}")
        if self.sample_count < 2:
            raise ValueError("sample count must be at least 2")
        pts = tuple((float(x), float(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "samples", _resample_pieces(self.pieces(), self.sample_count))
        self.samples.setflags(write=False)

    def pieces(self) -> list[np.ndarray]:
        """Drawn path as one or two dense polylines, in drawing order."""
        p = np.asarray(self.points, dtype=float)
        if len(p) == 2:
            return [p]
        ts = np.linspace(0.0, 1.0, geometry.FLATTEN_STEPS + 1)
        if len(p) == 3:
            return [geometry.quad_bezier(p[0], p[1], p[2], ts)]
        return [p[:2], geometry.quad_bezier(p[1], p[2], p[3], ts)]

    def polyline(self) -> np.ndarray:
        """Drawn path as a single dense polyline."""
        pieces = self.pieces()
        if len(pieces) == 1:
            return pieces[0]
        return np.vstack([pieces[0], pieces[1][1:]])

    @property
    def sample_xy(self) -> np.ndarray:
        """Sample points as an (n, 2) array."""
        return self.samples[:2].T

    def attributes(self) -> tuple[int, int, int]:
        return (self.line_type, self.start_shape, self.end_shape)

    def with_points(self, points: Sequence[tuple[float, float]]) -> "Skeleton":
        return replace(self, points=tuple((float(x), float(y)) for x, y in points))


def _resample_pieces(pieces: list[np.ndarray], n: int) -> np.ndarray:
    """3 x n homogeneous samples, uniform by arc length within each piece.

    Piece boundaries are forced onto the sample grid so junctions of
    multi-piece strokes are always represented. Intervals are allocated
    per piece proportionally to length.
    """
    lengths = [float(geometry.cum_lengths(p)[-1]) for p in pieces]
    total = sum(lengths)
    if total <= 0.0 or len(pieces) == 1 or n - 1 < len(pieces):
        flat = pieces[0] if len(pieces) == 1 else np.vstack([pieces[0], pieces[1][1:]])
        xy = geometry.resample_polyline(flat, n)
        return _homogeneous(xy)
    intervals = [max(1, int(round((n - 1) * ln / total))) for ln in lengths]
    # Largest-share rounding can drift; push the difference onto the longest piece.
    drift = (n - 1) - sum(intervals)
    intervals[int(np.argmax(lengths))] += drift
    if min(intervals) < 1:
        intervals = [1, n - 2] if lengths[0] <= lengths[1] else [n - 2, 1]
    parts = []
    for i, piece in enumerate(pieces):
        pts = geometry.resample_polyline(piece, intervals[i] + 1)
        parts.append(pts if i == 0 else pts[1:])
    return _homogeneous(np.vstack(parts))


def _homogeneous(xy: np.ndarray) -> np.ndarray:
    return np.vstack([xy.T, np.ones(len(xy))])


@dataclass(frozen=True)
class Glyph:
    """An ordered stroke list with optional relation and group annotations."""

    codepoint: int
    strokes: tuple[Skeleton, ...]
    relations: tuple[tuple[object, ...], ...] | None = field(default=None, compare=False)
    groups: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False)

    @property
    def name(self) -> str:
        return f"U+{self.codepoint:04X}"

    def with_relations(self, relations) -> "Glyph":
        return replace(self, relations=relations)

    def with_groups(self, groups) -> "Glyph":
        return replace(self, groups=groups)

    def with_strokes(self, strokes: Iterable[Skeleton]) -> "Glyph":
        # Annotations describe the old geometry; drop them.
        return Glyph(self.codepoint, tuple(strokes))

    def all_samples(self) -> np.ndarray:
        """Sample points of every stroke stacked into one (total, 2) array."""
        if not self.strokes:
            return np.zeros((0, 2))
        return np.vstack([s.sample_xy for s in self.strokes])

    def bbox(self) -> tuple[float, float, float, float]:
        """(min_x, min_y, width, height) over all sample points."""
        pts = self.all_samples()
        if len(pts) == 0:
            return (0.0, 0.0, 0.0, 0.0)
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        return (float(lo[0]), float(lo[1]), float(hi[0] - lo[0]), float(hi[1] - lo[1]))

    def centroid(self) -> tuple[float, float]:
        pts = self.all_samples()
        if len(pts) == 0:
            return (0.0, 0.0)
        c = pts.mean(axis=0)
        return (float(c[0]), float(c[1]))

    def transformed(self, matrix: np.ndarray) -> "Glyph":
        """Apply a homogeneous transform to every control point."""
        m = np.asarray(matrix, dtype=float)
        out = []
        for s in self.strokes:
            pts = np.asarray(s.points, dtype=float)
            hom = np.vstack([pts.T, np.ones(len(pts))])
            moved = (m @ hom)[:2].T
            out.append(s.with_points([tuple(p) for p in moved]))
        return self.with_strokes(out)


@dataclass(frozen=True)
class RasterGlyph:
    """A rendered glyph: uint8 pixels (0 background, 255 stroke) and its thickness."""

    pixels: np.ndarray
    thickness: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape


# --- text format ---------------------------------------------------------


def parse_stroke_fields(
    tokens: Sequence[str], *, sample_count: int = DEFAULT_SAMPLE_COUNT
) -> Skeleton:
    """Skeleton from whitespace-split stroke fields: lt ss es x y [x y ...]."""
    if len(tokens) < 3:
        raise ValueError("missing attribute codes")
    try:
        lt, ss, es = int(tokens[0]), int(tokens[1]), int(tokens[2])
        coords = [float(t) for t in tokens[3:]]
    except ValueError as exc:
        raise ValueError(f"bad token: {exc}") from exc
    if len(coords) % 2 != 0 or len(coords) == 0:
        raise ValueError(f"expected coordinate pairs, got {len(coords)} values")
    pts = [(coords[i], coords[i + 1]) for i in range(0, len(coords), 2)]
    return Skeleton(lt, ss, es, tuple(pts), sample_count=sample_count)


def parse_glyph_text(
    text: str,
    *,
    codepoint: int = 0,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    source: str | None = None,
) -> Glyph:
    strokes: list[Skeleton] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] != "STROKE":
            raise ParseError(f"expected STROKE, got {tokens[0]!r}", path=source, line=lineno)
        try:
            strokes.append(parse_stroke_fields(tokens[1:], sample_count=sample_count))
        except ValueError as exc:
            raise ParseError(str(exc), path=source, line=lineno) from exc
    return Glyph(codepoint, tuple(strokes))


def parse_glyph_file(path: str | Path, *, sample_count: int = DEFAULT_SAMPLE_COUNT) -> Glyph:
    path = Path(path)
    m = _CODEPOINT_RE.match(path.stem)
    cp = int(m.group(1), 16) if m else 0
    return parse_glyph_text(
        path.read_text(encoding="utf-8"),
        codepoint=cp,
        sample_count=sample_count,
        source=str(path),
    )


def _fmt(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def serialize_stroke(s: Skeleton) -> str:
    """Space-separated stroke fields in glyph file order: lt ss es x y ..."""
    coords = " ".join(_fmt(c) for pt in s.points for c in pt)
    return f"{s.line_type} {s.start_shape} {s.end_shape} {coords}"


def serialize_glyph(g: Glyph) -> str:
    return "".join(f"STROKE {serialize_stroke(s)}\n" for s in g.strokes)


def write_glyph_file(g: Glyph, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{g.name}.gd"
    path.write_text(serialize_glyph(g), encoding="utf-8")
    return path


# --- rasterization -------------------------------------------------------


def grid_to_canvas(width: int, height: int) -> np.ndarray:
    """Uniform scale plus centering taking the design grid into a canvas."""
    s = min(width, height) / GRID_SIZE
    ox = (width - GRID_SIZE * s) / 2.0
    oy = (height - GRID_SIZE * s) / 2.0
    return geometry.make_affine(np.diag([s, s]), (ox, oy))


def distance_field_sq(strokes: Sequence[Skeleton], width: int, height: int) -> np.ndarray:
    """Per-pixel squared distance to the nearest drawn-path segment."""
    ys, xs = np.mgrid[0:height, 0:width]
    pts = np.stack([xs, ys], axis=-1).astype(float)
    best = np.full((height, width), np.inf)
    for s in strokes:
        poly = s.polyline()
        np.minimum(best, geometry.polyline_min_dist_sq(poly, pts), out=best)
    return best


def rasterize_glyph(g: Glyph, thickness: float, width: int, height: int) -> RasterGlyph:
    """Union of drawn paths dilated by a disk of the given radius.

    Skeleton coordinates are treated as canvas pixel coordinates; dataset
    glyphs must be mapped first (see grid_to_canvas). Raises if any path
    point falls outside the canvas.
    """
    if thickness <= 0:
        raise ValueError("thickness must be positive")
    for idx, s in enumerate(g.strokes):
        poly = s.polyline()
        if (
            poly[:, 0].min() < -0.5
            or poly[:, 0].max() > width - 0.5
            or poly[:, 1].min() < -0.5
            or poly[:, 1].max() > height - 0.5
        ):
            raise ValueError(
                f"canvas {width}x{height} too small for stroke {idx} of {g.name}"
            )
    if not g.strokes:
        return RasterGlyph(np.zeros((height, width), dtype=np.uint8), float(thickness))
    field = distance_field_sq(g.strokes, width, height)
    mask = field <= float(thickness) ** 2
    return RasterGlyph(np.where(mask, 255, 0).astype(np.uint8), float(thickness))


def stamp_paths(strokes: Sequence[Skeleton], width: int, height: int) -> np.ndarray:
    """Thin (1 px) rendering of drawn paths; used as the skeleton energy layer."""
    img = np.zeros((height, width), dtype=np.uint8)
    for s in strokes:
        poly = s.polyline()
        segs = np.diff(poly, axis=0)
        lens = np.linalg.norm(segs, axis=1)
        for k in range(len(segs)):
            steps = max(2, int(np.ceil(lens[k] / 0.5)) + 1)
            ts = np.linspace(0.0, 1.0, steps)
            pts = poly[k] + ts[:, None] * segs[k]
            xi = np.clip(np.rint(pts[:, 0]).astype(int), 0, width - 1)
            yi = np.clip(np.rint(pts[:, 1]).astype(int), 0, height - 1)
            img[yi, xi] = 255
    return img
