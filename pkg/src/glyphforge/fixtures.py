"""Deterministic fixture corpus: dataset glyphs plus two synthetic fonts.

The corpus ships 60 private-use glyphs on the 200x200 design grid, split
into four bands:

  U+E000..U+E00E  15 sample chars (the style-estimation set)
  U+E010..U+E02D  30 held-out target chars
  U+E030..U+E039  10 thickness round-trip shapes
  U+E03A..U+E03E   5 extraction shapes (isolated bars and crossings)

Style estimation averages per-glyph affine fits, and those fits differ by
a translation proportional to each glyph's centroid offset. Every corpus
glyph is therefore translated so its sample centroid sits exactly at the
grid center; the catalog shapes are drawn quasi-balanced so the shift
stays small and bounds survive rendering margins.

Two rendered fonts derive from the same dataset and are pure functions of
it, so nothing here depends on third-party font files:

  slant   solid strokes, sheared about the canvas center
  ribbon  hollow double-line strokes traced at a fixed offset
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import raster
from .glyphdata import (
    GRID_SIZE,
    LINE_CURVE,
    LINE_STRAIGHT,
    LINE_VERTICAL,
    Glyph,
    Skeleton,
    distance_field_sq,
    grid_to_canvas,
    rasterize_glyph,
    write_glyph_file,
)

GRID_CENTER = GRID_SIZE / 2.0
CANVAS_SIZE = 250

SAMPLE_CODEPOINTS = tuple(range(0xE000, 0xE00F))
HELD_OUT_CODEPOINTS = tuple(range(0xE010, 0xE02E))
THICKNESS_CODEPOINTS = tuple(range(0xE030, 0xE03A))
EXTRACTION_CODEPOINTS = tuple(range(0xE03A, 0xE03F))
ALL_CODEPOINTS = (
    SAMPLE_CODEPOINTS + HELD_OUT_CODEPOINTS + THICKNESS_CODEPOINTS + EXTRACTION_CODEPOINTS
)


def _s(p0, p1):
    return (LINE_STRAIGHT, (p0, p1))


def _q(p0, p1, p2):
    return (LINE_CURVE, (p0, p1, p2))


def _v(p0, p1, p2, p3):
    return (LINE_VERTICAL, (p0, p1, p2, p3))


# Stroke midpoints are balanced around (100, 100) by hand; exact centering
# happens in _build.

_SAMPLE_SHAPES = (
    ("plus", (_s((100, 30), (100, 170)), _s((30, 100), (170, 100)))),
    ("tee", (_s((30, 72), (170, 72)), _s((100, 72), (100, 172)))),
    ("ell", (_s((70, 38), (70, 138)), _s((70, 138), (162, 138)))),
    (
        "aitch",
        (
            _s((45, 32), (45, 168)),
            _s((155, 32), (155, 168)),
            _s((45, 100), (155, 100)),
        ),
    ),
    ("ex", (_s((35, 35), (165, 165)), _s((165, 35), (35, 165)))),
    (
        "zed",
        (
            _s((45, 40), (160, 40)),
            _s((160, 40), (45, 160)),
            _s((45, 160), (160, 160)),
        ),
    ),
    (
        "en",
        (
            _s((50, 165), (50, 35)),
            _s((50, 35), (150, 165)),
            _s((150, 165), (150, 35)),
        ),
    ),
    (
        "ee",
        (
            _s((65, 35), (65, 165)),
            _s((65, 35), (155, 35)),
            _s((65, 100), (145, 100)),
            _s((65, 165), (155, 165)),
        ),
    ),
    (
        "ay",
        (
            _s((100, 32), (45, 168)),
            _s((100, 32), (155, 168)),
            _s((66, 120), (134, 120)),
        ),
    ),
    (
        "box",
        (
            _s((45, 45), (155, 45)),
            _s((155, 45), (155, 155)),
            _s((155, 155), (45, 155)),
            _s((45, 155), (45, 45)),
        ),
    ),
    (
        "ladder",
        (
            _s((60, 32), (60, 168)),
            _s((140, 32), (140, 168)),
            _s((60, 68), (140, 68)),
            _s((60, 132), (140, 132)),
        ),
    ),
    (
        "gate",
        (
            _s((55, 35), (55, 165)),
            _s((145, 35), (145, 165)),
            _s((30, 100), (170, 100)),
        ),
    ),
    (
        "you",
        (
            _s((58, 35), (58, 122)),
            _q((58, 122), (100, 185), (142, 122)),
            _s((142, 122), (142, 35)),
        ),
    ),
    (
        "dee",
        (
            _s((62, 35), (62, 165)),
            _q((62, 35), (152, 47), (150, 100)),
            _q((150, 100), (152, 153), (62, 165)),
        ),
    ),
    (
        "ess",
        (
            _q((142, 45), (58, 20), (64, 95)),
            _q((64, 95), (146, 120), (60, 160)),
        ),
    ),
)

_HELD_OUT_SHAPES = (
    (
        "kay",
        (
            _s((60, 32), (60, 168)),
            _s((60, 100), (150, 35)),
            _s((60, 100), (150, 165)),
        ),
    ),
    (
        "wye",
        (
            _s((45, 32), (100, 95)),
            _s((155, 32), (100, 95)),
            _s((100, 95), (100, 160)),
        ),
    ),
    (
        "diamond",
        (
            _s((100, 34), (166, 100)),
            _s((166, 100), (100, 166)),
            _s((100, 166), (34, 100)),
            _s((34, 100), (100, 34)),
        ),
    ),
    (
        "triangle",
        (
            _s((100, 40), (160, 150)),
            _s((160, 150), (40, 150)),
            _s((40, 150), (100, 40)),
        ),
    ),
    (
        "hourglass",
        (
            _s((45, 38), (155, 162)),
            _s((155, 38), (45, 162)),
            _s((45, 38), (155, 38)),
            _s((45, 162), (155, 162)),
        ),
    ),
    (
        "arrow",
        (
            _s((100, 162), (100, 38)),
            _s((100, 38), (60, 86)),
            _s((100, 38), (140, 86)),
            _s((100, 162), (70, 130)),
            _s((100, 162), (130, 130)),
        ),
    ),
    ("vee", (_s((45, 35), (100, 165)), _s((155, 35), (100, 165)))),
    (
        "em",
        (
            _s((45, 165), (45, 35)),
            _s((45, 35), (100, 120)),
            _s((100, 120), (155, 35)),
            _s((155, 35), (155, 165)),
        ),
    ),
    (
        "dub",
        (
            _s((40, 35), (70, 165)),
            _s((70, 165), (100, 60)),
            _s((100, 60), (130, 165)),
            _s((130, 165), (160, 35)),
        ),
    ),
    (
        "seven",
        (
            _s((45, 50), (155, 50)),
            _s((155, 50), (80, 160)),
            _s((72, 108), (132, 108)),
        ),
    ),
    (
        "four",
        (
            _s((120, 35), (45, 118)),
            _s((45, 118), (158, 118)),
            _s((120, 35), (120, 165)),
        ),
    ),
    (
        "bracket",
        (
            _s((50, 40), (50, 160)),
            _s((50, 40), (150, 40)),
            _s((50, 160), (150, 160)),
        ),
    ),
    (
        "steps",
        (
            _s((40, 55), (100, 55)),
            _s((100, 55), (100, 115)),
            _s((100, 115), (160, 115)),
            _s((160, 115), (160, 145)),
        ),
    ),
    (
        "pinwheel",
        (
            _s((100, 32), (100, 168)),
            _s((32, 100), (168, 100)),
            _s((55, 55), (145, 145)),
        ),
    ),
    (
        "tent",
        (
            _s((100, 36), (48, 158)),
            _s((100, 36), (152, 158)),
            _s((60, 126), (140, 126)),
        ),
    ),
    (
        "flag",
        (
            _s((68, 40), (68, 160)),
            _s((68, 48), (152, 78)),
            _s((152, 78), (68, 108)),
        ),
    ),
    (
        "comb",
        (
            _s((40, 76), (160, 76)),
            _s((64, 76), (64, 140)),
            _s((100, 76), (100, 140)),
            _s((136, 76), (136, 140)),
        ),
    ),
    (
        "railplus",
        (
            _s((100, 34), (100, 166)),
            _s((34, 100), (166, 100)),
            _s((52, 130), (148, 130)),
        ),
    ),
    (
        "grille",
        (
            _s((58, 34), (58, 166)),
            _s((142, 34), (142, 166)),
            _s((58, 52), (142, 52)),
            _s((58, 100), (142, 100)),
            _s((58, 148), (142, 148)),
        ),
    ),
    (
        "lightning",
        (
            _s((45, 40), (155, 80)),
            _s((155, 80), (45, 120)),
            _s((45, 120), (155, 160)),
        ),
    ),
    (
        "exbar",
        (
            _s((45, 40), (155, 160)),
            _s((155, 40), (45, 160)),
            _s((100, 30), (100, 170)),
        ),
    ),
    (
        "bracket2",
        (
            _s((150, 40), (150, 160)),
            _s((50, 40), (150, 40)),
            _s((50, 160), (150, 160)),
        ),
    ),
    (
        "wide",
        (
            _s((38, 35), (38, 165)),
            _s((162, 35), (162, 165)),
            _s((38, 92), (162, 92)),
        ),
    ),
    (
        "narrow",
        (
            _s((62, 160), (62, 40)),
            _s((62, 40), (138, 160)),
            _s((138, 160), (138, 40)),
        ),
    ),
    (
        "cee",
        (
            _q((144, 52), (52, 24), (46, 100)),
            _q((46, 100), (52, 176), (144, 148)),
        ),
    ),
    ("hook", (_v((113, 28), (113, 105), (110, 162), (50, 135)),)),
    (
        "oh",
        (
            _q((100, 34), (22, 100), (100, 166)),
            _q((100, 166), (178, 100), (100, 34)),
        ),
    ),
    (
        "pee",
        (
            _s((66, 40), (66, 160)),
            _q((66, 42), (160, 70), (66, 98)),
        ),
    ),
    (
        "arch",
        (
            _s((52, 160), (52, 58)),
            _q((52, 58), (100, 16), (148, 58)),
            _s((148, 58), (148, 160)),
        ),
    ),
    (
        "wave",
        (
            _q((36, 118), (68, 38), (100, 98)),
            _q((100, 98), (132, 158), (164, 78)),
        ),
    ),
)

_THICKNESS_SHAPES = (
    ("hbar", (_s((50, 100), (150, 100)),)),
    ("vbar", (_s((100, 48), (100, 152)),)),
    ("diag", (_s((55, 55), (145, 145)),)),
    ("smallplus", (_s((100, 52), (100, 148)), _s((52, 100), (148, 100)))),
    ("corner", (_s((62, 48), (62, 138)), _s((62, 138), (152, 138)))),
    ("backdiag", (_s((145, 55), (55, 145)),)),
    ("smallvee", (_s((60, 55), (100, 145)), _s((140, 55), (100, 145)))),
    ("smalltee", (_s((55, 70), (145, 70)), _s((100, 70), (100, 150)))),
    ("twobars", (_s((72, 52), (72, 148)), _s((128, 52), (128, 148)))),
    ("smallzig", (_s((58, 62), (100, 138)), _s((100, 138), (142, 62)))),
)

_EXTRACTION_SHAPES = (
    (
        "threebars",
        (
            _s((38, 52), (162, 52)),
            _s((38, 100), (162, 100)),
            _s((38, 148), (162, 148)),
        ),
    ),
    ("rails", (_s((62, 38), (62, 162)), _s((138, 38), (138, 162)))),
    ("cross", (_s((42, 42), (158, 158)), _s((158, 42), (42, 158)))),
    ("crossplus", (_s((100, 36), (100, 164)), _s((36, 100), (164, 100)))),
    (
        "rungs",
        (
            _s((68, 36), (68, 164)),
            _s((132, 36), (132, 164)),
            _s((34, 100), (166, 100)),
        ),
    ),
)


def center_on_grid(g: Glyph) -> Glyph:
    """Translate control points so the sample centroid hits the grid center."""
    cx, cy = g.centroid()
    # Snap the shift so exact designs keep integer coordinates on disk.
    dx = round(GRID_CENTER - cx, 9)
    dy = round(GRID_CENTER - cy, 9)
    moved = [
        s.with_points([(x + dx, y + dy) for x, y in s.points]) for s in g.strokes
    ]
    return g.with_strokes(moved)


def _build(cp: int, specs) -> Glyph:
    idx = cp - 0xE000
    strokes = []
    for i, (lt, pts) in enumerate(specs):
        ss = (idx + 2 * i) % 7
        es = (idx + 3 * i) % 15
        strokes.append(Skeleton(lt, ss, es, tuple(pts)))
    g = center_on_grid(Glyph(cp, tuple(strokes)))
    lo_x, lo_y, w, h = g.bbox()
    if lo_x < 20.0 or lo_y < 20.0 or lo_x + w > 180.0 or lo_y + h > 180.0:
        raise ValueError(f"{g.name}: centered shape leaves the safe grid band")
    return g


def _catalog() -> dict[int, tuple[str, Glyph]]:
    bands = (
        (SAMPLE_CODEPOINTS, _SAMPLE_SHAPES),
        (HELD_OUT_CODEPOINTS, _HELD_OUT_SHAPES),
        (THICKNESS_CODEPOINTS, _THICKNESS_SHAPES),
        (EXTRACTION_CODEPOINTS, _EXTRACTION_SHAPES),
    )
    out: dict[int, tuple[str, Glyph]] = {}
    for cps, shapes in bands:
        if len(cps) != len(shapes):
            raise RuntimeError("codepoint band does not match shape table")
        for cp, (name, specs) in zip(cps, shapes):
            out[cp] = (name, _build(cp, specs))
    return out


_CATALOG = _catalog()

GLYPH_NAMES = {cp: name for cp, (name, _) in _CATALOG.items()}


def dataset_glyph(cp: int) -> Glyph:
    if cp not in _CATALOG:
        raise ValueError(f"no fixture glyph U+{cp:04X}")
    return _CATALOG[cp][1]


def dataset_glyphs(codepoints: Sequence[int] | None = None) -> tuple[Glyph, ...]:
    cps = ALL_CODEPOINTS if codepoints is None else tuple(codepoints)
    return tuple(dataset_glyph(cp) for cp in cps)


def write_dataset(directory: str | Path) -> list[Path]:
    return [write_glyph_file(dataset_glyph(cp), directory) for cp in ALL_CODEPOINTS]


@dataclass(frozen=True)
class FontSpec:
    """A synthetic rendered font derived from the dataset glyphs.

    shear skews the canvas about its center; offset 0 draws solid strokes
    of the given ink radius, a positive offset draws a hollow double line
    traced at that distance from the path.
    """

    name: str
    shear: float = 0.0
    offset: float = 0.0
    radius: float = 7.0
    width: int = CANVAS_SIZE
    height: int = CANVAS_SIZE

    @property
    def nominal_thickness(self) -> float:
        return self.radius if self.offset == 0.0 else self.offset + self.radius

    def style_matrix(self) -> np.ndarray:
        base = grid_to_canvas(self.width, self.height)
        if self.shear == 0.0:
            return base
        cy = self.height / 2.0
        sh = np.array([[1.0, self.shear, -self.shear * cy], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        return sh @ base

    def adjusted(self, g: Glyph) -> Glyph:
        """Dataset glyph mapped into this font's canvas coordinates."""
        return g.transformed(self.style_matrix())

    def render_strokes(self, adjusted: Glyph) -> list[np.ndarray]:
        """Per-stroke ink, one uint8 mask per skeleton, in canvas coordinates."""
        out = []
        for s in adjusted.strokes:
            if self.offset == 0.0:
                one = Glyph(adjusted.codepoint, (s,))
                out.append(rasterize_glyph(one, self.radius, self.width, self.height).pixels)
            else:
                d = np.sqrt(distance_field_sq([s], self.width, self.height))
                ring = np.abs(d - self.offset) <= self.radius
                out.append(np.where(ring, 255, 0).astype(np.uint8))
        return out

    def render(self, adjusted: Glyph) -> np.ndarray:
        if not adjusted.strokes:
            raise ValueError("glyph has no strokes to render")
        strokes = self.render_strokes(adjusted)
        img = strokes[0]
        for m in strokes[1:]:
            img = np.maximum(img, m)
        return img

    def sample(self, cp: int) -> np.ndarray:
        return self.render(self.adjusted(dataset_glyph(cp)))


SLANT = FontSpec("slant", shear=0.18, radius=7.0)
RIBBON = FontSpec("ribbon", offset=4.0, radius=2.5)
FONTS = {f.name: f for f in (SLANT, RIBBON)}


def write_font(
    spec: FontSpec,
    directory: str | Path,
    *,
    sample_codepoints: Sequence[int] = SAMPLE_CODEPOINTS,
    truth_codepoints: Sequence[int] = HELD_OUT_CODEPOINTS,
) -> dict[str, list[Path]]:
    """Write rendered samples, adjusted skeletons, and held-out truth images.

    Layout under directory: samples/U+hex.png, adjusted/U+hex.gd,
    truth/U+hex.png.
    """
    base = Path(directory)
    written: dict[str, list[Path]] = {"samples": [], "adjusted": [], "truth": []}
    for cp in sample_codepoints:
        adj = spec.adjusted(dataset_glyph(cp))
        written["samples"].append(
            raster.save_mask(spec.render(adj), base / "samples" / f"{adj.name}.png")
        )
        written["adjusted"].append(write_glyph_file(adj, base / "adjusted"))
    for cp in truth_codepoints:
        adj = spec.adjusted(dataset_glyph(cp))
        written["truth"].append(
            raster.save_mask(spec.render(adj), base / "truth" / f"{adj.name}.png")
        )
    return written


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else "fixtures/dataset"
    paths = write_dataset(target)
    print(f"wrote {len(paths)} glyphs to {target}")
