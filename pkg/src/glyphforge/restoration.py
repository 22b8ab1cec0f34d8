"""Stroke restoration via cubic Bezier outlines.

An extracted stroke mask is vectorized into a closed chain of cubic
Bezier segments: the outer boundary is traced, simplified to find corner
breakpoints, and each run between corners is least-squares fitted with
cubics, splitting at the worst point until the fit is tight. Segments
that pass too close to another stroke's pixels are damaged (they belong
to the neighbor or to the shared junction, not to the stroke outline);
they are removed and each gap is bridged by a new cubic that extends the
tangents of the surviving neighbors:

    P2 = P1 + gamma (P1 - P1')      P3 = P4 + gamma (P4 - P4')

where P1/P4 are the gap ends and P1'/P4' the adjacent inner control
points. Rendering the repaired chain fills the restored stroke shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from PIL import Image, ImageDraw
from scipy import ndimage

from . import raster
from .geometry import cubic_bezier


@dataclass(frozen=True)
class BezierChain:
    """Closed loop of cubic segments; each starts where the previous ends."""

    segments: tuple[np.ndarray, ...]  # each (4, 2): P1, P2, P3, P4

    def __post_init__(self):
        if not self.segments:
            raise ValueError("chain needs at least one segment")
        segs = []
        for s in self.segments:
            a = np.asarray(s, dtype=float)
            if a.shape != (4, 2):
                raise ValueError("each segment needs 4 control points")
            a.setflags(write=False)
            segs.append(a)
        object.__setattr__(self, "segments", tuple(segs))

    def is_contiguous(self, tol: float = 1e-6) -> bool:
        n = len(self.segments)
        return all(
            np.allclose(self.segments[k][3], self.segments[(k + 1) % n][0], atol=tol)
            for k in range(n)
        )

    def flatten(self, steps: int = 24) -> np.ndarray:
        """Closed polygon (without repeated last point) along the chain."""
        ts = np.linspace(0.0, 1.0, steps, endpoint=False)
        return np.vstack([cubic_bezier(s, ts) for s in self.segments])

    def render(self, width: int, height: int, steps: int = 24) -> np.ndarray:
        """Filled outline as a uint8 mask (255 inside)."""
        # snap float noise so near-integer coordinates rasterize consistently
        poly = np.round(self.flatten(steps), 3)
        img = Image.new("L", (width, height), 0)
        draw = ImageDraw.Draw(img)
        draw.polygon([(float(x), float(y)) for x, y in poly], fill=255, outline=255)
        return np.asarray(img, dtype=np.uint8)

    def svg_path(self) -> str:
        x0, y0 = self.segments[0][0]
        parts = [f"M {x0:.2f} {y0:.2f}"]
        for s in self.segments:
            parts.append(
                "C "
                + " ".join(f"{c[0]:.2f} {c[1]:.2f}" for c in s[1:])
            )
        parts.append("Z")
        return " ".join(parts)


def _dp_keep(pts: np.ndarray, lo: int, hi: int, eps: float, keep: set[int]) -> None:
    # recursive Douglas-Peucker between two anchored indices
    if hi <= lo + 1:
        return
    a, b = pts[lo], pts[hi]
    ab = b - a
    denom = float(ab @ ab)
    seg = pts[lo + 1 : hi]
    if denom <= 0.0:
        d = np.linalg.norm(seg - a, axis=1)
    else:
        t = np.clip(((seg - a) @ ab) / denom, 0.0, 1.0)
        d = np.linalg.norm(seg - (a + t[:, None] * ab), axis=1)
    k = int(np.argmax(d))
    if d[k] > eps:
        idx = lo + 1 + k
        keep.add(idx)
        _dp_keep(pts, lo, idx, eps, keep)
        _dp_keep(pts, idx, hi, eps, keep)


def simplify_closed(boundary: np.ndarray, epsilon: float) -> list[int]:
    """Indices of boundary points kept by closed-loop Douglas-Peucker."""
    n = len(boundary)
    if n <= 2:
        return list(range(n))
    far = int(np.argmax(((boundary - boundary[0]) ** 2).sum(axis=1)))
    if far == 0:
        return [0]
    keep = {0, far}
    _dp_keep(boundary, 0, far, epsilon, keep)
    closed = np.vstack([boundary[far:], boundary[:1]])
    sub: set[int] = set()
    _dp_keep(closed, 0, len(closed) - 1, epsilon, sub)
    keep.update((far + k) % n for k in sub)
    return sorted(keep)


def corner_indices(boundary: np.ndarray, kept: Sequence[int], angle_deg: float) -> list[int]:
    """Kept indices where the simplified outline turns sharper than angle_deg."""
    m = len(kept)
    if m < 3:
        return list(kept)
    out = []
    cos_limit = np.cos(np.radians(angle_deg))
    for j in range(m):
        v = boundary[kept[j]]
        a = boundary[kept[j - 1]]
        b = boundary[kept[(j + 1) % m]]
        u1 = v - a
        u2 = b - v
        n1 = np.linalg.norm(u1)
        n2 = np.linalg.norm(u2)
        if n1 < 1e-12 or n2 < 1e-12:
            continue
        if float(u1 @ u2) / (n1 * n2) < cos_limit:
            out.append(kept[j])
    return out


def fit_cubic_run(pts: np.ndarray, tol: float) -> list[np.ndarray]:
    """Cubics through an open point run, split at the worst point until tight."""
    pts = np.asarray(pts, dtype=float)
    m = len(pts)
    if m < 2:
        raise ValueError("run needs at least 2 points")
    p0, p3 = pts[0], pts[-1]
    if m == 2:
        return [_line_cubic(p0, p3)]
    chord = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    if chord[-1] <= 0.0:
        return [_line_cubic(p0, p3)]
    t = chord / chord[-1]

    def solve(params):
        b0 = (1 - params) ** 3
        b1 = 3 * (1 - params) ** 2 * params
        b2 = 3 * (1 - params) * params**2
        b3 = params**3
        rhs = pts - np.outer(b0, p0) - np.outer(b3, p3)
        sol, *_ = np.linalg.lstsq(np.stack([b1, b2], axis=1), rhs, rcond=None)
        seg = np.vstack([p0, sol[0], sol[1], p3])
        return seg, np.linalg.norm(cubic_bezier(seg, params) - pts, axis=1)

    seg, errs = solve(t)
    # one parameter-reprojection pass: snap each point to its closest curve
    # parameter and refit, keeping whichever fit deviates less
    grid = np.linspace(0.0, 1.0, 64)
    d = np.linalg.norm(cubic_bezier(seg, grid)[None, :, :] - pts[:, None, :], axis=2)
    t2 = np.maximum.accumulate(grid[np.argmin(d, axis=1)])
    t2[0], t2[-1] = 0.0, 1.0
    seg2, errs2 = solve(t2)
    if errs2.max() < errs.max():
        seg, errs = seg2, errs2
    worst = int(np.argmax(errs))
    if errs[worst] <= tol or m < 5:
        return [seg]
    worst = min(max(worst, 2), m - 3)
    return fit_cubic_run(pts[: worst + 1], tol) + fit_cubic_run(pts[worst:], tol)


def _line_cubic(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.vstack([a, a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0, b])


def vectorize(
    mask: np.ndarray,
    *,
    epsilon: float = 1.0,
    corner_angle_deg: float = 60.0,
    fit_tolerance: float = 1.5,
) -> BezierChain:
    """Closed cubic chain along the outer boundary of a one-piece mask."""
    mask = np.asarray(mask, dtype=bool)
    parts = raster.component_count(mask)
    if parts == 0:
        raise ValueError("mask is empty")
    if parts > 1:
        raise ValueError(f"mask has {parts} disconnected parts")
    boundary = raster.moore_trace(mask).astype(float)
    if len(boundary) < 3:
        raise ValueError("region too small to outline")
    kept = simplify_closed(boundary, epsilon)
    corners = corner_indices(boundary, kept, corner_angle_deg)
    n = len(boundary)
    if len(corners) < 2:
        anchor = corners[0] if corners else kept[0]
        run = np.vstack([boundary[anchor:], boundary[: anchor + 1]])
        segs = []
        cuts = np.linspace(0, len(run) - 1, 5).astype(int)
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b > a:
                segs.extend(fit_cubic_run(run[a : b + 1], fit_tolerance))
        if not segs:
            segs = fit_cubic_run(run, fit_tolerance)
        return BezierChain(tuple(segs))
    segs = []
    for j, c in enumerate(corners):
        nxt = corners[(j + 1) % len(corners)]
        if nxt > c:
            run = boundary[c : nxt + 1]
        else:
            run = np.vstack([boundary[c:], boundary[: nxt + 1]])
        segs.extend(fit_cubic_run(run, fit_tolerance))
    return BezierChain(tuple(segs))


def damaged_segments(
    chain: BezierChain,
    forbidden: np.ndarray,
    distance: float,
    *,
    samples: int = 32,
) -> list[int]:
    """Indices of segments that come within distance of the forbidden pixels."""
    forbidden = np.asarray(forbidden, dtype=bool)
    if not forbidden.any():
        return []
    dist = ndimage.distance_transform_edt(~forbidden)
    h, w = forbidden.shape
    ts = np.linspace(0.0, 1.0, samples)
    out = []
    for k, seg in enumerate(chain.segments):
        pts = cubic_bezier(seg, ts)
        xi = np.clip(np.rint(pts[:, 0]).astype(int), 0, w - 1)
        yi = np.clip(np.rint(pts[:, 1]).astype(int), 0, h - 1)
        if (dist[yi, xi] < distance).any():
            out.append(k)
    return out


def _decasteljau_split(seg: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(seg, dtype=float)
    a = p[:-1] + t * np.diff(p, axis=0)
    b = a[:-1] + t * np.diff(a, axis=0)
    c = b[:-1] + t * np.diff(b, axis=0)
    left = np.vstack([p[0], a[0], b[0], c[0]])
    right = np.vstack([c[0], b[1], a[2], p[3]])
    return left, right


def bezier_slice(seg: np.ndarray, t0: float, t1: float) -> np.ndarray:
    """Control points of the curve restricted to the parameter span [t0, t1]."""
    if not 0.0 <= t0 < t1 <= 1.0:
        raise ValueError(f"bad parameter span [{t0}, {t1}]")
    _, rest = _decasteljau_split(seg, t0) if t0 > 0.0 else (None, np.asarray(seg, dtype=float))
    if t1 >= 1.0:
        return rest
    u = (t1 - t0) / (1.0 - t0)
    left, _ = _decasteljau_split(rest, u)
    return left


def _tangent_anchor(seg: np.ndarray, end: bool) -> np.ndarray:
    # nearest distinct control point to the gap end, walking inward
    order = (2, 1, 0) if end else (1, 2, 3)
    tip = seg[3] if end else seg[0]
    for k in order:
        if np.linalg.norm(tip - seg[k]) > 1e-9:
            return seg[k]
    return seg[order[-1]]


def bridge_segment(prev_seg: np.ndarray, next_seg: np.ndarray, gamma: float = 0.4) -> np.ndarray:
    """Cubic spanning from the end of prev_seg to the start of next_seg."""
    p1 = np.asarray(prev_seg, dtype=float)[3]
    p4 = np.asarray(next_seg, dtype=float)[0]
    a1 = _tangent_anchor(np.asarray(prev_seg, dtype=float), end=True)
    a4 = _tangent_anchor(np.asarray(next_seg, dtype=float), end=False)
    return np.vstack([p1, p1 + gamma * (p1 - a1), p4 + gamma * (p4 - a4), p4])


def _clean_spans(flags: np.ndarray, ts: np.ndarray) -> list[tuple[float, float]]:
    """Parameter spans of maximal damage-free sample runs of length >= 2."""
    spans = []
    i = 0
    while i < len(flags):
        if flags[i]:
            i += 1
            continue
        j = i
        while j + 1 < len(flags) and not flags[j + 1]:
            j += 1
        if j > i:
            spans.append((float(ts[i]), float(ts[j])))
        i = j + 1
    return spans


def restore_chain(
    chain: BezierChain,
    forbidden: np.ndarray,
    distance: float,
    *,
    gamma: float = 0.4,
    samples: int = 32,
) -> BezierChain:
    """Trim outline spans near the forbidden ink and bridge each cyclic gap.

    Damage is judged per sampled parameter, so a long segment that only
    grazes the forbidden zone loses just the grazing span, not its whole
    length.
    """
    forbidden = np.asarray(forbidden, dtype=bool)
    if not forbidden.any():
        return chain
    dist = ndimage.distance_transform_edt(~forbidden)
    h, w = forbidden.shape
    ts = np.linspace(0.0, 1.0, samples)
    pieces: list[np.ndarray] = []
    damage = False
    for seg in chain.segments:
        pts = cubic_bezier(seg, ts)
        xi = np.clip(np.rint(pts[:, 0]).astype(int), 0, w - 1)
        yi = np.clip(np.rint(pts[:, 1]).astype(int), 0, h - 1)
        flags = dist[yi, xi] < distance
        if not flags.any():
            pieces.append(np.asarray(seg, dtype=float))
            continue
        damage = True
        for t0, t1 in _clean_spans(flags, ts):
            pieces.append(bezier_slice(seg, t0, t1))
    if not damage:
        return chain
    if not pieces:
        raise ValueError("every outline segment is damaged")
    segs: list[np.ndarray] = []
    for j, piece in enumerate(pieces):
        segs.append(piece)
        nxt = pieces[(j + 1) % len(pieces)]
        if np.linalg.norm(piece[3] - nxt[0]) > 1e-6:
            segs.append(bridge_segment(piece, nxt, gamma))
    return BezierChain(tuple(segs))


def restore_stroke(
    mask: np.ndarray,
    other: np.ndarray | None,
    thickness: float,
    *,
    gamma: float = 0.4,
    epsilon: float = 1.0,
    corner_angle_deg: float = 60.0,
    fit_tolerance: float = 1.5,
    samples: int = 32,
) -> tuple[np.ndarray, BezierChain]:
    """Vectorize a stroke mask, repair it against neighbors, and re-render."""
    chain = vectorize(
        mask, epsilon=epsilon, corner_angle_deg=corner_angle_deg, fit_tolerance=fit_tolerance
    )
    if other is not None and np.asarray(other, dtype=bool).any():
        chain = restore_chain(chain, other, thickness, gamma=gamma, samples=samples)
    h, w = np.asarray(mask).shape
    return chain.render(w, h), chain


def write_svg(chains: Sequence[BezierChain], path, width: int, height: int) -> None:
    """Minimal standalone SVG with one filled path per chain."""
    body = "\n".join(
        f'  <path d="{c.svg_path()}" fill="black" />' for c in chains
    )
    doc = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">\n{body}\n</svg>\n'
    )
    with open(path, "w", encoding="ascii") as fh:
        fh.write(doc)
