"""Skeleton modification and energy-based stroke deployment.

Dataset skeletons are reshaped toward the target font by two chained
transforms: a size transform averaged from per-character bounding-box
ratios, and a style transform averaged from per-group affine fits of the
size-normalized dataset skeletons onto the adjusted sample skeletons.
Both are applied to origin-centered dataset coordinates.

Deployment picks, for every transformed target skeleton, the extracted
stroke asset with the least energy:

    E = shape(adjusted, target) + shape(dataset, dataset) + context

where the shape energy is a two-way affine-fit residual plus attribute
mismatch penalties, and the context energy compares the skeletons touching
the start and end points. The chosen stroke images are affinely warped
onto their target skeletons and merged by foreground union.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .glyphdata import Glyph, Skeleton
from .relations import RelationKind, contact_zone

COLLINEAR_RTOL = 1e-6
MISSING_CONTEXT_ENERGY = 50.0


@dataclass(frozen=True)
class TransformPair:
    """Size and style transforms, applied as t_aff @ t_sz @ point."""

    t_sz: np.ndarray
    t_aff: np.ndarray

    def __post_init__(self):
        for name in ("t_sz", "t_aff"):
            m = np.asarray(getattr(self, name), dtype=float)
            if m.shape != (3, 3):
                raise ValueError(f"{name} must be 3x3")
            if not np.allclose(m[2], [0.0, 0.0, 1.0], atol=1e-9):
                raise ValueError(f"{name} last row must be [0, 0, 1]")
            m.setflags(write=False)
            object.__setattr__(self, name, m)
        if self.t_sz[0, 0] <= 0 or self.t_sz[1, 1] <= 0:
            raise ValueError("size transform needs positive scales")

    @property
    def matrix(self) -> np.ndarray:
        return self.t_aff @ self.t_sz


@dataclass(frozen=True)
class StrokeAsset:
    """One extracted stroke with the skeletons that describe it."""

    asset_id: str
    image: np.ndarray  # uint8 stroke mask in sample canvas coordinates
    source_skeleton: Skeleton  # adjusted skeleton the stroke was drawn on
    dataset_skeleton: Skeleton  # matching design-grid skeleton
    context: tuple[Skeleton | None, Skeleton | None] = (None, None)

    def __post_init__(self):
        img = np.asarray(self.image)
        if img.size == 0 or not (img > 0).any():
            raise ValueError(f"asset {self.asset_id}: empty stroke image")
        if self.source_skeleton.sample_count != self.dataset_skeleton.sample_count:
            raise ValueError(f"asset {self.asset_id}: sample counts differ")

    @property
    def attributes(self) -> tuple[int, int, int]:
        return self.dataset_skeleton.attributes()


@dataclass(frozen=True)
class TargetStroke:
    """A transformed skeleton awaiting a stroke, with its dataset origins."""

    skeleton: Skeleton  # transformed (target-space) skeleton
    dataset_skeleton: Skeleton
    context: tuple[Skeleton | None, Skeleton | None] = (None, None)


@dataclass(frozen=True)
class SelectionResult:
    index: int
    energy: float


def _coords(samples: np.ndarray) -> np.ndarray:
    a = np.asarray(samples, dtype=float)
    if a.ndim != 2 or a.shape[0] not in (2, 3):
        raise ValueError("samples must be a 2xN or 3xN matrix")
    return a[:2]


def fit_affine(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Affine matrix taking src sample points onto dst by least squares.

    Collinear point sets are rank deficient for a full affine fit and fall
    back to the best similarity transform (rotation, uniform scale,
    translation), which is exact for rigidly moved straight strokes.
    """
    x = _coords(src)
    y = _coords(dst)
    if x.shape != y.shape:
        raise ValueError("sample matrices differ in shape")
    n = x.shape[1]
    if len(np.unique(x.T, axis=0)) < 2:
        raise ValueError("need at least 2 distinct points to fit")
    cx = x.mean(axis=1, keepdims=True)
    cy = y.mean(axis=1, keepdims=True)
    xc = x - cx
    yc = y - cy
    sv = np.linalg.svd(xc, compute_uv=False)
    if sv[-1] <= COLLINEAR_RTOL * sv[0]:
        a = _fit_similarity(xc, yc, n)
    else:
        sol, *_ = np.linalg.lstsq(xc.T, yc.T, rcond=None)
        a = sol.T
    t = cy - a @ cx
    out = np.eye(3)
    out[:2, :2] = a
    out[:2, 2:3] = t
    return out


def _fit_similarity(xc: np.ndarray, yc: np.ndarray, n: int) -> np.ndarray:
    cov = yc @ xc.T / n
    u, d, vt = np.linalg.svd(cov)
    s = np.ones(2)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        s[1] = -1.0
    rot = u @ np.diag(s) @ vt
    var = float((xc**2).sum()) / n
    scale = float((d * s).sum()) / var if var > 0 else 1.0
    return scale * rot


def estimate_size_transform(
    pairs: Sequence[tuple[Glyph, Glyph]], out_width: int, out_height: int
) -> np.ndarray:
    """Average per-character size matrix from bounding-box ratios.

    Each pair holds (dataset glyph, adjusted glyph), both measured in the
    units of the output canvas. The result acts on origin-centered dataset
    coordinates and lands the content near the canvas center.
    """
    if not pairs:
        raise ValueError("size transform needs at least one sample pair")
    acc = np.zeros((3, 3))
    for src, dst in pairs:
        _, _, w, h = src.bbox()
        _, _, what, hhat = dst.bbox()
        if w <= 0 or h <= 0:
            raise ValueError(f"{src.name}: degenerate bounding box {w}x{h}")
        rw = what / w
        rh = hhat / h
        acc += np.array(
            [
                [rw, 0.0, out_width * rw / 2.0],
                [0.0, rh, out_height * rh / 2.0],
                [0.0, 0.0, 1.0],
            ]
        )
    return acc / len(pairs)


def group_skeletons(g: Glyph) -> tuple[tuple[int, ...], ...]:
    """Connected components of strokes linked by any non-isolated relation."""
    if g.relations is None:
        raise ValueError(f"{g.name} needs relations before grouping")
    n = len(g.strokes)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(n):
            rel = g.relations[i][j]
            if rel is not None and rel.kind != RelationKind.ISOLATED:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    return tuple(tuple(sorted(v)) for _, v in sorted(groups.items()))


def estimate_style_transform(
    pairs: Sequence[tuple[Glyph, Glyph]], *, per_stroke: bool = False
) -> np.ndarray:
    """Average affine fit from size-normalized dataset strokes to adjusted ones.

    Each pair holds (base glyph, adjusted glyph), where the base glyph is
    the size-normalized dataset glyph carrying relations or groups. Fits
    are computed per group on the concatenated group samples (one fit per
    group, counted once per member stroke) unless per_stroke is set, and
    the sum is divided by the total stroke count.
    """
    acc = np.zeros((3, 3))
    total = 0
    for base, adjusted in pairs:
        if len(base.strokes) != len(adjusted.strokes):
            raise ValueError(f"{base.name}: stroke counts differ between pair members")
        groups = base.groups if base.groups is not None else group_skeletons(base)
        for grp in groups:
            if per_stroke:
                for j in grp:
                    acc += fit_affine(base.strokes[j].samples, adjusted.strokes[j].samples)
            else:
                bs = np.hstack([base.strokes[j].samples for j in grp])
                ds = np.hstack([adjusted.strokes[j].samples for j in grp])
                acc += len(grp) * fit_affine(bs, ds)
        total += len(base.strokes)
    if total == 0:
        raise ValueError("style transform needs at least one stroke")
    return acc / total


def transform_skeleton(s: Skeleton, transform) -> Skeleton:
    """Skeleton moved by a 3x3 matrix or a TransformPair."""
    m = transform.matrix if isinstance(transform, TransformPair) else np.asarray(transform, dtype=float)
    pts = np.asarray(s.points, dtype=float)
    hom = np.vstack([pts.T, np.ones(len(pts))])
    moved = (m @ hom)[:2].T
    return s.with_points([tuple(p) for p in moved])


def center_translation(g: Glyph) -> np.ndarray:
    """Matrix shifting the glyph centroid to the origin."""
    cx, cy = g.centroid()
    out = np.eye(3)
    out[0, 2] = -cx
    out[1, 2] = -cy
    return out


def shape_energy(a: Skeleton, b: Skeleton, *, attribute_penalty: float = 1.0) -> float:
    """Two-way per-point fit residual plus attribute mismatch penalties."""
    sa = a.samples
    sb = b.samples
    if sa.shape != sb.shape:
        raise ValueError("skeletons have different sample counts")
    n = sa.shape[1]
    fwd = fit_affine(sa, sb)
    bwd = fit_affine(sb, sa)
    r1 = float(np.abs(sb[:2] - (fwd @ sa)[:2]).sum()) / n
    r2 = float(np.abs(sa[:2] - (bwd @ sb)[:2]).sum()) / n
    mismatch = sum(
        1 for va, vb in zip(a.attributes(), b.attributes()) if va != vb
    )
    return r1 + r2 + attribute_penalty * mismatch


def context_energy(
    ca: tuple[Skeleton | None, Skeleton | None],
    cb: tuple[Skeleton | None, Skeleton | None],
) -> float:
    """Per-point distance of the start/end neighbors, or 50 when any is missing."""
    if any(s is None for s in (*ca, *cb)):
        return MISSING_CONTEXT_ENERGY
    total = 0.0
    for sa, sb in zip(ca, cb):
        xa = sa.samples
        xb = sb.samples
        if xa.shape != xb.shape:
            raise ValueError("context skeletons have different sample counts")
        total += float(np.abs(xa[:2] - xb[:2]).sum()) / xa.shape[1]
    return total


def resolve_contexts(g: Glyph) -> tuple[tuple[Skeleton | None, Skeleton | None], ...]:
    """Start/end neighbor skeleton for each stroke.

    A neighbor counts for an endpoint when its relation contact sits in
    that endpoint's zone; among several, the one whose centroid is closest
    to the stroke's centroid wins, with index as the final tie-break.
    """
    if g.relations is None:
        raise ValueError(f"{g.name} needs relations before context resolution")
    out = []
    for i, s in enumerate(g.strokes):
        center = s.samples[:2].mean(axis=1)
        best: dict[str, tuple[float, int]] = {}
        for j, other in enumerate(g.strokes):
            if j == i:
                continue
            rel = g.relations[i][j]
            if rel is None or rel.kind == RelationKind.ISOLATED or rel.src_index < 0:
                continue
            zone = contact_zone(rel.src_index, s.sample_count)
            if zone == "body":
                continue
            d = float(np.linalg.norm(other.samples[:2].mean(axis=1) - center))
            if zone not in best or (d, j) < best[zone]:
                best[zone] = (d, j)
        start = g.strokes[best["start"][1]] if "start" in best else None
        end = g.strokes[best["end"][1]] if "end" in best else None
        out.append((start, end))
    return tuple(out)


def stroke_energy(
    asset: StrokeAsset, target: TargetStroke, *, attribute_penalty: float = 1.0
) -> float:
    return (
        shape_energy(asset.source_skeleton, target.skeleton, attribute_penalty=attribute_penalty)
        + shape_energy(
            asset.dataset_skeleton, target.dataset_skeleton, attribute_penalty=attribute_penalty
        )
        + context_energy(asset.context, target.context)
    )


def select_stroke(
    target: TargetStroke,
    assets: Sequence[StrokeAsset],
    *,
    attribute_penalty: float = 1.0,
) -> SelectionResult:
    """Least-energy asset for the target; ties go to the lowest index."""
    if not assets:
        raise ValueError("no stroke assets to select from")
    best = SelectionResult(0, np.inf)
    for k, asset in enumerate(assets):
        e = stroke_energy(asset, target, attribute_penalty=attribute_penalty)
        if e < best.energy:
            best = SelectionResult(k, e)
    return best


def warp_mask(image: np.ndarray, matrix: np.ndarray, width: int, height: int) -> np.ndarray:
    """Affine warp of a mask onto a canvas by inverse nearest-neighbor mapping."""
    img = np.asarray(image)
    inv = np.linalg.inv(np.asarray(matrix, dtype=float))
    ys, xs = np.mgrid[0:height, 0:width]
    sx = inv[0, 0] * xs + inv[0, 1] * ys + inv[0, 2]
    sy = inv[1, 0] * xs + inv[1, 1] * ys + inv[1, 2]
    xi = np.rint(sx).astype(int)
    yi = np.rint(sy).astype(int)
    ih, iw = img.shape
    valid = (xi >= 0) & (xi < iw) & (yi >= 0) & (yi < ih)
    out = np.zeros((height, width), dtype=np.uint8)
    out[valid] = img[yi[valid], xi[valid]]
    return out


def compose_glyph(
    targets: Sequence[TargetStroke],
    picks: Sequence[StrokeAsset],
    width: int,
    height: int,
) -> np.ndarray:
    """Warp each chosen stroke onto its target skeleton and union the results."""
    if len(targets) != len(picks):
        raise ValueError("one selected asset per target skeleton required")
    canvas = np.zeros((height, width), dtype=np.uint8)
    for k, (target, asset) in enumerate(zip(targets, picks)):
        m = fit_affine(asset.source_skeleton.samples, target.skeleton.samples)
        warped = warp_mask(asset.image, m, width, height)
        if not warped.any():
            raise ValueError(f"stroke {k}: warp left no pixels on the canvas")
        np.maximum(canvas, warped, out=canvas)
    return canvas
