"""Stroke extraction with an adaptive active contour.

Each stroke of a sample image is cut out by relaxing a closed contour
around its segmented pixel region. The contour minimizes internal tension
and bending plus an image energy that is high on and around strokes:

    energy = gaussian_blur(sample) + thin_skeleton_layer   (capped at 255)

High energy repels the contour, so it settles just outside the ink. Where
relations say two strokes touch, the energy is adapted before relaxation:

  * continuous or connecting: divide the blurred layer by a relax factor
    inside a disk around the contact point, and pin the contour to pass
    through the contact point so neighboring strokes stay separated there;
  * crossing or connected: apply the same division near every pixel of the
    other stroke, without pinning, letting the contour swallow the shared
    intersection area.

The skeleton layer is never scaled down; contours must not cross stroke
centerlines. Minimization is a greedy discrete descent: vertices visit
their 3x3 pixel neighborhood in index order and take strictly improving
moves, so total energy never increases. Extraction is the sample
foreground clipped by the filled final contour, restricted to connected
parts that overlap the stroke's own segmented pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw
from scipy import ndimage

from . import raster
from .geometry import polygon_perimeter, resample_closed, segment_distance_sq
from .glyphdata import Glyph, stamp_paths
from .imageio import binarize
from .relations import RelationKind

DEFAULT_RELAX = 2.0
DEFAULT_RADIUS_SCALE = 1.5


@dataclass(frozen=True)
class EnergyImage:
    """Image energy split into its scalable blur and fixed skeleton layers."""

    smoothed: np.ndarray
    skeleton_layer: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return np.minimum(self.smoothed + self.skeleton_layer, 255.0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.smoothed.shape


@dataclass(frozen=True)
class Contour:
    """Closed polygon on the pixel grid; pinned vertices never move."""

    vertices: np.ndarray  # (n, 2) float, integer-valued (x, y)
    pinned: tuple[int, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if len(v) < 3:
            raise ValueError("contour needs at least 3 vertices")
        object.__setattr__(self, "vertices", v)
        v.setflags(write=False)

    @property
    def perimeter(self) -> float:
        return polygon_perimeter(self.vertices)


@dataclass(frozen=True)
class RelaxResult:
    contour: Contour
    converged: bool
    energies: tuple[float, ...]  # total energy before relaxing and after each sweep


def gaussian_kernel(variance: float) -> np.ndarray:
    """Unit-sum isotropic Gaussian, radius ceil(3 sigma)."""
    if variance <= 0:
        raise ValueError("variance must be positive")
    sigma = float(np.sqrt(variance))
    r = int(np.ceil(3.0 * sigma))
    y, x = np.mgrid[-r : r + 1, -r : r + 1]
    k = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    return k / k.sum()


def build_energy_image(sample: np.ndarray, skeleton_layer: np.ndarray, variance: float) -> EnergyImage:
    """Blur the sample with a unit-sum Gaussian and add the skeleton layer."""
    if sample.shape != skeleton_layer.shape:
        raise ValueError("sample and skeleton layer shapes differ")
    smoothed = ndimage.convolve(
        sample.astype(float), gaussian_kernel(variance), mode="constant", cval=0.0
    )
    return EnergyImage(smoothed, skeleton_layer.astype(float))


def modify_energy(
    e: EnergyImage,
    relation,
    thickness: float,
    other_strokes: np.ndarray | None = None,
    *,
    relax: float = DEFAULT_RELAX,
    radius_scale: float = DEFAULT_RADIUS_SCALE,
) -> tuple[EnergyImage, list[tuple[float, float]]]:
    """Adapt the blurred layer for one relation; returns (energy, pin points).

    The skeleton layer is left untouched in every case.
    """
    kind = relation.kind
    if kind == RelationKind.ISOLATED:
        return e, []
    h, w = e.shape
    if kind in (RelationKind.CONTINUOUS, RelationKind.CONNECTING):
        if relation.contact is None:
            return e, []
        qx, qy = relation.contact
        ys, xs = np.mgrid[0:h, 0:w]
        inside = (xs - qx) ** 2 + (ys - qy) ** 2 <= (radius_scale * thickness) ** 2
        smoothed = np.where(inside, e.smoothed / relax, e.smoothed)
        return EnergyImage(smoothed, e.skeleton_layer), [(float(qx), float(qy))]
    if other_strokes is None:
        raise ValueError(f"{kind} relation needs the other stroke's pixels")
    dist = ndimage.distance_transform_edt(~np.asarray(other_strokes, dtype=bool))
    inside = dist <= radius_scale * thickness
    smoothed = np.where(inside, e.smoothed / relax, e.smoothed)
    return EnergyImage(smoothed, e.skeleton_layer), []


def init_contour(
    labels: np.ndarray,
    stroke: int,
    *,
    spacing: float = 3.0,
    close_radius: float = 3.0,
) -> Contour:
    """Closed contour along the boundary of the stroke's segmented region.

    Fragmented regions (crossings, multi-line styles) are morphologically
    closed before tracing; if fragments remain, the largest is traced.
    Tiny regions fall back to an 8-vertex ring.
    """
    mask = labels == stroke
    if not mask.any():
        raise ValueError(f"stroke {stroke} has no segmented pixels")
    if raster.component_count(mask) > 1:
        closed = raster.close_mask(mask, close_radius)
        mask = closed if closed.any() else mask
        if raster.component_count(mask) > 1:
            mask = raster.largest_component(mask)
    boundary = raster.moore_trace(mask)
    if len(boundary) < 8:
        cy, cx = ndimage.center_of_mass(mask)
        ang = np.linspace(0.0, 2 * np.pi, 8, endpoint=False)
        ring = np.rint(np.stack([cx + 1.5 * np.cos(ang), cy + 1.5 * np.sin(ang)], axis=1))
        h, w = labels.shape
        ring[:, 0] = np.clip(ring[:, 0], 0, w - 1)
        ring[:, 1] = np.clip(ring[:, 1], 0, h - 1)
        return Contour(ring)
    count = max(8, int(round(polygon_perimeter(boundary) / spacing)))
    verts = np.rint(resample_closed(boundary.astype(float), count))
    keep = np.any(verts != np.roll(verts, 1, axis=0), axis=1)
    if keep.sum() >= 8:
        verts = verts[keep]
    return Contour(verts)


def pin_point(c: Contour, q: tuple[float, float]) -> Contour:
    """Insert q into the contour at its nearest edge and pin it there."""
    v = c.vertices
    n = len(v)
    qa = np.array([float(q[0]), float(q[1])])
    best_edge = 0
    best_d = np.inf
    for k in range(n):
        d = float(segment_distance_sq(v[k], v[(k + 1) % n], qa[None, :])[0])
        if d < best_d:
            best_d = d
            best_edge = k
    qi = np.rint(qa)
    if np.array_equal(qi, v[best_edge]):
        pins = set(c.pinned) | {best_edge}
        return Contour(v, tuple(sorted(pins)))
    nxt = (best_edge + 1) % n
    if np.array_equal(qi, v[nxt]):
        pins = set(c.pinned) | {nxt}
        return Contour(v, tuple(sorted(pins)))
    out = np.insert(v, best_edge + 1, qi, axis=0)
    pins = {p if p <= best_edge else p + 1 for p in c.pinned}
    pins.add(best_edge + 1)
    return Contour(out, tuple(sorted(pins)))


def contour_energy(
    c: Contour,
    e: EnergyImage,
    *,
    alpha: float = 0.1,
    beta: float = 0.4,
    w_internal: float = 1.0,
    w_image: float = 1.0,
) -> float:
    """Total closed-contour energy under the greedy-descent model."""
    v = c.vertices
    img = e.values
    prev = np.roll(v, 1, axis=0)
    nxt = np.roll(v, -1, axis=0)
    stretch = ((v - prev) ** 2).sum(axis=1)
    bend = ((prev - 2 * v + nxt) ** 2).sum(axis=1)
    xi = v[:, 0].astype(int)
    yi = v[:, 1].astype(int)
    return float(w_internal * (alpha * stretch + beta * bend).sum() + w_image * img[yi, xi].sum())


def relax_contour(
    c: Contour,
    e: EnergyImage,
    *,
    alpha: float = 0.1,
    beta: float = 0.4,
    w_internal: float = 1.0,
    w_image: float = 1.0,
    max_iter: int = 200,
    stop_frac: float = 0.02,
) -> RelaxResult:
    """Greedy 3x3 descent over vertices in index order.

    A vertex moves only on a strict local-energy improvement, so the total
    energy is non-increasing sweep over sweep. Stops when fewer than
    stop_frac of the vertices moved in a sweep, or after max_iter sweeps.
    """
    img = e.values
    h, w = img.shape
    img_list = img.tolist()
    xs = [float(p[0]) for p in c.vertices]
    ys = [float(p[1]) for p in c.vertices]
    n = len(xs)
    pinned = set(c.pinned)
    energies = [contour_energy(c, e, alpha=alpha, beta=beta, w_internal=w_internal, w_image=w_image)]
    converged = False

    def local(i: int, px: float, py: float) -> float:
        im2, im1 = (i - 2) % n, (i - 1) % n
        ip1, ip2 = (i + 1) % n, (i + 2) % n
        ax, ay = xs[im1], ys[im1]
        bx, by = xs[ip1], ys[ip1]
        stretch = (px - ax) ** 2 + (py - ay) ** 2 + (bx - px) ** 2 + (by - py) ** 2
        c1x = xs[im2] - 2 * ax + px
        c1y = ys[im2] - 2 * ay + py
        c2x = ax - 2 * px + bx
        c2y = ay - 2 * py + by
        c3x = px - 2 * bx + xs[ip2]
        c3y = py - 2 * by + ys[ip2]
        bend = c1x * c1x + c1y * c1y + c2x * c2x + c2y * c2y + c3x * c3x + c3y * c3y
        return (
            w_internal * (alpha * stretch + beta * bend)
            + w_image * img_list[int(py)][int(px)]
        )

    for _ in range(max_iter):
        moved = 0
        for i in range(n):
            if i in pinned:
                continue
            x0, y0 = xs[i], ys[i]
            best = local(i, x0, y0)
            mx, my = x0, y0
            for dy in (-1, 0, 1):
                ny = y0 + dy
                if ny < 0 or ny >= h:
                    continue
                for dx in (-1, 0, 1):
                    if dx == 0 and dy == 0:
                        continue
                    nx = x0 + dx
                    if nx < 0 or nx >= w:
                        continue
                    cand = local(i, nx, ny)
                    if cand < best - 1e-12:
                        best = cand
                        mx, my = nx, ny
            if mx != x0 or my != y0:
                xs[i], ys[i] = mx, my
                moved += 1
        snap = Contour(np.stack([xs, ys], axis=1), tuple(sorted(pinned)))
        energies.append(
            contour_energy(snap, e, alpha=alpha, beta=beta, w_internal=w_internal, w_image=w_image)
        )
        if moved == 0 or moved < stop_frac * n:
            converged = True
            break
    final = Contour(np.stack([xs, ys], axis=1), tuple(sorted(pinned)))
    return RelaxResult(final, converged, tuple(energies))


def fill_contour(c: Contour, width: int, height: int) -> np.ndarray:
    img = Image.new("1", (width, height), 0)
    draw = ImageDraw.Draw(img)
    draw.polygon([(float(x), float(y)) for x, y in c.vertices], fill=1, outline=1)
    return np.asarray(img, dtype=bool)


def extract_stroke(sample: np.ndarray, c: Contour, labels: np.ndarray, stroke: int) -> np.ndarray:
    """Sample foreground inside the contour, keeping parts tied to the stroke."""
    h, w = sample.shape
    mask = binarize(sample) & fill_contour(c, w, h)
    if mask.any():
        lab, count = ndimage.label(mask, structure=raster.EIGHT)
        own = np.unique(lab[(labels == stroke) & mask])
        own = own[own > 0]
        if len(own):
            mask = np.isin(lab, own)
    if not mask.any():
        raise ValueError(f"stroke {stroke}: contour encloses no sample pixels")
    return np.where(mask, 255, 0).astype(np.uint8)


@dataclass(frozen=True)
class StrokeExtraction:
    mask: np.ndarray
    contour: Contour
    pins: tuple[tuple[float, float], ...]
    converged: bool
    energy: np.ndarray | None = None


def extract_glyph_strokes(
    sample: np.ndarray,
    g: Glyph,
    labels: np.ndarray,
    thickness: float,
    *,
    variance: float | None = None,
    relax: float = DEFAULT_RELAX,
    radius_scale: float = DEFAULT_RADIUS_SCALE,
    alpha: float = 0.1,
    beta: float = 0.4,
    w_internal: float = 1.0,
    w_image: float = 1.0,
    max_iter: int = 200,
    stop_frac: float = 0.02,
    spacing: float = 3.0,
    close_radius: float = 3.0,
    keep_energy: bool = False,
) -> list[StrokeExtraction]:
    """Run the full per-stroke extraction over one sample glyph."""
    if g.relations is None:
        raise ValueError("glyph needs relations before extraction")
    if variance is None:
        variance = (thickness / 2.0) ** 2
    h, w = sample.shape
    base = build_energy_image(sample, stamp_paths(g.strokes, w, h), variance)
    out: list[StrokeExtraction] = []
    for k in range(len(g.strokes)):
        energy = base
        pins: list[tuple[float, float]] = []
        for j, rel in enumerate(g.relations[k]):
            if rel is None or rel.kind == RelationKind.ISOLATED:
                continue
            other = labels == j if rel.kind in (RelationKind.CROSSING, RelationKind.CONNECTED) else None
            energy, new_pins = modify_energy(
                energy, rel, thickness, other, relax=relax, radius_scale=radius_scale
            )
            pins.extend(new_pins)
        contour = init_contour(labels, k, spacing=spacing, close_radius=close_radius)
        for q in pins:
            contour = pin_point(contour, q)
        result = relax_contour(
            contour,
            energy,
            alpha=alpha,
            beta=beta,
            w_internal=w_internal,
            w_image=w_image,
            max_iter=max_iter,
            stop_frac=stop_frac,
        )
        mask = extract_stroke(sample, result.contour, labels, k)
        out.append(
            StrokeExtraction(
                mask,
                result.contour,
                tuple(pins),
                result.converged,
                energy.values if keep_energy else None,
            )
        )
    return out
