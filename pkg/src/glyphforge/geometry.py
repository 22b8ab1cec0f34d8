"""Small geometry helpers used across modules. All points are (x, y) float64."""

from __future__ import annotations

import numpy as np

# Segments per quadratic curve when flattening to a polyline. High enough that
# the sagitta error is far below a pixel for design-grid sized curves.
FLATTEN_STEPS = 64


def quad_bezier(p0, p1, p2, ts: np.ndarray) -> np.ndarray:
    """Evaluate a quadratic Bezier at parameters ts. Returns (len(ts), 2)."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    t = np.asarray(ts, dtype=float)[:, None]
    u = 1.0 - t
    return u * u * p0 + 2.0 * u * t * p1 + t * t * p2


def cubic_bezier(ctrl, ts: np.ndarray) -> np.ndarray:
    """Evaluate a cubic Bezier (4 control points) at parameters ts."""
    c = np.asarray(ctrl, dtype=float)
    t = np.asarray(ts, dtype=float)[:, None]
    u = 1.0 - t
    return (
        u * u * u * c[0]
        + 3.0 * u * u * t * c[1]
        + 3.0 * u * t * t * c[2]
        + t * t * t * c[3]
    )


def cum_lengths(pts: np.ndarray) -> np.ndarray:
    """Cumulative arc length along a polyline, starting at 0."""
    d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(d)])


def resample_polyline(pts: np.ndarray, n: int) -> np.ndarray:
    """n points uniformly spaced by arc length along an open polyline.

    Endpoints are preserved exactly. A zero-length polyline repeats its
    first point.
    """
    pts = np.asarray(pts, dtype=float)
    if n < 1:
        raise ValueError("need at least one sample")
    if n == 1:
        return pts[:1].copy()
    cl = cum_lengths(pts)
    total = cl[-1]
    if total <= 0.0:
        return np.repeat(pts[:1], n, axis=0)
    targets = np.linspace(0.0, total, n)
    idx = np.clip(np.searchsorted(cl, targets, side="right") - 1, 0, len(pts) - 2)
    seg_len = cl[idx + 1] - cl[idx]
    w = np.where(seg_len > 0, (targets - cl[idx]) / np.where(seg_len > 0, seg_len, 1.0), 0.0)
    out = pts[idx] + w[:, None] * (pts[idx + 1] - pts[idx])
    out[0] = pts[0]
    out[-1] = pts[-1]
    return out


def resample_closed(pts: np.ndarray, n: int) -> np.ndarray:
    """n points uniformly spaced along a closed polyline (last != first in input)."""
    pts = np.asarray(pts, dtype=float)
    loop = np.vstack([pts, pts[:1]])
    cl = cum_lengths(loop)
    total = cl[-1]
    if total <= 0.0:
        return np.repeat(pts[:1], n, axis=0)
    targets = np.linspace(0.0, total, n, endpoint=False)
    idx = np.clip(np.searchsorted(cl, targets, side="right") - 1, 0, len(loop) - 2)
    seg_len = cl[idx + 1] - cl[idx]
    w = np.where(seg_len > 0, (targets - cl[idx]) / np.where(seg_len > 0, seg_len, 1.0), 0.0)
    return loop[idx] + w[:, None] * (loop[idx + 1] - loop[idx])


def segment_distance_sq(a, b, pts: np.ndarray) -> np.ndarray:
    """Squared distance from each point in pts to segment ab."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pts = np.asarray(pts, dtype=float)
    ab = b - a
    denom = float(ab @ ab)
    if denom <= 0.0:
        d = pts - a
        return np.einsum("...i,...i->...", d, d)
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[..., None] * ab
    d = pts - proj
    return np.einsum("...i,...i->...", d, d)


def polyline_min_dist_sq(poly: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Squared distance from each point in pts to the nearest polyline segment."""
    poly = np.asarray(poly, dtype=float)
    if len(poly) == 1:
        d = np.asarray(pts, dtype=float) - poly[0]
        return np.einsum("...i,...i->...", d, d)
    best = None
    for k in range(len(poly) - 1):
        dk = segment_distance_sq(poly[k], poly[k + 1], pts)
        best = dk if best is None else np.minimum(best, dk)
    return best


def polygon_perimeter(pts: np.ndarray) -> float:
    """Perimeter of a closed polygon given without the repeated last vertex."""
    pts = np.asarray(pts, dtype=float)
    loop = np.vstack([pts, pts[:1]])
    return float(np.sum(np.linalg.norm(np.diff(loop, axis=0), axis=1)))


def make_affine(linear: np.ndarray, shift) -> np.ndarray:
    """Build a 3x3 homogeneous matrix from a 2x2 linear part and a translation."""
    m = np.eye(3)
    m[:2, :2] = np.asarray(linear, dtype=float)
    m[:2, 2] = np.asarray(shift, dtype=float)
    return m


def rotation_about(theta: float, center) -> np.ndarray:
    """Homogeneous rotation by theta radians about a center point."""
    c, s = np.cos(theta), np.sin(theta)
    cx, cy = float(center[0]), float(center[1])
    r = np.array([[c, -s], [s, c]])
    shift = np.array([cx, cy]) - r @ np.array([cx, cy])
    return make_affine(r, shift)
