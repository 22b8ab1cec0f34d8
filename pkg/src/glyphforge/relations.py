"""Pairwise stroke relations within one glyph.

Two skeletons are related through the meeting point of their local
perpendiculars: for samples P_i on one stroke and P'_j on the other, take
the lines perpendicular to each path at those samples, intersect them at
Q, and score the pair by |Q - P_i| + |Q - P'_j|. The minimum over all
sample pairs gives the contact distance, the contact point, and the index
pair (i*, j*) locating the contact on each stroke.

The relation kind follows from where the contact sits on each stroke
(start and end zones are the outer 5% of sample indices) and whether the
distance clears 2 * (t + t'), with t the stroke thickness:

    continuous  end zone on both
    connecting  end zone on self, body on the other
    connected   body on self, end zone on the other
    crossing    body on both
    isolated    distance at or above the threshold (or no meeting point)

Relations are directional: if a relation is connecting, the reverse is
connected. Classification from skeletons alone can be wrong when strokes
brush past each other, so verify_relations cross-checks each pair against
the pixel segmentation of the sample image and flips mismatches, logging
one RELFIX line per corrected ordered pair.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import ndimage

from .errors import DataError
from .glyphdata import Glyph, distance_field_sq
from .imageio import binarize

# Outer fraction of sample indices counted as the start or end zone.
ZONE_FRACTION = 0.05
# Perpendiculars within this of parallel do not meet.
PARALLEL_EPS = 1e-6

_EIGHT = np.ones((3, 3), dtype=int)


class RelationKind(enum.Enum):
    CONTINUOUS = "continuous"
    CONNECTING = "connecting"
    CONNECTED = "connected"
    CROSSING = "crossing"
    ISOLATED = "isolated"

    def __str__(self) -> str:  # used in logs and store files
        return self.value


@dataclass(frozen=True)
class Relation:
    """Directional relation of one stroke toward another."""

    kind: RelationKind
    distance: float
    src_index: int
    dst_index: int
    contact: tuple[float, float] | None


def _perpendicular_dirs(xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit normals at each sample (rotated tangents) and a validity mask."""
    n = len(xy)
    tang = np.empty_like(xy)
    tang[1:-1] = xy[2:] - xy[:-2]
    tang[0] = xy[1] - xy[0]
    tang[-1] = xy[-1] - xy[-2]
    norm = np.linalg.norm(tang, axis=1)
    ok = norm > 1e-12
    tang = np.where(ok[:, None], tang / np.where(ok, norm, 1.0)[:, None], 0.0)
    perp = np.stack([-tang[:, 1], tang[:, 0]], axis=1)
    return perp, ok


def skeleton_distance(
    samples_a: np.ndarray, samples_b: np.ndarray
) -> tuple[float, int, int, tuple[float, float] | None]:
    """Contact distance between two sample matrices (3 x n homogeneous).

    Returns (distance, i, j, contact). distance is inf when no pair of
    perpendiculars meets; i and j are then -1 and contact is None. Ties
    resolve to the first (i, j) in row-major scan order. Coincident sample
    points count as a meeting at that point with zero added length.
    """
    pa = np.ascontiguousarray(samples_a[:2].T, dtype=float)
    pb = np.ascontiguousarray(samples_b[:2].T, dtype=float)
    na, ok_a = _perpendicular_dirs(pa)
    nb, ok_b = _perpendicular_dirs(pb)

    cross = na[:, None, 0] * nb[None, :, 1] - na[:, None, 1] * nb[None, :, 0]
    rhs = pb[None, :, :] - pa[:, None, :]
    rx, ry = rhs[..., 0], rhs[..., 1]
    # Solve P_i + s*na_i = P'_j + u*nb_j for the offsets s, u along each line.
    s_num = rx * nb[None, :, 1] - ry * nb[None, :, 0]
    u_num = rx * na[:, None, 1] - ry * na[:, None, 0]
    parallel = np.abs(cross) < PARALLEL_EPS
    safe = np.where(parallel, 1.0, cross)
    d = np.abs(s_num / safe) + np.abs(u_num / safe)

    gap = np.linalg.norm(rhs, axis=2)
    coincident = gap < 1e-9
    d = np.where(parallel, np.inf, d)
    d = np.where(coincident, 0.0, d)
    valid = (ok_a[:, None] & ok_b[None, :]) | coincident
    d = np.where(valid, d, np.inf)

    flat = int(np.argmin(d))
    i, j = divmod(flat, d.shape[1])
    best = float(d[i, j])
    if not np.isfinite(best):
        return (np.inf, -1, -1, None)
    if coincident[i, j]:
        q = (float(pa[i, 0]), float(pa[i, 1]))
    else:
        s = s_num[i, j] / cross[i, j]
        q = (float(pa[i, 0] + s * na[i, 0]), float(pa[i, 1] + s * na[i, 1]))
    return (best, int(i), int(j), q)


def contact_zone(index: int, count: int) -> str:
    """'start', 'end', or 'body' for a sample index against the zone fractions."""
    r = index / count
    if r < ZONE_FRACTION:
        return "start"
    if r > 1.0 - ZONE_FRACTION:
        return "end"
    return "body"


def assign_relation(
    samples_a: np.ndarray,
    samples_b: np.ndarray,
    thickness_a: float,
    thickness_b: float,
) -> Relation:
    d, i, j, q = skeleton_distance(samples_a, samples_b)
    if not np.isfinite(d) or d >= 2.0 * (thickness_a + thickness_b):
        return Relation(RelationKind.ISOLATED, d, i, j, q)
    za = contact_zone(i, samples_a.shape[1])
    zb = contact_zone(j, samples_b.shape[1])
    if za != "body" and zb != "body":
        kind = RelationKind.CONTINUOUS
    elif za != "body":
        kind = RelationKind.CONNECTING
    elif zb != "body":
        kind = RelationKind.CONNECTED
    else:
        kind = RelationKind.CROSSING
    return Relation(kind, d, i, j, q)


def assign_all(g: Glyph, thickness: float) -> Glyph:
    """Glyph with the full directional relation matrix filled in."""
    n = len(g.strokes)
    rows = []
    for i in range(n):
        row: list[Relation | None] = []
        for j in range(n):
            if i == j:
                row.append(None)
            else:
                row.append(
                    assign_relation(
                        g.strokes[i].samples, g.strokes[j].samples, thickness, thickness
                    )
                )
        rows.append(tuple(row))
    return g.with_relations(tuple(rows))


def estimate_thickness(sample: np.ndarray, g: Glyph, t_max: int | None = None) -> int:
    """Thickness whose rendering of g best matches the sample (Hamming argmin).

    The glyph must already sit in the sample's pixel coordinates. Scans
    every integer thickness in [1, t_max]; ties resolve to the smallest.
    """
    fg = binarize(sample)
    if not fg.any():
        raise DataError("blank sample image")
    if not g.strokes:
        raise DataError("glyph has no strokes")
    h, w = sample.shape
    if t_max is None:
        t_max = max(1, min(w, h) // 4)
    field = distance_field_sq(g.strokes, w, h)
    fg_vals = np.sort(field[fg], kind="stable")
    bg_vals = np.sort(field[~fg], kind="stable")
    taus = np.arange(1, t_max + 1)
    t_sq = taus.astype(float) ** 2
    inside_fg = np.searchsorted(fg_vals, t_sq, side="right")
    inside_bg = np.searchsorted(bg_vals, t_sq, side="right")
    hamming = (len(fg_vals) - inside_fg) + inside_bg
    return int(taus[int(np.argmin(hamming))])


def segment_pixels(sample: np.ndarray, g: Glyph) -> np.ndarray:
    """Label each foreground pixel with its nearest stroke.

    Distance is Euclidean to the stroke's sample points; ties go to the
    lowest stroke index. Background pixels get -1.
    """
    if not g.strokes:
        raise DataError("glyph has no strokes")
    fg = binarize(sample)
    labels = np.full(sample.shape, -1, dtype=np.int32)
    ys, xs = np.nonzero(fg)
    if len(ys) == 0:
        return labels
    pix = np.stack([xs, ys], axis=1).astype(float)
    best = np.full(len(pix), np.inf)
    owner = np.zeros(len(pix), dtype=np.int32)
    for k, s in enumerate(g.strokes):
        pts = s.sample_xy
        d2 = ((pix[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2).min(axis=1)
        take = d2 < best
        best[take] = d2[take]
        owner[take] = k
    labels[ys, xs] = owner
    return labels


def verify_relations(
    g: Glyph, labels: np.ndarray, *, glyph_name: str | None = None
) -> tuple[Glyph, list[str]]:
    """Cross-check relations against pixel connectivity and flip mismatches.

    For each stroke pair, label the 8-connected components of the union of
    their two pixel sets: related pairs must share a component, isolated
    pairs must not. A raw component count would misfire on glyphs with
    three or more strokes, where a third stroke's label band can split one
    member into pieces. Isolated mismatches become crossing; related
    mismatches become isolated. Returns the corrected glyph and RELFIX
    log lines.
    """
    if g.relations is None:
        raise ValueError("glyph has no relations to verify")
    name = glyph_name or g.name
    rel = [list(row) for row in g.relations]
    log: list[str] = []
    n = len(g.strokes)
    for i in range(n):
        for j in range(i + 1, n):
            mask_i = labels == i
            mask_j = labels == j
            if not mask_i.any() or not mask_j.any():
                continue
            comp, _ = ndimage.label(mask_i | mask_j, structure=_EIGHT)
            touching = bool(np.intersect1d(comp[mask_i], comp[mask_j]).size)
            isolated = rel[i][j].kind == RelationKind.ISOLATED
            if isolated and touching:
                new_kind = RelationKind.CROSSING
            elif not isolated and not touching:
                new_kind = RelationKind.ISOLATED
            else:
                continue
            for a, b in ((i, j), (j, i)):
                old = rel[a][b].kind
                rel[a][b] = replace(rel[a][b], kind=new_kind)
                log.append(f"RELFIX {name} {a} {b} {old} {new_kind}")
    return g.with_relations(tuple(tuple(row) for row in rel)), log


def relation_counts(g: Glyph) -> tuple[int, int]:
    """(crossing, connected-family) counts over ordered stroke pairs."""
    if g.relations is None:
        raise ValueError("glyph has no relations")
    n_cross = 0
    n_con = 0
    for row in g.relations:
        for r in row:
            if r is None:
                continue
            if r.kind == RelationKind.CROSSING:
                n_cross += 1
            elif r.kind in (
                RelationKind.CONTINUOUS,
                RelationKind.CONNECTING,
                RelationKind.CONNECTED,
            ):
                n_con += 1
    return n_cross, n_con
