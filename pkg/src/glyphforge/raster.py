"""Binary raster utilities: tracing, components, thinning, PNG I/O."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

EIGHT = np.ones((3, 3), dtype=int)

# Clockwise Moore neighborhood in image coordinates (y grows downward).
_MOORE = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]


def save_mask(image: np.ndarray, path: str | Path) -> Path:
    """Write a bool or uint8 image as an 8-bit grayscale PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = np.asarray(image)
    if arr.dtype == bool:
        arr = np.where(arr, 255, 0)
    Image.fromarray(arr.astype(np.uint8), mode="L").save(path, format="PNG")
    return path


def load_gray(path: str | Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def disk(radius: float) -> np.ndarray:
    r = int(np.ceil(radius))
    y, x = np.mgrid[-r : r + 1, -r : r + 1]
    return (x * x + y * y) <= radius * radius


def largest_component(mask: np.ndarray) -> np.ndarray:
    lab, n = ndimage.label(mask, structure=EIGHT)
    if n <= 1:
        return mask.astype(bool)
    counts = np.bincount(lab.ravel())
    counts[0] = 0
    return lab == int(np.argmax(counts))


def component_count(mask: np.ndarray) -> int:
    return int(ndimage.label(mask, structure=EIGHT)[1])


def close_mask(mask: np.ndarray, radius: float) -> np.ndarray:
    if radius <= 0:
        return mask.astype(bool)
    return ndimage.binary_closing(mask, structure=disk(radius))


def moore_trace(mask: np.ndarray) -> np.ndarray:
    """Ordered outer boundary pixels of a connected region, as (k, 2) (x, y).

    Clockwise Moore-neighbor tracing from the topmost-leftmost pixel,
    stopping when the start pixel is re-entered the same way. A single
    pixel traces to itself.
    """
    mask = np.asarray(mask, dtype=bool)
    ys, xs = np.nonzero(mask)
    if len(ys) == 0:
        raise ValueError("empty region")
    start = (int(xs[ys.argmin()]), int(ys.min()))
    # Several pixels can share the minimal row; take the leftmost of them.
    row = ys == ys.min()
    start = (int(xs[row].min()), int(ys.min()))

    h, w = mask.shape

    def fg(p):
        x, y = p
        return 0 <= x < w and 0 <= y < h and mask[y, x]

    # Entry direction: coming from the left neighbor (background by scan order).
    boundary = [start]
    prev_dir = _MOORE.index((-1, 0))  # direction pointing at the backtrack pixel
    cur = start
    first_move: tuple[int, int] | None = None
    limit = 4 * (len(ys) + 1) * 8
    for _ in range(limit):
        found = None
        for step in range(1, 9):
            d = (prev_dir + step) % 8
            cand = (cur[0] + _MOORE[d][0], cur[1] + _MOORE[d][1])
            if fg(cand):
                found = (cand, d)
                break
        if found is None:
            return np.array(boundary, dtype=int)  # isolated pixel
        nxt, d = found
        if cur == start:
            if first_move is None:
                first_move = nxt
            elif nxt == first_move:
                break  # closed the loop the same way it began
        boundary.append(nxt)
        prev_dir = (d + 4) % 8  # backtrack now points at the previous pixel
        cur = nxt
        if cur == start:
            # Re-scan from this entry; loop closes when the first move repeats.
            continue
    else:
        raise RuntimeError("boundary trace did not close")
    boundary.pop()  # drop the duplicated start at the end of the loop
    return np.array(boundary, dtype=int)


def thin(mask: np.ndarray) -> np.ndarray:
    """Zhang-Suen thinning to a 1 px wide medial skeleton."""
    img = np.asarray(mask, dtype=bool).copy()

    def neighbors(a):
        p = np.pad(a, 1, mode="constant").astype(np.uint8)
        p2 = p[:-2, 1:-1]
        p3 = p[:-2, 2:]
        p4 = p[1:-1, 2:]
        p5 = p[2:, 2:]
        p6 = p[2:, 1:-1]
        p7 = p[2:, :-2]
        p8 = p[1:-1, :-2]
        p9 = p[:-2, :-2]
        return p2, p3, p4, p5, p6, p7, p8, p9

    while True:
        changed = False
        for phase in (0, 1):
            p2, p3, p4, p5, p6, p7, p8, p9 = neighbors(img)
            ring = [p2, p3, p4, p5, p6, p7, p8, p9, p2]
            b = sum(x.astype(int) for x in ring[:8])
            a = sum(((ring[k] == 0) & (ring[k + 1] == 1)).astype(int) for k in range(8))
            cond = img & (b >= 2) & (b <= 6) & (a == 1)
            if phase == 0:
                cond &= (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
            else:
                cond &= (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
            if cond.any():
                img[cond] = False
                changed = True
        if not changed:
            return img
