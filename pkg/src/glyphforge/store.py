"""Stroke asset store: a directory of PNG masks with text sidecars.

Each asset is two files named after its id ('U+E000_s00'): the stroke
mask as an 8-bit PNG and a sidecar describing where it came from:

    GLYPHFORGE-ASSET 1
    SOURCE U+E000 0 2 7
    SKELETON <lt> <ss> <es> <x> <y> ...
    DATASET <lt> <ss> <es> <x> <y> ...
    CONTEXT start <stroke fields or ->
    CONTEXT end <stroke fields or ->

SOURCE holds the source codepoint, stroke index, the source glyph's
stroke count, and the estimated thickness; the count lets a reader tell
a complete store from one that lost files.
SKELETON is the adjusted skeleton in sample canvas pixels, DATASET the
matching design-grid skeleton, and the CONTEXT lines give the start and
end neighbor skeletons on the design grid ('-' when there is none).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .assembly import StrokeAsset
from .errors import DataError
from .glyphdata import (
    DEFAULT_SAMPLE_COUNT,
    Skeleton,
    parse_stroke_fields,
    serialize_stroke,
)
from .raster import load_gray, save_mask

MAGIC = "GLYPHFORGE-ASSET 1"


@dataclass(frozen=True)
class StoredAsset:
    """A stroke asset plus its source bookkeeping."""

    asset: StrokeAsset
    codepoint: int
    stroke_index: int
    stroke_count: int
    thickness: int

    @property
    def source_name(self) -> str:
        return f"U+{self.codepoint:04X}"


def asset_id(codepoint: int, stroke_index: int) -> str:
    return f"U+{codepoint:04X}_s{stroke_index:02d}"


def _context_field(s: Skeleton | None) -> str:
    return serialize_stroke(s) if s is not None else "-"


def write_asset(directory: str | Path, item: StoredAsset) -> tuple[Path, Path]:
    """Write the mask PNG and sidecar; returns both paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    a = item.asset
    png = save_mask(a.image, directory / f"{a.asset_id}.png")
    lines = [
        MAGIC,
        f"SOURCE {item.source_name} {item.stroke_index} {item.stroke_count} {item.thickness}",
        f"SKELETON {serialize_stroke(a.source_skeleton)}",
        f"DATASET {serialize_stroke(a.dataset_skeleton)}",
        f"CONTEXT start {_context_field(a.context[0])}",
        f"CONTEXT end {_context_field(a.context[1])}",
    ]
    sidecar = directory / f"{a.asset_id}.txt"
    sidecar.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return png, sidecar


def _parse_context(fields: list[str], sample_count: int, where: str) -> Skeleton | None:
    if fields == ["-"]:
        return None
    try:
        return parse_stroke_fields(fields, sample_count=sample_count)
    except ValueError as exc:
        raise DataError(f"{where}: {exc}") from exc


def read_asset(
    sidecar: str | Path, *, sample_count: int = DEFAULT_SAMPLE_COUNT
) -> StoredAsset:
    sidecar = Path(sidecar)
    lines = [
        line.strip()
        for line in sidecar.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if not lines or lines[0] != MAGIC:
        raise DataError(f"{sidecar}: not a stroke asset sidecar")
    rows: dict[str, list[str]] = {}
    for line in lines[1:]:
        tokens = line.split()
        key = tokens[0] if tokens[0] != "CONTEXT" else f"CONTEXT-{tokens[1]}"
        if key in rows:
            raise DataError(f"{sidecar}: repeated {key} line")
        rows[key] = tokens[1:] if tokens[0] != "CONTEXT" else tokens[2:]
    missing = [k for k in ("SOURCE", "SKELETON", "DATASET", "CONTEXT-start", "CONTEXT-end") if k not in rows]
    if missing:
        raise DataError(f"{sidecar}: missing {', '.join(missing)}")
    src = rows["SOURCE"]
    if len(src) != 4 or not src[0].startswith("U+"):
        raise DataError(f"{sidecar}: malformed SOURCE line")
    try:
        cp = int(src[0][2:], 16)
        stroke_index = int(src[1])
        stroke_count = int(src[2])
        thickness = int(src[3])
        source = parse_stroke_fields(rows["SKELETON"], sample_count=sample_count)
        dataset = parse_stroke_fields(rows["DATASET"], sample_count=sample_count)
    except ValueError as exc:
        raise DataError(f"{sidecar}: {exc}") from exc
    if not 0 <= stroke_index < stroke_count:
        raise DataError(
            f"{sidecar}: stroke index {stroke_index} outside count {stroke_count}"
        )
    context = (
        _parse_context(rows["CONTEXT-start"], sample_count, f"{sidecar}: CONTEXT start"),
        _parse_context(rows["CONTEXT-end"], sample_count, f"{sidecar}: CONTEXT end"),
    )
    png = sidecar.with_suffix(".png")
    if not png.is_file():
        raise DataError(f"{sidecar}: stroke image {png.name} is missing")
    image = load_gray(png)
    asset = StrokeAsset(sidecar.stem, image, source, dataset, context)
    return StoredAsset(asset, cp, stroke_index, stroke_count, thickness)


def load_store(
    directory: str | Path, *, sample_count: int = DEFAULT_SAMPLE_COUNT
) -> list[StoredAsset]:
    """All assets in the directory, ordered by codepoint then stroke index."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"asset store not found: {directory}")
    items = [
        read_asset(p, sample_count=sample_count)
        for p in sorted(directory.glob("U+*.txt"))
    ]
    items.sort(key=lambda it: (it.codepoint, it.stroke_index))
    return items
