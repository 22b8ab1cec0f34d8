"""Font extrapolation toolkit: stroke extraction, transfer, selection, evaluation."""

__version__ = "0.1.0"

from .glyphdata import Glyph, Skeleton, parse_glyph_file, parse_glyph_text, serialize_glyph
from .relations import Relation, RelationKind

__all__ = [
    "Glyph",
    "Skeleton",
    "Relation",
    "RelationKind",
    "parse_glyph_file",
    "parse_glyph_text",
    "serialize_glyph",
    "__version__",
]
