"""Error types shared across the package.

The CLI maps these onto exit codes: usage problems exit 1, data problems
(parse failures, missing files, bad config) exit 2, anything else exit 3.
"""


class GlyphForgeError(Exception):
    """Base class for all package-specific failures."""


class ParseError(GlyphForgeError):
    """Malformed glyph file. Carries the offending line number when known."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ConfigError(GlyphForgeError):
    """Invalid or unknown configuration field."""


class DataError(GlyphForgeError):
    """Inputs exist but are unusable (missing pairs, empty stores, bad images)."""
