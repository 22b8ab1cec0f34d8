"""Run configuration: one flat record plus a small key=value file format.

Config files hold one assignment per line ('key = value'), with blank
lines and '#' comments ignored. Values are coerced by the declared field
type: integer fields reject fractions, float fields accept either, string
fields take the raw text with optional surrounding quotes. Unknown or
repeated keys are errors that name the offending field.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError

SUPPORTED_POLICIES = ("greedy-3x3",)


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs and paths shared by every pipeline stage.

    Numeric defaults are the reference operating point: skeletons carry 32
    sample points, extraction relaxes contact zones by 2.0 and searches
    1.5 thickness radii, selection keeps 15 sample characters, canvases
    are 500x500 and evaluation runs at 100x100.
    """

    n_samples_per_skeleton: int = 32
    tau_max: int = 45
    beta1: float = 2.0  # contact-zone energy relaxation
    beta2: float = 1.5  # pin search radius, in thickness units
    gamma: float = 0.4  # occlusion blend weight during restoration
    alpha_snake: float = 0.1
    beta_snake: float = 0.4
    v_policy: str = "greedy-3x3"
    lambda_attr: float = 1.0
    alpha_selection: float = 0.6
    k_samples: int = 15
    canvas_size: int = 500
    eval_size: int = 100
    seed: int = 0
    jobs: int = 1
    dataset_dir: str = "dataset"
    samples_dir: str = "samples"
    adjusted_dir: str = "adjusted"
    store_dir: str = "store"
    output_dir: str = "output"
    truth_dir: str = "truth"
    report_dir: str = "report"

    def __post_init__(self):
        self._check("n_samples_per_skeleton", self.n_samples_per_skeleton >= 4, ">= 4")
        self._check("tau_max", self.tau_max >= 1, ">= 1")
        self._check("beta1", self.beta1 > 0, "> 0")
        self._check("beta2", self.beta2 > 0, "> 0")
        self._check("gamma", 0.0 <= self.gamma <= 1.0, "in [0, 1]")
        self._check("alpha_snake", self.alpha_snake > 0, "> 0")
        self._check("beta_snake", self.beta_snake >= 0, ">= 0")
        self._check("lambda_attr", self.lambda_attr >= 0, ">= 0")
        self._check("alpha_selection", 0.0 <= self.alpha_selection <= 1.0, "in [0, 1]")
        self._check("k_samples", self.k_samples >= 1, ">= 1")
        self._check("canvas_size", self.canvas_size >= 50, ">= 50")
        self._check("eval_size", self.eval_size >= 16, ">= 16")
        self._check("seed", self.seed >= 0, ">= 0")
        self._check("jobs", self.jobs >= 1, ">= 1")
        if self.v_policy not in SUPPORTED_POLICIES:
            raise ConfigError(
                f"v_policy must be one of {', '.join(SUPPORTED_POLICIES)}, got {self.v_policy!r}"
            )

    def _check(self, name: str, ok: bool, rule: str):
        if not ok:
            raise ConfigError(f"{name} must be {rule}, got {getattr(self, name)}")

    def path(self, name: str) -> Path:
        return Path(getattr(self, name))


_FIELDS = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(name: str, text: str, kind: str):
    if kind == "int":
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"{name} expects an integer, got {text!r}") from None
    if kind == "float":
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{name} expects a number, got {text!r}") from None
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def _strip_comment(value: str) -> str:
    # A '#' inside quotes is content, anywhere else it starts a comment.
    quote = None
    for i, ch in enumerate(value):
        if quote is None and ch in "\"'":
            quote = ch
        elif quote == ch:
            quote = None
        elif quote is None and ch == "#":
            return value[:i]
    return value


def parse_config(text: str, *, source: str | None = None) -> PipelineConfig:
    """PipelineConfig from key=value text; errors name the bad field."""
    where = f" in {source}" if source else ""
    seen: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}{where}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = _strip_comment(value).strip()
        if key not in _FIELDS:
            raise ConfigError(f"unknown config field {key!r}{where} (line {lineno})")
        if key in seen:
            raise ConfigError(f"duplicate config field {key!r}{where} (line {lineno})")
        if not value:
            raise ConfigError(f"{key} has no value{where} (line {lineno})")
        seen[key] = _coerce(key, value, _FIELDS[key])
    return PipelineConfig(**seen)


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))


def with_overrides(cfg: PipelineConfig, **overrides) -> PipelineConfig:
    """Copy with non-None overrides applied; unknown names are errors."""
    clean = {}
    for key, value in overrides.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown config field {key!r}")
        if value is not None:
            clean[key] = value
    return replace(cfg, **clean) if clean else cfg


def serialize_config(cfg: PipelineConfig) -> str:
    """Stable key=value text for reports and input fingerprints."""
    lines = []
    for f in fields(PipelineConfig):
        v = getattr(cfg, f.name)
        lines.append(f"{f.name} = {v!r}" if isinstance(v, str) else f"{f.name} = {v}")
    return "".join(line + "\n" for line in lines)
