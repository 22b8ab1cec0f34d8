"""Pipeline stages over glyph directories: select, extract, generate, eval.

Each stage reads and writes plain files so runs are inspectable and
restartable: a stage hashes its inputs into a fingerprint, writes a
manifest listing every product file with its content hash, and skips all
work on rerun when the fingerprint and product hashes still match. Stage
logs are delimited files stored next to the products, so a skipped stage
can still report what it did.

Per-glyph work runs on a bounded worker pool. Results are collected and
written in codepoint order, so output bytes never depend on scheduling.
"""

from __future__ import annotations

import csv
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .assembly import (
    StrokeAsset,
    TargetStroke,
    center_translation,
    compose_glyph,
    estimate_size_transform,
    estimate_style_transform,
    group_skeletons,
    resolve_contexts,
    select_stroke,
    transform_skeleton,
)
from .config import PipelineConfig, serialize_config
from .errors import DataError, GlyphForgeError
from .evaluation import image_chamfer, recognize
from .extraction import extract_glyph_strokes
from .glyphdata import Glyph, parse_glyph_file
from .raster import load_gray, save_mask
from .relations import (
    RelationKind,
    assign_all,
    estimate_thickness,
    segment_pixels,
    verify_relations,
)
from .restoration import restore_stroke
from .selection import CandidateSet, GenerationStats, SampleSelector, run_ga, validation_char
from .store import StoredAsset, asset_id, load_store, write_asset

# Dataset glyphs are centerlines; relations on the design grid use a
# nominal pen radius so contexts are defined before any style is known.
DATASET_THICKNESS = 4.0
# Contact radius for grouping size-normalized strokes before the style fit.
GROUP_THICKNESS = 4.0

MANIFEST_MAGIC = "GLYPHFORGE-MANIFEST 1"

T = TypeVar("T")
U = TypeVar("U")


# --- content hashing and manifests ---------------------------------------


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _sha256_file(path: Path) -> str:
    return _sha256_bytes(path.read_bytes())


def fingerprint(lines: Iterable[str]) -> str:
    return _sha256_bytes("".join(line + "\n" for line in lines).encode("utf-8"))


def write_manifest(manifest: Path, fp: str, files: Sequence[Path]) -> Path:
    base = manifest.parent
    rows = sorted(p.relative_to(base).as_posix() for p in files)
    lines = [MANIFEST_MAGIC, f"FINGERPRINT {fp}"]
    lines += [f"FILE {_sha256_file(base / name)} {name}" for name in rows]
    manifest.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return manifest


def manifest_matches(manifest: Path, fp: str) -> bool:
    """True when the manifest carries this fingerprint and every listed
    product still hashes to its recorded value."""
    if not manifest.is_file():
        return False
    lines = manifest.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != MANIFEST_MAGIC:
        return False
    if len(lines) < 2 or lines[1] != f"FINGERPRINT {fp}":
        return False
    for line in lines[2:]:
        if not line:
            continue
        tokens = line.split(maxsplit=2)
        if len(tokens) != 3 or tokens[0] != "FILE":
            return False
        product = manifest.parent / tokens[2]
        if not product.is_file() or _sha256_file(product) != tokens[1]:
            return False
    return True


def clear_manifested(manifest: Path) -> None:
    """Remove the products listed by a stale manifest, then the manifest."""
    if not manifest.is_file():
        return
    for line in manifest.read_text(encoding="utf-8").splitlines():
        tokens = line.split(maxsplit=2)
        if len(tokens) == 3 and tokens[0] == "FILE":
            (manifest.parent / tokens[2]).unlink(missing_ok=True)
    manifest.unlink()


# --- shared helpers -------------------------------------------------------

_PATH_FIELDS = tuple(f.name for f in fields(PipelineConfig) if f.name.endswith("_dir"))


def _config_lines(cfg: PipelineConfig) -> list[str]:
    from . import __version__

    skip = set(_PATH_FIELDS) | {"jobs"}
    lines = [f"version {__version__}"]
    lines += [
        line
        for line in serialize_config(cfg).splitlines()
        if line.split(" = ")[0] not in skip
    ]
    return lines


def _cp_name(cp: int) -> str:
    return f"U+{cp:04X}"


def _parse_cp(path: Path) -> int:
    try:
        return int(path.stem[2:], 16)
    except ValueError:
        raise DataError(f"file name {path.name} is not U+<hex>") from None


def _scan(directory: Path, pattern: str, what: str) -> dict[int, Path]:
    if not directory.is_dir():
        raise DataError(f"{what} directory not found: {directory}")
    return {_parse_cp(p): p for p in sorted(directory.glob(pattern))}


def _pool_map(fn: Callable[[T], U], items: Sequence[T], jobs: int) -> list[U]:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _read_rows(path: Path) -> list[list[str]]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[1:]  # drop the header


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(list(row))
    return path


# --- extract ---------------------------------------------------------------


@dataclass(frozen=True)
class ExtractCharRow:
    name: str
    thickness: int
    strokes: int
    restored: int
    relfixes: int
    converged: int


@dataclass(frozen=True)
class ExtractResult:
    store_dir: Path
    rows: tuple[ExtractCharRow, ...]
    skipped: bool

    @property
    def n_assets(self) -> int:
        return sum(r.strokes for r in self.rows)


def _union_other(labels: np.ndarray, others: Sequence[int]) -> np.ndarray | None:
    if not others:
        return None
    mask = np.zeros(labels.shape, dtype=bool)
    for j in others:
        mask |= labels == j
    return mask


def _extract_char(cfg: PipelineConfig, cp: int, sample_path: Path, adjusted_path: Path, dataset_path: Path):
    name = _cp_name(cp)
    try:
        sample = load_gray(sample_path)
    except OSError as exc:
        raise DataError(f"unreadable sample image {sample_path}: {exc}") from exc
    adjusted = parse_glyph_file(adjusted_path, sample_count=cfg.n_samples_per_skeleton)
    dataset_g = parse_glyph_file(dataset_path, sample_count=cfg.n_samples_per_skeleton)
    if len(adjusted.strokes) != len(dataset_g.strokes):
        raise DataError(
            f"{name}: adjusted glyph has {len(adjusted.strokes)} strokes,"
            f" dataset has {len(dataset_g.strokes)}"
        )
    if not adjusted.strokes:
        raise DataError(f"{name}: glyph has no strokes")
    thickness = estimate_thickness(sample, adjusted, cfg.tau_max)
    rel = assign_all(adjusted, float(thickness))
    labels = segment_pixels(sample, adjusted)
    rel, fixes = verify_relations(rel, labels, glyph_name=name)
    extractions = extract_glyph_strokes(
        sample,
        rel,
        labels,
        float(thickness),
        relax=cfg.beta1,
        radius_scale=cfg.beta2,
        alpha=cfg.alpha_snake,
        beta=cfg.beta_snake,
    )
    contexts = resolve_contexts(assign_all(dataset_g, DATASET_THICKNESS))
    items = []
    restored_count = 0
    for k, ext in enumerate(extractions):
        related = [
            j
            for j, r in enumerate(rel.relations[k])
            if r is not None and r.kind != RelationKind.ISOLATED
        ]
        image = ext.mask
        if related:
            # Only occluded strokes need vector repair; isolated ink is
            # kept as sampled so hollow styles survive unchanged.
            try:
                image, _ = restore_stroke(
                    ext.mask,
                    _union_other(labels, related),
                    float(thickness),
                    gamma=cfg.gamma,
                    samples=cfg.n_samples_per_skeleton,
                )
                restored_count += 1
            except (GlyphForgeError, ValueError):
                image = ext.mask
        asset = StrokeAsset(
            asset_id(cp, k),
            image,
            adjusted.strokes[k],
            dataset_g.strokes[k],
            contexts[k],
        )
        items.append(StoredAsset(asset, cp, k, len(extractions), thickness))
    row = ExtractCharRow(
        name,
        thickness,
        len(items),
        restored_count,
        len(fixes),
        sum(1 for e in extractions if e.converged),
    )
    return row, items


def cmd_extract(cfg: PipelineConfig, only: Sequence[int] | None = None) -> ExtractResult:
    """Build the stroke asset store from sample images and adjusted glyphs."""
    samples = _scan(cfg.path("samples_dir"), "U+*.png", "samples")
    if not samples:
        raise DataError(f"no sample images in {cfg.path('samples_dir')}")
    adjusted = _scan(cfg.path("adjusted_dir"), "U+*.gd", "adjusted glyph")
    dataset = _scan(cfg.path("dataset_dir"), "U+*.gd", "dataset")
    cps = sorted(samples)
    if only is not None:
        wanted = set(only)
        missing = sorted(wanted - set(samples))
        if missing:
            raise DataError(
                "selected characters have no sample image: "
                + ", ".join(_cp_name(c) for c in missing)
            )
        cps = sorted(wanted)
    missing = sorted(
        {cp for cp in cps if cp not in adjusted} | {cp for cp in cps if cp not in dataset}
    )
    if missing:
        raise DataError(
            "samples without a matching adjusted and dataset glyph: "
            + ", ".join(_cp_name(c) for c in missing)
        )

    store_dir = cfg.path("store_dir")
    manifest = store_dir / "MANIFEST.txt"
    fp_lines = ["stage extract", *_config_lines(cfg)]
    for cp in cps:
        name = _cp_name(cp)
        fp_lines.append(f"sample {name} {_sha256_file(samples[cp])}")
        fp_lines.append(f"adjusted {name} {_sha256_file(adjusted[cp])}")
        fp_lines.append(f"dataset {name} {_sha256_file(dataset[cp])}")
    fp = fingerprint(fp_lines)
    log_path = store_dir / "extract.csv"
    if manifest_matches(manifest, fp):
        rows = tuple(
            ExtractCharRow(r[0], int(r[1]), int(r[2]), int(r[3]), int(r[4]), int(r[5]))
            for r in _read_rows(log_path)
        )
        return ExtractResult(store_dir, rows, skipped=True)
    clear_manifested(manifest)

    results = _pool_map(
        lambda cp: _extract_char(cfg, cp, samples[cp], adjusted[cp], dataset[cp]),
        cps,
        cfg.jobs,
    )
    store_dir.mkdir(parents=True, exist_ok=True)
    products: list[Path] = []
    rows = []
    for row, items in results:
        rows.append(row)
        for item in items:
            png, sidecar = write_asset(store_dir, item)
            products += [png, sidecar]
    products.append(
        _write_rows(
            log_path,
            ("codepoint", "thickness", "strokes", "restored", "relfixes", "converged"),
            [(r.name, r.thickness, r.strokes, r.restored, r.relfixes, r.converged) for r in rows],
        )
    )
    write_manifest(manifest, fp, products)
    return ExtractResult(store_dir, tuple(rows), skipped=False)


# --- generate ---------------------------------------------------------------


@dataclass(frozen=True)
class PickRow:
    target: str
    stroke: int
    asset: str
    energy: float


@dataclass(frozen=True)
class GenerateResult:
    output_dir: Path
    generated: tuple[str, ...]
    picks: tuple[PickRow, ...]
    errors: tuple[str, ...]
    skipped: bool


def _store_glyph_pairs(items: Sequence[StoredAsset]) -> list[tuple[int, Glyph, Glyph]]:
    """Rebuild (codepoint, dataset glyph, adjusted glyph) per source character."""
    by_cp: dict[int, list[StoredAsset]] = {}
    for item in items:
        by_cp.setdefault(item.codepoint, []).append(item)
    out = []
    for cp in sorted(by_cp):
        members = sorted(by_cp[cp], key=lambda it: it.stroke_index)
        indices = [it.stroke_index for it in members]
        expected = members[0].stroke_count
        if any(it.stroke_count != expected for it in members) or indices != list(
            range(expected)
        ):
            raise DataError(
                f"store is missing strokes of {_cp_name(cp)}:"
                f" have {indices}, expected {expected}"
            )
        ds = Glyph(cp, tuple(it.asset.dataset_skeleton for it in members))
        adj = Glyph(cp, tuple(it.asset.source_skeleton for it in members))
        out.append((cp, ds, adj))
    return out


def estimate_transforms(
    items: Sequence[StoredAsset], canvas_size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Size and style matrices estimated from a store's sample characters."""
    triples = _store_glyph_pairs(items)
    t_sz = estimate_size_transform(
        [(ds, adj) for _, ds, adj in triples], canvas_size, canvas_size
    )
    pairs = []
    for _, ds, adj in triples:
        base = ds.transformed(t_sz @ center_translation(ds))
        base = base.with_relations(assign_all(base, GROUP_THICKNESS).relations)
        base = base.with_groups(group_skeletons(base))
        pairs.append((base, adj))
    return t_sz, estimate_style_transform(pairs)


def _target_strokes(
    dataset_g: Glyph, t_sz: np.ndarray, t_aff: np.ndarray
) -> list[TargetStroke]:
    contexts = resolve_contexts(assign_all(dataset_g, DATASET_THICKNESS))
    base = dataset_g.transformed(t_sz @ center_translation(dataset_g))
    return [
        TargetStroke(transform_skeleton(s, t_aff), dataset_g.strokes[k], contexts[k])
        for k, s in enumerate(base.strokes)
    ]


def _generate_char(cfg, cp, path, items, assets, t_sz, t_aff):
    name = _cp_name(cp)
    if path is None:
        return name, None, (), f"{name}: not in dataset {cfg.path('dataset_dir')}"
    try:
        dataset_g = parse_glyph_file(path, sample_count=cfg.n_samples_per_skeleton)
        if not dataset_g.strokes:
            raise DataError(f"{name}: glyph has no strokes")
        targets = _target_strokes(dataset_g, t_sz, t_aff)
        picks = []
        chosen = []
        for k, target in enumerate(targets):
            res = select_stroke(target, assets, attribute_penalty=cfg.lambda_attr)
            picks.append(PickRow(name, k, items[res.index].asset.asset_id, res.energy))
            chosen.append(assets[res.index])
        image = compose_glyph(targets, chosen, cfg.canvas_size, cfg.canvas_size)
        return name, image, tuple(picks), None
    except (GlyphForgeError, ValueError) as exc:
        return name, None, (), f"{name}: {exc}"


def cmd_generate(cfg: PipelineConfig, targets: Sequence[int] | None = None) -> GenerateResult:
    """Compose target glyph images from the asset store.

    Targets default to every dataset character that is not a store
    source. Characters that fail keep the run alive; their errors come
    back in the result.
    """
    store_dir = cfg.path("store_dir")
    items = load_store(store_dir, sample_count=cfg.n_samples_per_skeleton)
    if not items:
        raise DataError(f"asset store {store_dir} is empty")
    dataset = _scan(cfg.path("dataset_dir"), "U+*.gd", "dataset")
    source_cps = {item.codepoint for item in items}
    cps = sorted(set(targets)) if targets is not None else sorted(set(dataset) - source_cps)
    if not cps:
        raise DataError("no target codepoints to generate")

    out_dir = cfg.path("output_dir")
    manifest = out_dir / "MANIFEST.txt"
    fp_lines = ["stage generate", *_config_lines(cfg)]
    fp_lines += [
        f"store {p.name} {_sha256_file(p)}"
        for p in sorted(store_dir.glob("U+*"))
        if p.suffix in (".png", ".txt")
    ]
    for cp in cps:
        name = _cp_name(cp)
        mark = _sha256_file(dataset[cp]) if cp in dataset else "MISSING"
        fp_lines.append(f"target {name} {mark}")
    fp = fingerprint(fp_lines)
    picks_path = out_dir / "picks.csv"
    errors_path = out_dir / "errors.txt"
    if manifest_matches(manifest, fp):
        picks = tuple(
            PickRow(r[0], int(r[1]), r[2], float(r[3])) for r in _read_rows(picks_path)
        )
        errors = tuple(
            line
            for line in errors_path.read_text(encoding="utf-8").splitlines()
            if line
        )
        generated = tuple(p.stem for p in sorted(out_dir.glob("U+*.png")))
        return GenerateResult(out_dir, generated, picks, errors, skipped=True)
    clear_manifested(manifest)

    assets = [item.asset for item in items]
    try:
        t_sz, t_aff = estimate_transforms(items, cfg.canvas_size)
    except ValueError as exc:
        raise DataError(f"asset store {store_dir}: {exc}") from exc
    results = _pool_map(
        lambda cp: _generate_char(cfg, cp, dataset.get(cp), items, assets, t_sz, t_aff),
        cps,
        cfg.jobs,
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    products: list[Path] = []
    generated = []
    picks: list[PickRow] = []
    errors = []
    for name, image, char_picks, err in results:
        if err is not None:
            errors.append(err)
            continue
        products.append(save_mask(image, out_dir / f"{name}.png"))
        generated.append(name)
        picks.extend(char_picks)
    products.append(
        _write_rows(
            picks_path,
            ("target", "stroke", "asset", "energy"),
            [(p.target, p.stroke, p.asset, p.energy) for p in picks],
        )
    )
    errors_path.write_text("".join(e + "\n" for e in errors), encoding="utf-8")
    products.append(errors_path)
    write_manifest(manifest, fp, products)
    return GenerateResult(out_dir, tuple(generated), tuple(picks), tuple(errors), skipped=False)


# --- select-samples ---------------------------------------------------------


@dataclass(frozen=True)
class SelectResult:
    best: CandidateSet
    trace: tuple[GenerationStats, ...]
    pool: tuple[str, ...]
    skipped: bool


def cmd_select(cfg: PipelineConfig, pool: Sequence[int] | None = None) -> SelectResult:
    """Pick the k most useful sample characters from the dataset.

    The pool defaults to every dataset character; the pipeline narrows it
    to characters that actually have sample images.
    """
    dataset = _scan(cfg.path("dataset_dir"), "U+*.gd", "dataset")
    if pool is not None:
        missing = sorted(set(pool) - set(dataset))
        if missing:
            raise DataError(
                "pool characters missing from dataset: "
                + ", ".join(_cp_name(c) for c in missing)
            )
        cps = sorted(set(pool))
    else:
        cps = sorted(dataset)
    if not cps:
        raise DataError(f"no dataset glyphs in {cfg.path('dataset_dir')}")
    if cfg.k_samples > len(cps):
        raise DataError(
            f"k_samples={cfg.k_samples} exceeds the {len(cps)} available characters"
        )

    report_dir = cfg.path("report_dir")
    manifest = report_dir / "MANIFEST-select.txt"
    fp_lines = ["stage select", *_config_lines(cfg)]
    fp_lines += [f"dataset {_cp_name(cp)} {_sha256_file(dataset[cp])}" for cp in cps]
    fp = fingerprint(fp_lines)
    selected_path = report_dir / "selected.txt"
    trace_path = report_dir / "selection_trace.csv"
    if manifest_matches(manifest, fp):
        lines = selected_path.read_text(encoding="utf-8").splitlines()
        ids = tuple(lines[0].split()[1:])
        energy = float(lines[1].split()[1])
        trace = tuple(
            GenerationStats(int(r[0]), float(r[1]), float(r[2]))
            for r in _read_rows(trace_path)
        )
        return SelectResult(
            CandidateSet(ids, energy), trace, tuple(_cp_name(c) for c in cps), skipped=True
        )
    clear_manifested(manifest)

    chars = []
    for cp in cps:
        g = parse_glyph_file(dataset[cp], sample_count=cfg.n_samples_per_skeleton)
        if not g.strokes:
            raise DataError(f"{_cp_name(cp)}: glyph has no strokes")
        chars.append(validation_char(assign_all(g, DATASET_THICKNESS)))
    if cfg.k_samples == len(chars):
        selector = SampleSelector(
            chars, k=cfg.k_samples, alpha=cfg.alpha_selection,
            attribute_penalty=cfg.lambda_attr,
        )
        best = selector.candidate([c.char_id for c in chars])
        trace: tuple[GenerationStats, ...] = ()
    else:
        best, trace = run_ga(
            chars,
            k=cfg.k_samples,
            alpha=cfg.alpha_selection,
            seed=cfg.seed,
            attribute_penalty=cfg.lambda_attr,
        )
    report_dir.mkdir(parents=True, exist_ok=True)
    selected_path.write_text(
        f"SELECTED {' '.join(best.char_ids)}\nENERGY {best.energy!r}\n",
        encoding="utf-8",
    )
    products = [selected_path]
    products.append(
        _write_rows(
            trace_path,
            ("generation", "best", "mean"),
            [(t.generation, t.best, t.mean) for t in trace],
        )
    )
    write_manifest(manifest, fp, products)
    return SelectResult(best, trace, tuple(_cp_name(c) for c in cps), skipped=False)


# --- eval --------------------------------------------------------------------


@dataclass(frozen=True)
class EvalResult:
    rows: tuple[tuple[str, float], ...]
    mean_chamfer: float
    recognition: float
    errors: tuple[str, ...]
    skipped: bool


def cmd_eval(cfg: PipelineConfig) -> EvalResult:
    """Chamfer distances and 1-NN recognition of generated vs truth images."""
    out_dir = cfg.path("output_dir")
    truth_dir = cfg.path("truth_dir")
    generated = {p.stem: p for p in sorted(out_dir.glob("U+*.png"))} if out_dir.is_dir() else {}
    if not generated:
        raise DataError(f"no generated glyphs in {out_dir}")
    if not truth_dir.is_dir():
        raise DataError(f"truth directory not found: {truth_dir}")

    report_dir = cfg.path("report_dir")
    manifest = report_dir / "MANIFEST-eval.txt"
    fp_lines = ["stage eval", *_config_lines(cfg)]
    for name, p in generated.items():
        truth = truth_dir / p.name
        mark = _sha256_file(truth) if truth.is_file() else "MISSING"
        fp_lines.append(f"pair {name} {_sha256_file(p)} {mark}")
    fp = fingerprint(fp_lines)
    eval_path = report_dir / "eval.csv"
    summary_path = report_dir / "eval_summary.txt"
    if manifest_matches(manifest, fp):
        rows = tuple((r[0], float(r[1])) for r in _read_rows(eval_path))
        summary: dict[str, str] = {}
        errors = []
        for line in summary_path.read_text(encoding="utf-8").splitlines():
            if line.startswith("error "):
                errors.append(line[len("error "):])
            elif " = " in line:
                key, _, value = line.partition(" = ")
                summary[key] = value
        return EvalResult(
            rows,
            float(summary["mean_chamfer"]),
            float(summary["recognition"]),
            tuple(errors),
            skipped=True,
        )
    clear_manifested(manifest)

    rows = []
    test_set = []
    train_set = []
    errors = []
    for name, p in generated.items():
        truth = truth_dir / p.name
        if not truth.is_file():
            errors.append(f"{name}: no truth image {truth}")
            continue
        gen_img = load_gray(p)
        truth_img = load_gray(truth)
        try:
            rows.append((name, image_chamfer(gen_img, truth_img, size=cfg.eval_size)))
        except ValueError as exc:
            errors.append(f"{name}: {exc}")
            continue
        test_set.append((name, gen_img))
        train_set.append((name, truth_img))
    if not rows:
        raise DataError("no generated glyph has a usable truth image")
    mean = float(np.mean([c for _, c in rows]))
    recognition = recognize(test_set, train_set, size=cfg.eval_size)

    report_dir.mkdir(parents=True, exist_ok=True)
    products = [_write_rows(eval_path, ("codepoint", "chamfer"), rows)]
    summary_lines = [
        f"count = {len(rows)}",
        f"mean_chamfer = {mean!r}",
        f"recognition = {recognition!r}",
    ]
    summary_lines += [f"error {e}" for e in errors]
    summary_path.write_text("".join(line + "\n" for line in summary_lines), encoding="utf-8")
    products.append(summary_path)
    write_manifest(manifest, fp, products)
    return EvalResult(tuple(rows), mean, recognition, tuple(errors), skipped=False)


# --- full pipeline ------------------------------------------------------------


@dataclass(frozen=True)
class PipelineResult:
    select: SelectResult | None
    extract: ExtractResult
    generate: GenerateResult
    eval: EvalResult
    report_path: Path


def _parse_selected(ids: Sequence[str]) -> list[int]:
    return [int(name[2:], 16) for name in ids]


def cmd_pipeline(
    cfg: PipelineConfig,
    *,
    skip_selection: bool = False,
    targets: Sequence[int] | None = None,
) -> PipelineResult:
    """Run select (optional), extract, generate, and eval, then report."""
    from . import report as reporting

    samples = _scan(cfg.path("samples_dir"), "U+*.png", "samples")
    if not samples:
        raise DataError(f"no sample images in {cfg.path('samples_dir')}")

    sel: SelectResult | None = None
    if skip_selection:
        sample_cps = sorted(samples)
    else:
        sel = cmd_select(cfg, pool=sorted(samples))
        sample_cps = sorted(_parse_selected(sel.best.char_ids))
    ext = cmd_extract(cfg, only=sample_cps)
    gen = cmd_generate(cfg, targets=targets)
    ev = cmd_eval(cfg)

    report_dir = cfg.path("report_dir")
    report_dir.mkdir(parents=True, exist_ok=True)
    rep = reporting.Report("glyph extrapolation pipeline")

    sec = rep.section("select-samples")
    if sel is None:
        sec.line("skipped: using the provided sample list")
        sec.kv("samples", " ".join(_cp_name(c) for c in sample_cps))
    else:
        if sel.skipped:
            sec.line("reused: inputs unchanged since the last run")
        sec.kv("pool", len(sel.pool))
        sec.kv("k", cfg.k_samples)
        sec.kv("alpha", cfg.alpha_selection)
        sec.kv("selected", " ".join(sel.best.char_ids))
        sec.kv("energy", f"{sel.best.energy:.6f}")
        sec.kv("generations", len(sel.trace))
        if sel.trace:
            reporting.ga_figure(sel.trace, report_dir / "selection_energy.png")
            sec.kv("figure", "selection_energy.png")

    sec = rep.section("extract")
    if ext.skipped:
        sec.line("reused: inputs unchanged since the last run")
    sec.kv("characters", len(ext.rows))
    sec.kv("assets", ext.n_assets)
    sec.kv("restored", sum(r.restored for r in ext.rows))
    sec.kv("relation fixes", sum(r.relfixes for r in ext.rows))
    for r in ext.rows:
        sec.line(
            f"{r.name} thickness={r.thickness} strokes={r.strokes}"
            f" restored={r.restored} relfix={r.relfixes} converged={r.converged}"
        )
    reporting.extraction_figure(
        [(r.name, r.restored, r.strokes - r.restored) for r in ext.rows],
        report_dir / "extract_assets.png",
    )
    sec.kv("figure", "extract_assets.png")

    sec = rep.section("generate")
    if gen.skipped:
        sec.line("reused: inputs unchanged since the last run")
    sec.kv("targets", len(gen.generated) + len(gen.errors))
    sec.kv("generated", len(gen.generated))
    sec.kv("failed", len(gen.errors))
    for err in gen.errors:
        sec.line(f"error {err}")

    sec = rep.section("eval")
    if ev.skipped:
        sec.line("reused: inputs unchanged since the last run")
    sec.kv("evaluated", len(ev.rows))
    sec.kv("mean chamfer", f"{ev.mean_chamfer:.6f}")
    sec.kv("recognition", f"{ev.recognition:.6f}")
    if ev.rows:
        worst = max(ev.rows, key=lambda r: r[1])
        sec.kv("worst", f"{worst[0]} ({worst[1]:.6f})")
    for err in ev.errors:
        sec.line(f"error {err}")
    reporting.chamfer_figure(ev.rows, report_dir / "eval_chamfer.png")
    sec.kv("figure", "eval_chamfer.png")

    (report_dir / "config.txt").write_text(serialize_config(cfg), encoding="utf-8")
    report_path = rep.write(report_dir / "report.txt")
    return PipelineResult(sel, ext, gen, ev, report_path)
