"""Command line entry point.

    glyphforge <command> [--config FILE] [--seed N] [--jobs N] ...

Commands: extract, generate, select-samples, eval, pipeline, serve.
Exit codes: 0 success, 1 usage error, 2 data or config error, 3 internal
failure. generate and pipeline finish the remaining characters when one
fails, then exit 2.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from typing import Sequence

from . import pipeline
from .config import PipelineConfig, load_config, with_overrides
from .errors import ConfigError, DataError, GlyphForgeError, ParseError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise UsageError(message)


def _codepoint(token: str) -> int:
    text = token.strip().upper()
    if text.startswith("U+"):
        text = text[2:]
    try:
        return int(text, 16)
    except ValueError:
        raise UsageError(f"bad codepoint {token!r}, expected U+<hex>") from None


def _parse_targets(args) -> list[int] | None:
    tokens: list[str] = []
    if args.targets:
        tokens += re.split(r"[,\s]+", args.targets)
    if args.targets_file:
        path = Path(args.targets_file)
        if not path.is_file():
            raise DataError(f"targets file not found: {path}")
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.split("#")[0].strip()
            tokens += line.split()
    cps = [_codepoint(t) for t in tokens if t]
    return cps or None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="glyphforge",
        description="Extrapolate a full font from a few adjusted sample glyphs.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    def add(name: str, text: str):
        q = sub.add_parser(name, help=text, description=text)
        q.add_argument("--config", metavar="FILE", help="key=value config file")
        q.add_argument("--seed", type=int, help="override the config seed")
        q.add_argument("--jobs", type=int, help="worker pool size")
        return q

    add("extract", "build the stroke asset store from sample images")
    gen = add("generate", "compose target glyphs from the asset store")
    gen.add_argument("--targets", help="codepoints, e.g. U+E010,U+E011")
    gen.add_argument("--targets-file", help="file with one codepoint per line")
    add("select-samples", "pick the most useful sample characters")
    add("eval", "score generated glyphs against truth images")
    pipe = add("pipeline", "run select, extract, generate, and eval with one report")
    pipe.add_argument(
        "--skip-selection",
        action="store_true",
        help="use every provided sample instead of selecting k of them",
    )
    pipe.add_argument("--targets", help="codepoints, e.g. U+E010,U+E011")
    pipe.add_argument("--targets-file", help="file with one codepoint per line")
    serve = add("serve", "start the glyph adjustment service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8765)
    return parser


def _run(args, cfg: PipelineConfig) -> int:
    if args.command == "extract":
        res = pipeline.cmd_extract(cfg)
        state = "reused" if res.skipped else "built"
        print(f"{state} {res.n_assets} stroke assets from {len(res.rows)} characters in {res.store_dir}")
        return 0
    if args.command == "generate":
        res = pipeline.cmd_generate(cfg, targets=_parse_targets(args))
        state = " (reused)" if res.skipped else ""
        print(f"generated {len(res.generated)} glyphs in {res.output_dir}{state}")
        for err in res.errors:
            print(f"error: {err}", file=sys.stderr)
        return 2 if res.errors else 0
    if args.command == "select-samples":
        res = pipeline.cmd_select(cfg)
        print(f"selected {' '.join(res.best.char_ids)} (energy {res.best.energy:.6f})")
        return 0
    if args.command == "eval":
        res = pipeline.cmd_eval(cfg)
        print(
            f"evaluated {len(res.rows)} glyphs:"
            f" mean chamfer {res.mean_chamfer:.4f}, recognition {res.recognition:.3f}"
        )
        for err in res.errors:
            print(f"error: {err}", file=sys.stderr)
        return 2 if res.errors else 0
    if args.command == "pipeline":
        res = pipeline.cmd_pipeline(
            cfg, skip_selection=args.skip_selection, targets=_parse_targets(args)
        )
        print(f"report written to {res.report_path}")
        errors = res.generate.errors + res.eval.errors
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        return 2 if errors else 0
    if args.command == "serve":
        import uvicorn

        from .adjust import create_app

        uvicorn.run(create_app(cfg), host=args.host, port=args.port, log_level="info")
        return 0
    raise UsageError(f"unknown command {args.command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config) if args.config else PipelineConfig()
        cfg = with_overrides(cfg, seed=args.seed, jobs=args.jobs)
        return _run(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, DataError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GlyphForgeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except KeyboardInterrupt:
        raise
    except Exception as exc:  # anything unplanned is an internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
