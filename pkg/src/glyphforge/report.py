"""Run reports: delimited tables, summary text, and rendered figures.

Everything written here is byte-stable for identical inputs: no
timestamps, no hostnames, figures saved without software metadata.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

FIG_DPI = 100


class Report:
    """Ordered stage sections collected into one text file."""

    def __init__(self, title: str):
        self.title = title
        self._sections: list[tuple[str, list[str]]] = []

    def section(self, name: str) -> "Section":
        lines: list[str] = []
        self._sections.append((name, lines))
        return Section(lines)

    def render(self) -> str:
        out = [f"= {self.title} =", ""]
        for name, lines in self._sections:
            out.append(f"== {name} ==")
            out.extend(lines if lines else ["(empty)"])
            out.append("")
        return "".join(line + "\n" for line in out)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(), encoding="utf-8")
        return path


class Section:
    def __init__(self, lines: list[str]):
        self._lines = lines

    def line(self, text: str):
        self._lines.append(text)

    def kv(self, key: str, value) -> None:
        self._lines.append(f"{key}: {value}")


def write_table(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(list(row))
    return path


def _new_figure(width: float = 8.0, height: float = 4.5) -> tuple[Figure, object]:
    fig = Figure(figsize=(width, height), dpi=FIG_DPI)
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot(111)


def _save(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # Dropping the Software chunk keeps the PNG bytes run-independent.
    fig.savefig(path, format="png", metadata={"Software": None})
    return path


def chamfer_figure(scores: Sequence[tuple[str, float]], path: str | Path, *, budget: float | None = None) -> Path:
    """Bar chart of per-glyph Chamfer distances."""
    fig, ax = _new_figure(max(8.0, 0.3 * len(scores)), 4.5)
    names = [name for name, _ in scores]
    values = [value for _, value in scores]
    ax.bar(range(len(scores)), values, color="#4477aa")
    if budget is not None:
        ax.axhline(budget, color="#cc3311", linewidth=1.0, linestyle="--", label=f"budget {budget}")
        ax.legend(loc="upper right")
    ax.set_xticks(range(len(scores)))
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_ylabel("symmetric Chamfer")
    ax.set_title("per-glyph Chamfer distance")
    fig.tight_layout()
    return _save(fig, path)


def ga_figure(trace: Sequence, path: str | Path) -> Path:
    """Best and mean selection energy per generation."""
    fig, ax = _new_figure()
    gens = [t.generation for t in trace]
    ax.plot(gens, [t.best for t in trace], color="#4477aa", label="best")
    ax.plot(gens, [t.mean for t in trace], color="#ee6677", label="population mean")
    ax.set_xlabel("generation")
    ax.set_ylabel("selection energy")
    ax.set_title("sample selection convergence")
    ax.legend(loc="upper right")
    fig.tight_layout()
    return _save(fig, path)


def extraction_figure(rows: Sequence[tuple[str, int, int]], path: str | Path) -> Path:
    """Stroke counts per character, split into restored and raw masks."""
    fig, ax = _new_figure(max(8.0, 0.45 * len(rows)), 4.5)
    names = [name for name, _, _ in rows]
    restored = [r for _, r, _ in rows]
    raw = [w for _, _, w in rows]
    xs = range(len(rows))
    ax.bar(xs, restored, color="#4477aa", label="restored")
    ax.bar(xs, raw, bottom=restored, color="#ccbb44", label="raw mask")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_ylabel("strokes")
    ax.set_title("extracted stroke assets per character")
    ax.legend(loc="upper right")
    fig.tight_layout()
    return _save(fig, path)
