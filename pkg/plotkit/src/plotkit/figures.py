"""Render figures from possim CSV datasets.

No numeric computation happens here: every statistic is read from the CSVs
the possim CLI emitted, so the plots are a pure view of those files.

Recognized input schemas (by exact header):
    theta,pi             posterior possibility contour
    alpha,assigner,cdf   false-confidence comparison (long format)
    alpha,cdf,band       validity curve with its DKW band
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

FIGURE_IDS = ("fig1", "fig2", "fig3a", "fig3b")

FIGSIZE = (6.4, 4.8)
DPI = 120


class RenderError(Exception):
    """Raised when an input does not conform to a known schema."""

    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    inputs: tuple[Path, ...]
    output: Path
    xlabel: str = ""
    ylabel: str = ""
    mark: float | None = None  # x-position of the data marker (fig2)

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise RenderError(f"unknown figure id {self.figure_id!r}; known: {FIGURE_IDS}")
        if not self.inputs:
            raise RenderError("at least one input CSV is required")


def load_table(path: Path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = list(reader.fieldnames or [])
        rows = list(reader)
    return header, rows


def classify(header: list[str], path: Path) -> str:
    if header == ["theta", "pi"]:
        return "contour"
    if header == ["alpha", "assigner", "cdf"]:
        return "false_confidence"
    if header == ["alpha", "cdf", "band"]:
        return "validity"
    if header == ["alpha", "cdf"]:
        raise RenderError(
            f"{path}: validity overlay is missing required column 'band'",
            column="band",
        )
    for schema, cols in (("contour", ["theta", "pi"]),
                         ("false_confidence", ["alpha", "assigner", "cdf"]),
                         ("validity", ["alpha", "cdf", "band"])):
        missing = [c for c in cols if c not in header]
        if len(missing) == 1 and all(c in cols for c in header):
            raise RenderError(f"{path}: missing required column {missing[0]!r}",
                              column=missing[0])
    raise RenderError(f"{path}: unrecognized header {header}")


def _floats(rows: list[dict], col: str, path: Path) -> list[float]:
    try:
        return [float(r[col]) for r in rows]
    except (TypeError, ValueError) as exc:
        raise RenderError(f"{path}: column {col!r} is not numeric", column=col) from exc


def _contour_axes(ax, path: Path, xlabel: str, ylabel: str):
    header, rows = load_table(path)
    if classify(header, path) != "contour":
        raise RenderError(f"{path}: expected a contour dataset (theta,pi)",
                          column="theta")
    theta = _floats(rows, "theta", path)
    pi = _floats(rows, "pi", path)
    ax.plot(theta, pi, color="black", lw=1.5)
    ax.set_xlabel(xlabel or "parameter")
    ax.set_ylabel(ylabel or "possibility")
    ax.set_ylim(0.0, 1.05)
    return theta, pi


def build_figure(spec: FigureSpec):
    """Assemble the matplotlib figure for a spec (also used by tests)."""
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    if spec.figure_id in ("fig1", "fig3a"):
        _contour_axes(ax, spec.inputs[0], spec.xlabel, spec.ylabel)
    elif spec.figure_id == "fig2":
        theta, pi = _contour_axes(ax, spec.inputs[0], spec.xlabel, spec.ylabel)
        if spec.mark is not None:
            mark_x = spec.mark
            # nearest tabulated point carries the marker height
            j = min(range(len(theta)), key=lambda i: abs(theta[i] - mark_x))
            mark_y = pi[j]
        else:
            j = max(range(len(pi)), key=lambda i: pi[i])
            mark_x, mark_y = theta[j], pi[j]
        ax.plot([mark_x], [mark_y], marker="x", markersize=10,
                markeredgewidth=2, color="black", linestyle="none",
                label="observed")
    elif spec.figure_id == "fig3b":
        diag = [0.0, 1.0]
        ax.plot(diag, diag, color="gray", lw=1.0, linestyle="--", label="diagonal")
        styles = ["-", "-.", ":", (0, (3, 1, 1, 1))]
        k = 0
        for path in spec.inputs:
            header, rows = load_table(path)
            kind = classify(header, path)
            if kind == "false_confidence":
                by_assigner: dict[str, list[tuple[float, float]]] = {}
                for r in rows:
                    by_assigner.setdefault(r["assigner"], []).append(
                        (float(r["alpha"]), float(r["cdf"])))
                for name in sorted(by_assigner):
                    pts = sorted(by_assigner[name])
                    ax.plot([p[0] for p in pts], [p[1] for p in pts],
                            styles[k % len(styles)], lw=1.5, label=name)
                    k += 1
            elif kind == "validity":
                alpha = _floats(rows, "alpha", path)
                cdf = _floats(rows, "cdf", path)
                band = _floats(rows, "band", path)
                ax.plot(alpha, cdf, styles[k % len(styles)], lw=1.5,
                        label=Path(path).stem)
                ax.fill_between(alpha, [c - b for c, b in zip(cdf, band)],
                                [c + b for c, b in zip(cdf, band)], alpha=0.2)
                k += 1
            else:
                raise RenderError(
                    f"{path}: fig3b accepts false-confidence or validity data, "
                    f"found columns {header}", column=header[0] if header else None)
        ax.set_xlabel(spec.xlabel or "alpha")
        ax.set_ylabel(spec.ylabel or "CDF of the belief assignment")
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.0)
        ax.legend(loc="lower right", frameon=False)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Write the figure to spec.output; the format follows the suffix."""
    fig = build_figure(spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return out
