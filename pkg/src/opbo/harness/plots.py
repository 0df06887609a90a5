"""Static SVG convergence charts, one per problem.

Hand-written SVG keeps the output byte-identical for identical input.
"""

from __future__ import annotations

import html
import math
from pathlib import Path

from .experiment import atomic_write
from .summary import load_summary

WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 80, "right": 150, "top": 40, "bottom": 50}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _finite(xs) -> list[float]:
    return [x for x in xs if x is not None and math.isfinite(x)]


def render_problem(problem: str, cells: dict[str, dict]) -> str:
    algorithms = sorted(cells)
    xs, ys = [], []
    for a in algorithms:
        c = cells[a]["curve"]
        xs += _finite(c["evals"])
        ys += _finite(c["q25"]) + _finite(c["q75"]) + _finite(c["median"])
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN["top"] + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">'
        f"{html.escape(problem)}</text>",
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{_f(px(xv))}" y="{HEIGHT - MARGIN["bottom"] + 16}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="10">{xv:.0f}</text>')
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{_f(py(yv) + 3)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{yv:.4g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">evaluations</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12" transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.0f})">median incumbent</text>')

    for i, a in enumerate(algorithms):
        color = PALETTE[i % len(PALETTE)]
        c = cells[a]["curve"]
        pts = [(e, lo, m, hi) for e, lo, m, hi in zip(c["evals"], c["q25"], c["median"], c["q75"])
               if all(v is not None and math.isfinite(v) for v in (lo, m, hi))]
        has_band = any(hi > lo for _, lo, _, hi in pts)
        if has_band:
            upper = [f"{_f(px(e))},{_f(py(hi))}" for e, _, _, hi in pts]
            lower = [f"{_f(px(e))},{_f(py(lo))}" for e, lo, _, _ in reversed(pts)]
            out.append(f'<polygon class="band" data-algorithm="{html.escape(a)}" points="{" ".join(upper + lower)}" '
                       f'fill="{color}" fill-opacity="0.2" stroke="none"/>')
        line = " ".join(f"{_f(px(e))},{_f(py(m))}" for e, _, m, _ in pts)
        out.append(f'<polyline class="median" data-algorithm="{html.escape(a)}" points="{line}" '
                   f'fill="none" stroke="{color}" stroke-width="1.8"/>')
        ly = MARGIN["top"] + 14 + 18 * i
        lx = WIDTH - MARGIN["right"] + 12
        out.append(f'<rect x="{lx}" y="{ly - 9}" width="14" height="10" fill="{color}"/>')
        out.append(f'<text x="{lx + 20}" y="{ly}" font-family="sans-serif" font-size="11">{html.escape(a)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_plots(summary_or_dir, out_dir: str | Path | None = None) -> list[Path]:
    if isinstance(summary_or_dir, (str, Path)):
        root = Path(summary_or_dir)
        summary = load_summary(root)
        out_dir = out_dir or root / "plots"
    else:
        summary = summary_or_dir
        if out_dir is None:
            raise ValueError("out_dir is required when passing a summary dict")
    out = Path(out_dir)
    written = []
    for problem in summary["problems"]:
        path = out / f"{problem}.svg"
        atomic_write(path, render_problem(problem, summary["cells"][problem]))
        written.append(path)
    return written
