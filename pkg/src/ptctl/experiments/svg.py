"""Deterministic SVG line plots of trajectory CSVs."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ConfigError, DomainError
from ..simulator import read_csv

WIDTH, HEIGHT = 800, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 45
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


@dataclass(frozen=True)
class PlotSpec:
    name: str
    columns: tuple[str, ...]  # empty tuple = every x column
    ylabel: str
    log: bool = False
    sqrt: bool = False


SPECS = {
    "state": PlotSpec("state", (), "x"),
    "control": PlotSpec("control", ("u",), "u"),
    "gain": PlotSpec("gain", ("kappa",), "kappa", log=True),
    "energy": PlotSpec("energy", ("E",), "sqrt(E)", log=True, sqrt=True),
    "energy-linear": PlotSpec("energy-linear", ("E",), "sqrt(E)", sqrt=True),
}


def _series(paths: Sequence[Path], spec: PlotSpec) -> list[tuple[str, np.ndarray, np.ndarray]]:
    out = []
    for path in paths:
        try:
            header, data = read_csv(path)
        except (OSError, DomainError) as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        if not header or header[0] != "t" or header[-3:] != ["u", "kappa", "E"]:
            raise ConfigError(f"{path}: header {header} is not a trajectory header")
        if data.shape[0] == 0:
            raise ConfigError(f"{path}: no data rows")
        cols = spec.columns or tuple(h for h in header if h.startswith("x"))
        for col in cols:
            y = data[:, header.index(col)]
            if spec.sqrt:
                y = np.sqrt(np.maximum(y, 0.0))
            label = f"{Path(path).stem}:{col}" if len(paths) > 1 else col
            out.append((label, data[:, 0], y))
    return out


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _num(v: float) -> str:
    return format(v, ".4g")


def render_svg(paths: Sequence, spec_name: str, title: str = "") -> str:
    if spec_name not in SPECS:
        raise ConfigError(f"unknown plot spec {spec_name!r}; expected one of {sorted(SPECS)}")
    spec = SPECS[spec_name]
    series = _series([Path(p) for p in paths], spec)

    pts = []
    for label, t, y in series:
        keep = np.isfinite(y) & (y > 0 if spec.log else True)
        yy = np.log10(y[keep]) if spec.log else y[keep]
        pts.append((label, t[keep], yy))
    if not any(t.size for _, t, _ in pts):
        raise ConfigError("nothing to plot: no finite values in the selected columns")
    t_all = np.concatenate([t for _, t, _ in pts])
    y_all = np.concatenate([y for _, _, y in pts])
    t0, t1 = float(t_all.min()), float(t_all.max())
    y0, y1 = float(y_all.min()), float(y_all.max())
    if t1 == t0:
        t1 = t0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(t):
        return MARGIN_L + (t - t0) / (t1 - t0) * pw

    def sy(y):
        return MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" '
        'stroke="black" stroke-width="1"/>',
    ]
    for tv in _ticks(t0, t1):
        x = sx(tv)
        lines.append(f'<line x1="{x:.2f}" y1="{MARGIN_T + ph}" x2="{x:.2f}" '
                     f'y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        lines.append(f'<text x="{x:.2f}" y="{MARGIN_T + ph + 18}" font-size="11" '
                     f'text-anchor="middle">{_num(tv)}</text>')
    for yv in _ticks(y0, y1):
        y = sy(yv)
        lab = f"1e{_num(yv)}" if spec.log else _num(yv)
        lines.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.2f}" x2="{MARGIN_L}" y2="{y:.2f}" '
                     'stroke="black"/>')
        lines.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" font-size="11" '
                     f'text-anchor="end">{lab}</text>')
    lines.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 8}" font-size="12" '
                 'text-anchor="middle">t</text>')
    ylab = f"log10 {spec.ylabel}" if spec.log else spec.ylabel
    lines.append(f'<text x="14" y="{MARGIN_T + ph / 2:.2f}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 14 {MARGIN_T + ph / 2:.2f})">{ylab}</text>')
    if title:
        lines.append(f'<text x="{WIDTH / 2:.2f}" y="18" font-size="13" '
                     f'text-anchor="middle">{title}</text>')

    for i, (label, t, y) in enumerate(pts):
        if t.size == 0:
            continue
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, y))
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" '
                     f'points="{coords}"><title>{label}</title></polyline>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_svg(paths, spec_name: str, out_path=None, title: str = "") -> Path:
    """Plot one or more trajectory CSVs; one polyline per file and column."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    paths = [Path(p) for p in paths]
    if not paths:
        raise ConfigError("no CSV files given")
    text = render_svg(paths, spec_name, title)
    out = Path(out_path) if out_path else paths[0].with_name(f"{paths[0].stem}_{spec_name}.svg")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    return out
