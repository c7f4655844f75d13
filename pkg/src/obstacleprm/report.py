"""Serialisation: deterministic JSON/CSV reports and SVG figures."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SUMMARY_HEADER = ["name", "area", "perimeter", "diameter", "predicted_paper", "predicted_corrected",
                  "obprm_rate", "obprm_ci", "drop_rate", "drop_ci"]


def round12(x: float) -> float:
    """Round to 12 significant digits; repr() then gives the shortest form."""
    return float(f"{float(x):.12g}")


def fmt(x: float) -> str:
    return repr(round12(x))


def _rounded(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round12(obj)
    if isinstance(obj, dict):
        return {str(k): _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_rounded(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(_rounded(obj), sort_keys=True, indent=2) + "\n"


def summary_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for o in report.obstacles:
        w.writerow([o.name, fmt(o.volume), fmt(o.boundary), fmt(o.diameter),
                    fmt(o.predicted_paper), fmt(o.predicted_corrected),
                    fmt(o.obprm.point_estimate), f"{fmt(o.obprm.ci_low)};{fmt(o.obprm.ci_high)}",
                    fmt(o.drop.point_estimate), f"{fmt(o.drop.ci_low)};{fmt(o.drop.ci_high)}"])
    return buf.getvalue()


def write_report(report, directory) -> list[Path]:
    """report.json and summary.csv are reproducible; timing.json is not."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = [directory / "report.json", directory / "summary.csv", directory / "timing.json"]
    paths[0].write_text(dumps(report.as_dict()))
    paths[1].write_text(summary_csv(report))
    paths[2].write_text(dumps(report.timestamps))
    return paths


# -- SVG ------------------------------------------------------------------------

@dataclass
class SvgScene:
    outlines: list = field(default_factory=list)  # closed polylines, (k, 2) arrays
    nodes: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    legend: str = ""
    bounds: tuple | None = None  # (xmin, ymin, xmax, ymax); fitted when None
    width: int = 480
    height: int = 480
    margin: int = 16


def _fit(scene: SvgScene):
    if scene.bounds is not None:
        x0, y0, x1, y1 = scene.bounds
    else:
        pts = [np.asarray(o) for o in scene.outlines] + [np.asarray(scene.nodes).reshape(-1, 2)]
        pts = np.vstack(pts) if any(len(p) for p in pts) else np.array([[0.0, 0.0], [1.0, 1.0]])
        (x0, y0), (x1, y1) = pts.min(axis=0), pts.max(axis=0)
    span = max(x1 - x0, y1 - y0, 1e-12)
    scale = min(scene.width, scene.height) - 2 * scene.margin
    scale /= span

    def to_canvas(p):
        p = np.asarray(p, dtype=float).reshape(-1, 2)
        x = scene.margin + (p[:, 0] - x0) * scale
        y = scene.height - scene.margin - (p[:, 1] - y0) * scale
        return np.column_stack([x, y])

    return to_canvas


def svg_text(scene: SvgScene) -> str:
    to_canvas = _fit(scene)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{scene.width}" height="{scene.height}" '
           f'viewBox="0 0 {scene.width} {scene.height}">',
           f'<rect x="0" y="0" width="{scene.width}" height="{scene.height}" fill="white"/>']
    for outline in scene.outlines:
        pts = to_canvas(outline)
        coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="#c8c8c8" stroke="black" stroke-width="1"/>')
    for x, y in to_canvas(scene.nodes) if len(scene.nodes) else []:
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2" fill="#d62728"/>')
    if scene.legend:
        text = scene.legend.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        out.append(f'<text x="{scene.margin}" y="{scene.margin - 4}" font-size="11" '
                   f'font-family="sans-serif">{text}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(scene: SvgScene, path) -> Path:
    path = Path(path)
    path.write_text(svg_text(scene))
    return path
