"""
SVG rendering of a graph S and its approximation T.

S is drawn in a light stroke, T highlighted on top. Computable endpoints are
filled markers, hidden ones empty markers at the centre of their current hull
with the hull box drawn around them. Every element carries a gid
(S-edge-<id>, T-edge-<id>, S-end-<id>-<side>, T-end-<id>-<side>,
S-hull-<id>-<side>) so the SVG can be checked element by element.
Output is deterministic: fixed hash salt and no date metadata.
Only the first two coordinates are drawn.
"""

import logging
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from src.approx import GraphApproxReport
from src.config import (
    DEFAULT_PRECISION,
    DEFAULT_WINDOW,
    HULL_STYLE,
    MARKER_SIZE,
    S_STYLE,
    SVG_HASH_SALT,
    T_STYLE,
    ensure_dirs,
)
from src.fixtures import GraphFixture, HiddenEndpoint

log = logging.getLogger(__name__)


def _setup_style():
    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    plt.rcParams["svg.fonttype"] = "none"
    plt.rcParams["font.size"] = 9


def _xy(point) -> tuple[float, float]:
    return float(point[0]), float(point[1] if len(point) > 1 else 0)


def _hull_of(v: HiddenEndpoint, precision: int):
    return v.hull(v.available_level(precision))


def _s_polyline(fixture: GraphFixture, edge, window, precision: int) -> list:
    """Vertices of an S edge; hidden ends at their current hull centre, rays cut at the window."""
    out = []
    inner = edge.vertices if edge.kind == "arc" else edge.vertices[:-1]
    for v in inner:
        out.append(_hull_of(v, precision).center if isinstance(v, HiddenEndpoint) else v)
    if edge.kind == "ray":
        chart = fixture.chart(edge.id, "start")
        out.append(chart.point(chart.window_end(window), precision))
    return out


def _t_polyline(fixture: GraphFixture, edge, approx, window, precision: int) -> list:
    """Vertices of the T edge: its endpoints with the inner vertices of S between them."""
    start = approx.endpoints["start"].point.point(precision)
    if edge.kind == "arc":
        end = approx.endpoints["end"].point.point(precision)
        return [start, *edge.vertices[1:-1], end]
    chart = fixture.chart(edge.id, "start")
    return [start, *edge.vertices[1:-1], chart.point(chart.window_end(window), precision)]


def _marker(ax, point, gid: str, color: str, filled: bool):
    x, y = _xy(point)
    (mark,) = ax.plot(
        [x], [y], linestyle="none", marker="o", markersize=MARKER_SIZE,
        markeredgecolor=color, markerfacecolor=color if filled else "white", zorder=4,
    )
    mark.set_gid(gid)


def render_svg(
    fixture: GraphFixture,
    report: Optional[GraphApproxReport],
    path,
    window=DEFAULT_WINDOW,
    precision: int = DEFAULT_PRECISION,
) -> Path:
    """Draw S (and T when a report is given) to an SVG file."""
    path = Path(path)
    ensure_dirs()
    path.parent.mkdir(parents=True, exist_ok=True)
    _setup_style()
    fig, ax = plt.subplots(figsize=(6, 6))
    for edge in fixture.edges:
        pts = _s_polyline(fixture, edge, window, precision)
        (line,) = ax.plot([_xy(p)[0] for p in pts], [_xy(p)[1] for p in pts], zorder=1, **S_STYLE)
        line.set_gid(f"S-edge-{edge.id}")
        sides = ("start", "end") if edge.kind == "arc" else ("start",)
        for side in sides:
            v = edge.endpoint(side)
            if isinstance(v, HiddenEndpoint):
                box = _hull_of(v, precision)
                x, y = _xy(box.center)
                w = float(box.half_width)
                patch = Rectangle((x - w, y - w), 2 * w, 2 * w, fill=False, zorder=2, **HULL_STYLE)
                patch.set_gid(f"S-hull-{edge.id}-{side}")
                ax.add_patch(patch)
                _marker(ax, box.center, f"S-end-{edge.id}-{side}", S_STYLE["color"], filled=False)
            else:
                _marker(ax, v, f"S-end-{edge.id}-{side}", S_STYLE["color"], filled=True)

    if report is not None:
        for approx in report.edges:
            edge = fixture.edge(approx.edge_id)
            pts = _t_polyline(fixture, edge, approx, window, precision)
            (line,) = ax.plot([_xy(p)[0] for p in pts], [_xy(p)[1] for p in pts], zorder=3, **T_STYLE)
            line.set_gid(f"T-edge-{edge.id}")
            for side in sorted(approx.endpoints):
                point = approx.endpoints[side].point.point(precision)
                _marker(ax, point, f"T-end-{edge.id}-{side}", T_STYLE["color"], filled=True)

    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(f"{fixture.name}: S (grey) and T (red)" if report is not None else fixture.name)
    plt.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    log.info("Wrote figure %s", path)
    return path
