"""Deterministic SVG rendering of solved curves.

One polyline per subarc, colored by kind (left arc, right arc, straight),
waypoint markers, and heading arrows at both endpoints.  The viewBox fits
the curve's bounding box with a 5% margin.  Output depends only on the
input solution and the width, so renders diff cleanly.
"""

from __future__ import annotations

import math

from .model import SLOT_KINDS, PathSolution, SubarcKind
from .rollout import propagate_subarc

__all__ = ["render_svg"]

_KIND_COLOR = {"L": "#1f77b4", "R": "#d62728", "S": "#2ca02c"}
_MAX_STEP_ANGLE = math.pi / 90  # 2 degrees per arc segment


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _subarc_points(p, kind, length, a):
    """Polyline vertices along one subarc, endpoints included."""
    if kind is SubarcKind.S:
        steps = 1
    else:
        steps = max(2, int(math.ceil(a * length / _MAX_STEP_ANGLE)))
    pts = []
    for k in range(steps + 1):
        q = propagate_subarc(p, kind, length * k / steps, a)
        pts.append((q.x, q.y))
    return pts, propagate_subarc(p, kind, length, a)


def render_svg(solution: PathSolution, width: int = 800) -> str:
    """Render the solution curve to an SVG document string."""
    if width <= 0:
        raise ValueError("width must be positive")
    spec = solution.problem
    a = spec.curvature_bound
    segments = []  # (kind, [points])
    p = spec.start
    for row in solution.xi.xi:
        for kind, length in zip(SLOT_KINDS, row):
            if length <= 0:
                continue
            pts, p = _subarc_points(p, kind, float(length), a)
            segments.append((kind.value, pts))

    nodes = spec.nodes()
    all_x = [pt[0] for _, seg in segments for pt in seg] + list(nodes[:, 0])
    all_y = [pt[1] for _, seg in segments for pt in seg] + list(nodes[:, 1])
    xmin, xmax = min(all_x), max(all_x)
    ymin, ymax = min(all_y), max(all_y)
    span = max(xmax - xmin, ymax - ymin, 1e-9)
    margin = 0.05 * span
    xmin -= margin
    xmax += margin
    ymin -= margin
    ymax += margin
    w = xmax - xmin
    h = ymax - ymin
    height = max(1, round(width * h / w))
    stroke = 0.004 * span
    marker = 0.009 * span
    arrow = 0.06 * span

    def flip(y: float) -> float:
        # SVG's y axis points down; mirror about the box midline.
        return ymin + ymax - y

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_fmt(xmin)} {_fmt(ymin)} {_fmt(w)} {_fmt(h)}">',
        f'<rect x="{_fmt(xmin)}" y="{_fmt(ymin)}" width="{_fmt(w)}" height="{_fmt(h)}" fill="white"/>',
    ]
    for kind, pts in segments:
        coords = " ".join(f"{_fmt(x)},{_fmt(flip(y))}" for x, y in pts)
        out.append(
            f'<polyline points="{coords}" fill="none" stroke="{_KIND_COLOR[kind]}" '
            f'stroke-width="{_fmt(stroke)}" stroke-linecap="round"/>'
        )
    for wx, wy in nodes[1:-1]:
        out.append(
            f'<circle cx="{_fmt(wx)}" cy="{_fmt(flip(wy))}" r="{_fmt(marker)}" '
            f'fill="black"/>'
        )
    for endpoint in (spec.start, spec.end):
        x0, y0, th = endpoint.x, endpoint.y, endpoint.theta
        x1 = x0 + arrow * math.cos(th)
        y1 = y0 + arrow * math.sin(th)
        # Arrowhead as two short back-swept strokes.
        for da in (math.pi * 5 / 6, -math.pi * 5 / 6):
            hx = x1 + 0.35 * arrow * math.cos(th + da)
            hy = y1 + 0.35 * arrow * math.sin(th + da)
            out.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(flip(y1))}" x2="{_fmt(hx)}" '
                f'y2="{_fmt(flip(hy))}" stroke="black" stroke-width="{_fmt(stroke)}"/>'
            )
        out.append(
            f'<line x1="{_fmt(x0)}" y1="{_fmt(flip(y0))}" x2="{_fmt(x1)}" '
            f'y2="{_fmt(flip(y1))}" stroke="black" stroke-width="{_fmt(stroke)}"/>'
        )
        out.append(
            f'<circle cx="{_fmt(x0)}" cy="{_fmt(flip(y0))}" r="{_fmt(marker)}" '
            f'fill="none" stroke="black" stroke-width="{_fmt(stroke)}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
