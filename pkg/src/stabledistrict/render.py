"""Static district-map export: SVG drawings and GeoJSON point collections.

Edges take their district's color when both endpoints share a center and
neutral gray across district boundaries; centers get enlarged markers.
Districts can be disconnected and are drawn as-is. Output is a pure
function of its inputs, byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import Assignment, Instance

# Default palette: 12 visually distinct colors, reused modulo its length.
PALETTE = (
    "#e6194b", "#3cb44b", "#ffc400", "#4363d8", "#f58231", "#911eb4",
    "#42d4f4", "#f032e6", "#9a6324", "#000075", "#808000", "#469990",
)
BOUNDARY_COLOR = "#9e9e9e"


def district_color(center_index: int, palette: tuple[str, ...] = PALETTE) -> str:
    return palette[center_index % len(palette)]


@dataclass(frozen=True)
class SvgOptions:
    width: float = 1000.0
    margin_frac: float = 0.02
    edge_width: float = 2.0
    marker_radius: float = 6.0
    palette: tuple[str, ...] = PALETTE


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def render_svg(inst: Instance, a: Assignment, opts: SvgOptions | None = None) -> str:
    """SVG document with one path per district, a boundary path, and markers.

    The viewBox is fitted to the coordinate bounds with the y axis flipped
    into screen convention. Raises ValueError when the graph carries no
    coordinates.
    """
    g = inst.graph
    if g.coords is None:
        raise ValueError("graph has no coordinates; supply a .co file or #node lines")
    if opts is None:
        opts = SvgOptions()
    xs = [p[0] for p in g.coords]
    ys = [p[1] for p in g.coords]
    min_x, max_x = min(xs), max(xs)
    min_y, max_y = min(ys), max(ys)
    span_x = max_x - min_x or 1.0
    span_y = max_y - min_y or 1.0
    margin = opts.width * opts.margin_frac
    scale = (opts.width - 2.0 * margin) / span_x
    height = span_y * scale + 2.0 * margin

    def sx(x: float) -> float:
        return margin + (x - min_x) * scale

    def sy(y: float) -> float:
        return margin + (max_y - y) * scale

    segments: dict[int, list[str]] = {}
    boundary: list[str] = []
    for u in range(g.node_count):
        x1, y1 = g.coords[u]
        for v, _ in g.adjacency[u]:
            if v < u:
                continue
            x2, y2 = g.coords[v]
            d = (
                f"M{_fmt(sx(x1))} {_fmt(sy(y1))}"
                f" L{_fmt(sx(x2))} {_fmt(sy(y2))}"
            )
            if a.match[u] == a.match[v]:
                segments.setdefault(a.match[u], []).append(d)
            else:
                boundary.append(d)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_fmt(opts.width)} {_fmt(height)}"'
        f' width="{_fmt(opts.width)}" height="{_fmt(height)}">',
        f'<g fill="none" stroke-width="{_fmt(opts.edge_width)}"'
        ' stroke-linecap="round">',
    ]
    for c in range(inst.k):
        if c in segments:
            lines.append(
                f'<path stroke="{district_color(c, opts.palette)}" d="{" ".join(segments[c])}"/>'
            )
    if boundary:
        lines.append(f'<path stroke="{BOUNDARY_COLOR}" d="{" ".join(boundary)}"/>')
    lines.append("</g>")
    lines.append('<g stroke="#000000" stroke-width="1.00">')
    for c, center_node in enumerate(inst.centers):
        x, y = g.coords[center_node]
        lines.append(
            f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="{_fmt(opts.marker_radius)}"'
            f' fill="{district_color(c, opts.palette)}"/>'
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_geojson(inst: Instance, a: Assignment) -> str:
    """GeoJSON FeatureCollection: one Point per node, one per center.

    Node features carry {center, distance}; center features carry
    {role: "center", quota}. Raises ValueError without coordinates.
    """
    g = inst.graph
    if g.coords is None:
        raise ValueError("graph has no coordinates; supply a .co file or #node lines")
    features = []
    for u in range(g.node_count):
        x, y = g.coords[u]
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [x, y]},
                "properties": {"center": a.match[u], "distance": a.dist[u]},
            }
        )
    for c, center_node in enumerate(inst.centers):
        x, y = g.coords[center_node]
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [x, y]},
                "properties": {"role": "center", "quota": inst.quotas[c]},
            }
        )
    doc = {"type": "FeatureCollection", "features": features}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
