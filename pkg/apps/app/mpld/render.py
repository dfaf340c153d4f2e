"""SVG preview of a colored layout: one fill per mask, dashed lines at stitches."""
import svgwrite

from app.mpld.layout_graph import LayoutGraph
from app.mpld.solution import Solution

MASK_COLOURS = ("#e4572e", "#29335c", "#f3a712", "#669bbc")
CONFLICT_STROKE = "#d00000"
STITCH_STROKE = "#000000"
MARGIN = 20


def mask_colour(mask: int) -> str:
    return MASK_COLOURS[mask % len(MASK_COLOURS)]


def render_svg(graph: LayoutGraph, solution: Solution) -> str:
    if not graph.vertices:
        return svgwrite.Drawing(size=(0, 0), profile="tiny").tostring() + "\n"
    x_lo = min(v.geometry.x_lo for v in graph.vertices)
    y_lo = min(v.geometry.y_lo for v in graph.vertices)
    x_hi = max(v.geometry.x_hi for v in graph.vertices)
    y_hi = max(v.geometry.y_hi for v in graph.vertices)
    width = x_hi - x_lo + 2 * MARGIN
    height = y_hi - y_lo + 2 * MARGIN

    # layout y grows upward, SVG y grows downward
    def sx(x):
        return x - x_lo + MARGIN

    def sy(y):
        return y_hi - y + MARGIN

    dwg = svgwrite.Drawing(size=(width, height), profile="tiny")
    dwg.viewbox(0, 0, width, height)
    dwg.add(dwg.rect(insert=(0, 0), size=(width, height), fill="#ffffff"))

    in_conflict = {x for e in solution.conflicts for x in e}
    for v in graph.vertices:
        g = v.geometry
        outline = {"stroke": CONFLICT_STROKE, "stroke_width": 3} if v.id in in_conflict else {}
        dwg.add(dwg.rect(
            insert=(sx(g.x_lo), sy(g.y_hi)),
            size=(g.width, g.height),
            fill=mask_colour(solution.colors[v.id]),
            **outline,
        ))

    for u, w in solution.stitches:
        a, b = graph.vertices[u].geometry, graph.vertices[w].geometry
        if a.x_hi == b.x_lo:
            start, end = (sx(a.x_hi), sy(a.y_hi)), (sx(a.x_hi), sy(a.y_lo))
        else:
            start, end = (sx(a.x_lo), sy(a.y_hi)), (sx(a.x_hi), sy(a.y_hi))
        dwg.add(dwg.line(start=start, end=end, stroke=STITCH_STROKE, stroke_width=2, stroke_dasharray="6,4"))

    return dwg.tostring() + "\n"
