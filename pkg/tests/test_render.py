import io
import xml.etree.ElementTree as ET

from app.mpld.decomposer import decompose_layout
from app.mpld.layout_io import Layout, ResultSinks, parse_layout, write_results
from app.mpld.render import MASK_COLOURS, mask_colour, render_svg
from conftest import STITCHABLE_CLIQUE

SVG = "{http://www.w3.org/2000/svg}"


def test_mask_colours_cycle():
    assert mask_colour(0) == MASK_COLOURS[0]
    assert mask_colour(len(MASK_COLOURS)) == MASK_COLOURS[0]


def test_svg_draws_every_segment_and_used_stitch():
    result = decompose_layout(parse_layout(STITCHABLE_CLIQUE))
    root = ET.fromstring(render_svg(result.graph, result.solution))
    rects = root.findall(f"{SVG}rect")
    # background plus one per segment
    assert len(rects) == 1 + len(result.graph.vertices)
    fills = [r.get("fill") for r in rects[1:]]
    assert fills == [mask_colour(c) for c in result.solution.color_vector()]
    lines = root.findall(f"{SVG}line")
    assert len(lines) == len(result.solution.stitches) == 1
    assert all(line.get("stroke-dasharray") for line in lines)


def test_stitch_line_sits_on_the_cut():
    result = decompose_layout(parse_layout(STITCHABLE_CLIQUE))
    root = ET.fromstring(render_svg(result.graph, result.solution))
    assert root.get("viewBox") == "0 0 440 540"
    (line,) = root.findall(f"{SVG}line")
    # bar cut at x=200; the bar spans y 0..40 of a 500 tall layout
    assert [float(line.get(a)) for a in ("x1", "y1", "x2", "y2")] == [220, 480, 220, 520]


def test_svg_flips_y_axis():
    result = decompose_layout(parse_layout(STITCHABLE_CLIQUE), stitch_cap=1)
    root = ET.fromstring(render_svg(result.graph, result.solution))
    bar, tall = root.findall(f"{SVG}rect")[1:3]
    # the bar sits at the bottom of the layout, so lowest on screen
    assert float(bar.get("y")) > float(tall.get("y"))


def test_conflicting_segments_are_outlined():
    result = decompose_layout(parse_layout(STITCHABLE_CLIQUE), stitch_cap=1)
    rects = ET.fromstring(render_svg(result.graph, result.solution)).findall(f"{SVG}rect")[1:]
    outlined = [i for i, r in enumerate(rects) if r.get("stroke")]
    assert outlined == [0, 1]


def test_empty_graph_renders():
    result = decompose_layout(Layout(rects=[]))
    assert ET.fromstring(render_svg(result.graph, result.solution)).tag == f"{SVG}svg"


def test_svg_sink():
    layout = parse_layout(STITCHABLE_CLIQUE)
    result = decompose_layout(layout)
    svg = io.StringIO()
    write_results(layout, result.solution, result.stats, ResultSinks(svg=svg), graph=result.graph)
    assert svg.getvalue().startswith("<svg")
