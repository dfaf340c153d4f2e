"""
Layout files in, colored layouts and statistics out.

Text layout format (one record per line, ``#`` starts a comment)::

    K 3
    SPACING 120
    ALPHA 0.1
    RECT <id> <x_lo> <y_lo> <x_hi> <y_hi>

A JSON document with the same fields is accepted as well.
"""
from __future__ import annotations

import io
import json
import logging
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import IO, TYPE_CHECKING, Iterable, Optional, Union

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.mpld.errors import InvariantViolationError, LayoutParseError, LayoutValidationError
from settings import to_fraction

if TYPE_CHECKING:
    from app.mpld.decomposer import DecompositionStats
    from app.mpld.layout_graph import LayoutGraph
    from app.mpld.solution import Solution

logger = logging.getLogger(__name__)

DEFAULT_K = 3
DEFAULT_SPACING_NM = 120
DEFAULT_ALPHA = Fraction(1, 10)

STATS_COLUMNS = ["name", "vertices", "edges", "time_s", "stitches", "conflicts"]

Source = Union[bytes, bytearray, str, IO]
Sink = Union[str, Path, io.IOBase, None]


class Rect(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=0)
    x_lo: int
    y_lo: int
    x_hi: int
    y_hi: int

    @model_validator(mode="after")
    def _non_degenerate(self):
        if self.x_lo >= self.x_hi or self.y_lo >= self.y_hi:
            raise ValueError(
                f"rect {self.id} is degenerate: ({self.x_lo},{self.y_lo})-({self.x_hi},{self.y_hi})"
            )
        return self

    @property
    def width(self) -> int:
        return self.x_hi - self.x_lo

    @property
    def height(self) -> int:
        return self.y_hi - self.y_lo


class Layout(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rects: list[Rect] = Field(default_factory=list)
    spacing_nm: int = Field(default=DEFAULT_SPACING_NM, gt=0)
    k: int = Field(default=DEFAULT_K, ge=2)
    alpha: Fraction = DEFAULT_ALPHA

    @field_validator("alpha", mode="before")
    @classmethod
    def _to_fraction(cls, value):
        return to_fraction(value)

    @field_validator("alpha")
    @classmethod
    def _non_negative(cls, value):
        if value < 0:
            raise ValueError("alpha must be non-negative")
        return value

    @model_validator(mode="after")
    def _unique_ids(self):
        seen = set()
        for rect in self.rects:
            if rect.id in seen:
                raise ValueError(f"duplicate rect id {rect.id}")
            seen.add(rect.id)
        return self


class LayoutOptions(BaseModel):
    """Overrides win over file headers; defaults apply when a header is absent"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    k: Optional[int] = None
    spacing_nm: Optional[int] = None
    alpha: Optional[Fraction] = None
    default_k: int = DEFAULT_K
    default_spacing_nm: int = DEFAULT_SPACING_NM
    default_alpha: Fraction = DEFAULT_ALPHA

    @field_validator("alpha", "default_alpha", mode="before")
    @classmethod
    def _to_fraction(cls, value):
        if value is None:
            return None
        return to_fraction(value)


class ResultSinks(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    colored: Sink = None
    stats: Sink = None
    svg: Sink = None


class ColoredResult(BaseModel):
    """Parsed form of a colored-layout file"""

    colors: dict[int, int] = Field(default_factory=dict)
    segments: dict[tuple[int, int], int] = Field(default_factory=dict)
    conflicts: list[tuple[int, int]] = Field(default_factory=list)
    stitches: list[tuple[int, int]] = Field(default_factory=list)


# =============================
# Parsing
# =============================
def _read_text(source: Source) -> str:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, str):
        return source
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise LayoutParseError(1, f"layout is not valid UTF-8: {e}") from e


def _int(token: str, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise LayoutParseError(line_no, f"{what} must be an integer, got {token!r}")


def _parse_text(text: str):
    header: dict[str, object] = {}
    rects: list[tuple[int, dict]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        keyword = tokens[0].upper()
        if keyword in ("K", "SPACING", "ALPHA"):
            if len(tokens) != 2:
                raise LayoutParseError(line_no, f"{keyword} takes exactly one value")
            if keyword in header:
                raise LayoutParseError(line_no, f"duplicate {keyword} header")
            if keyword == "ALPHA":
                try:
                    header[keyword] = Fraction(tokens[1])
                except (ValueError, ZeroDivisionError):
                    raise LayoutParseError(line_no, f"ALPHA must be a decimal, got {tokens[1]!r}")
            else:
                header[keyword] = _int(tokens[1], line_no, keyword)
        elif keyword == "RECT":
            if len(tokens) != 6:
                raise LayoutParseError(line_no, "RECT takes <id> <x_lo> <y_lo> <x_hi> <y_hi>")
            rid, x_lo, y_lo, x_hi, y_hi = (
                _int(t, line_no, name)
                for t, name in zip(tokens[1:], ("id", "x_lo", "y_lo", "x_hi", "y_hi"))
            )
            rects.append((line_no, dict(id=rid, x_lo=x_lo, y_lo=y_lo, x_hi=x_hi, y_hi=y_hi)))
        else:
            raise LayoutParseError(line_no, f"unknown record {tokens[0]!r}")
    return header, rects


def _parse_json(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise LayoutParseError(e.lineno, f"invalid JSON: {e.msg}") from e
    if not isinstance(doc, dict):
        raise LayoutParseError(1, "JSON layout must be an object")
    header: dict[str, object] = {}
    for key, name in (("k", "K"), ("spacing", "SPACING"), ("spacing_nm", "SPACING"), ("alpha", "ALPHA")):
        if key in doc:
            header[name] = doc[key]
    rects = []
    for index, item in enumerate(doc.get("rects", [])):
        if isinstance(item, (list, tuple)) and len(item) == 5:
            item = dict(zip(("id", "x_lo", "y_lo", "x_hi", "y_hi"), item))
        if not isinstance(item, dict):
            raise LayoutParseError(1, f"rects[{index}] must be an object or a 5-element list")
        rects.append((index + 1, item))
    return header, rects


def parse_layout(source: Source, options: Optional[LayoutOptions | dict] = None) -> Layout:
    if options is None:
        options = LayoutOptions()
    elif isinstance(options, dict):
        options = LayoutOptions(**options)

    text = _read_text(source)
    if text.lstrip().startswith("{"):
        header, raw_rects = _parse_json(text)
    else:
        header, raw_rects = _parse_text(text)

    rects = []
    for line_no, fields in raw_rects:
        try:
            rects.append(Rect(**fields))
        except ValidationError as e:
            raise LayoutValidationError(f"line {line_no}: {e.errors()[0]['msg']}") from e

    k = options.k if options.k is not None else header.get("K", options.default_k)
    spacing = options.spacing_nm if options.spacing_nm is not None else header.get("SPACING", options.default_spacing_nm)
    alpha = options.alpha if options.alpha is not None else header.get("ALPHA", options.default_alpha)
    try:
        layout = Layout(rects=rects, k=k, spacing_nm=spacing, alpha=alpha)
    except ValidationError as e:
        raise LayoutValidationError(e.errors()[0]["msg"]) from e
    logger.debug(f"Parsed layout: {len(layout.rects)} rects, k={layout.k}, spacing={layout.spacing_nm}, alpha={layout.alpha}")
    return layout


def load_layout(path: Union[str, Path], options: Optional[LayoutOptions | dict] = None) -> Layout:
    with open(path, "rb") as f:
        return parse_layout(f, options)


# =============================
# Writing
# =============================
def _format_alpha(alpha: Fraction) -> str:
    # terminating decimals print as decimals, anything else as p/q
    den = alpha.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den != 1:
        return f"{alpha.numerator}/{alpha.denominator}"
    return format(Decimal(alpha.numerator) / Decimal(alpha.denominator), "f")


def format_layout(layout: Layout) -> str:
    lines = [f"K {layout.k}", f"SPACING {layout.spacing_nm}", f"ALPHA {_format_alpha(layout.alpha)}"]
    for r in layout.rects:
        lines.append(f"RECT {r.id} {r.x_lo} {r.y_lo} {r.x_hi} {r.y_hi}")
    return "\n".join(lines) + "\n"


def write_layout(layout: Layout, sink: Sink) -> None:
    _emit(sink, format_layout(layout))


def _emit(sink: Sink, text: str) -> None:
    if sink is None:
        return
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sink.write(text)


def format_colored(layout: Layout, solution: "Solution", graph: "LayoutGraph") -> str:
    from app.mpld.layout_graph import stitch_cut

    by_feature: dict[int, list] = {}
    for v in graph.vertices:
        by_feature.setdefault(v.feature_id, []).append(v)

    lines = []
    missing = []
    for rect in layout.rects:
        segments = sorted(by_feature.get(rect.id, []), key=lambda v: v.segment_index)
        if not segments or any(v.id not in solution.colors for v in segments):
            missing.append(rect.id)
            continue
        lines.append(f"COLOR {rect.id} {solution.colors[segments[0].id]}")
    if missing:
        raise InvariantViolationError(f"no color for rect(s) {', '.join(map(str, missing))}")

    for rect in layout.rects:
        segments = sorted(by_feature[rect.id], key=lambda v: v.segment_index)
        if len(segments) > 1:
            for v in segments:
                lines.append(f"SEGMENT {rect.id} {v.segment_index} {solution.colors[v.id]}")

    vertices = graph.vertices
    for u, v in solution.conflicts:
        lines.append(f"CONFLICT {vertices[u].feature_id} {vertices[v].feature_id}")
    for u, v in solution.stitches:
        lines.append(f"STITCH {vertices[u].feature_id} {stitch_cut(vertices[u].geometry, vertices[v].geometry)}")
    return "\n".join(lines) + "\n"


def stats_frame(stats: Iterable["DecompositionStats"]) -> pd.DataFrame:
    rows = [
        {
            "name": s.name,
            "vertices": s.vertices,
            "edges": s.edges,
            "time_s": s.time_s,
            "stitches": s.stitches,
            "conflicts": s.conflicts,
        }
        for s in stats
    ]
    return pd.DataFrame(rows, columns=STATS_COLUMNS)


def format_stats(stats: Union["DecompositionStats", Iterable["DecompositionStats"]]) -> str:
    from app.mpld.decomposer import DecompositionStats

    if isinstance(stats, DecompositionStats):
        stats = [stats]
    return stats_frame(stats).to_csv(index=False, float_format="%.6f", lineterminator="\n")


def write_results(
    layout: Layout,
    solution: "Solution",
    stats: "DecompositionStats",
    sinks: ResultSinks,
    graph: Optional["LayoutGraph"] = None,
) -> None:
    if graph is None:
        from app.mpld.layout_graph import build_layout_graph

        # without the decomposed graph only unsplit layouts can be written
        graph = build_layout_graph(layout)
        if len(solution.colors) != len(graph.vertices):
            raise InvariantViolationError("solution has split features; pass the decomposed graph")

    colored = format_colored(layout, solution, graph)
    _emit(sinks.colored, colored)
    _emit(sinks.stats, format_stats(stats))
    if sinks.svg is not None:
        from app.mpld.render import render_svg

        _emit(sinks.svg, render_svg(graph, solution))


# =============================
# Reading colored output back
# =============================
def read_colored(source: Source) -> ColoredResult:
    text = _read_text(source)
    result = ColoredResult()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        keyword = tokens[0].upper()
        arity = {"COLOR": 3, "SEGMENT": 4, "CONFLICT": 3, "STITCH": 3}.get(keyword)
        if arity is None:
            raise LayoutParseError(line_no, f"unknown record {tokens[0]!r}")
        if len(tokens) != arity:
            raise LayoutParseError(line_no, f"{keyword} takes {arity - 1} values")
        values = [_int(t, line_no, keyword) for t in tokens[1:]]
        if keyword == "COLOR":
            if values[0] in result.colors:
                raise LayoutParseError(line_no, f"rect {values[0]} colored twice")
            result.colors[values[0]] = values[1]
        elif keyword == "SEGMENT":
            result.segments[(values[0], values[1])] = values[2]
        elif keyword == "CONFLICT":
            result.conflicts.append((values[0], values[1]))
        else:
            result.stitches.append((values[0], values[1]))
    return result
