from fractions import Fraction
from typing import Iterable, Mapping

from pydantic import BaseModel, ConfigDict, Field

Edge = tuple[int, int]


class Solution(BaseModel):
    """Color assignment for a set of vertices plus its cost breakdown.

    ``conflicts`` lists every conflict edge whose endpoints share a color and
    ``stitches`` every stitch edge whose endpoints differ, both as sorted
    ``(u, v)`` pairs with ``u < v``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    colors: dict[int, int]
    conflicts: list[Edge] = Field(default_factory=list)
    stitches: list[Edge] = Field(default_factory=list)
    cost: Fraction = Fraction(0)
    proven_optimal: bool = True
    nodes_expanded: int = 0
    conflict_candidates: list[Edge] = Field(default_factory=list)

    def color_vector(self) -> tuple[int, ...]:
        return tuple(self.colors[v] for v in sorted(self.colors))


def score_assignment(
    colors: Mapping[int, int],
    conflict_edges: Iterable[Edge],
    stitch_edges: Iterable[Edge],
    alpha: Fraction,
) -> tuple[list[Edge], list[Edge], Fraction]:
    conflicts = sorted(e for e in conflict_edges if colors[e[0]] == colors[e[1]])
    stitches = sorted(e for e in stitch_edges if colors[e[0]] != colors[e[1]])
    return conflicts, stitches, len(conflicts) + alpha * len(stitches)


def build_solution(
    colors: Mapping[int, int],
    conflict_edges: Iterable[Edge],
    stitch_edges: Iterable[Edge],
    alpha: Fraction,
    **extra,
) -> Solution:
    conflicts, stitches, cost = score_assignment(colors, conflict_edges, stitch_edges, alpha)
    return Solution(
        colors=dict(sorted(colors.items())),
        conflicts=conflicts,
        stitches=stitches,
        cost=cost,
        **extra,
    )
