"""Exhaustive reference solver for small components."""
import logging
from fractions import Fraction

import numpy as np

from app.mpld.errors import OracleSizeError, ParameterError
from app.mpld.layout_graph import Component
from app.mpld.solution import Solution, build_solution

logger = logging.getLogger(__name__)

MAX_ASSIGNMENTS = 10 ** 7
CHUNK = 1 << 16


def brute_force_oracle(component: Component, k: int, alpha: Fraction) -> Solution:
    """Enumerate every k-coloring and keep the cheapest.

    Assignments are visited as base-k numbers whose most significant digit is
    the lowest vertex, so the first minimum found is the lexicographically
    smallest color vector among the optimal ones.
    """
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    vertices = sorted(component.vertex_ids)
    n = len(vertices)
    total = k ** n
    if total > MAX_ASSIGNMENTS:
        raise OracleSizeError(
            f"component {component.id}: {k}^{n} assignments exceed the oracle limit of {MAX_ASSIGNMENTS}"
        )

    index = {v: i for i, v in enumerate(vertices)}
    ce = np.array([(index[u], index[v]) for u, v in component.conflict_edges], dtype=np.int64).reshape(-1, 2)
    se = np.array([(index[u], index[v]) for u, v in component.stitch_edges], dtype=np.int64).reshape(-1, 2)
    weights = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    q, p = alpha.denominator, alpha.numerator

    best_cost, best_code = None, 0
    for start in range(0, total, CHUNK):
        codes = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        colors = (codes[:, None] // weights[None, :]) % k
        cost = np.zeros(codes.size, dtype=np.int64)
        if len(ce):
            cost += q * (colors[:, ce[:, 0]] == colors[:, ce[:, 1]]).sum(axis=1)
        if len(se):
            cost += p * (colors[:, se[:, 0]] != colors[:, se[:, 1]]).sum(axis=1)
        at = int(np.argmin(cost))
        if best_cost is None or cost[at] < best_cost:
            best_cost, best_code = int(cost[at]), start + at

    digits = [(best_code // k ** (n - 1 - i)) % k for i in range(n)]
    logger.debug(f"Oracle on component {component.id}: {total} assignments, cost {best_cost}/{q}")
    return build_solution(
        dict(zip(vertices, digits)),
        component.conflict_edges,
        component.stitch_edges,
        alpha,
        nodes_expanded=total,
    )
