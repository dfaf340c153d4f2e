from fastapi import APIRouter, HTTPException, status
from pydantic import BaseModel
from typing import Optional
import logging
import sys
import os
import time

from app.mpld.decomposer import DecompositionStats, decompose_layout
from app.mpld.errors import LayoutParseError, LayoutValidationError, MPLDError, ParameterError
from app.mpld.layout_graph import stitch_cut
from app.mpld.layout_io import LayoutOptions, parse_layout
from settings import get_settings

# Add monitor-source to path to import metrics
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', 'monitor-source'))
from metrics import record_decomposition, record_error

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/decompose", tags=["decomposition"])

CLIENT_ERRORS = (LayoutParseError, LayoutValidationError, ParameterError)


class DecomposeRequest(BaseModel):
    layout: str  # text or JSON layout document
    name: str = "layout"
    k: Optional[int] = None
    spacing_nm: Optional[int] = None
    alpha: Optional[str] = None
    engine: Optional[str] = None
    workers: Optional[int] = None
    items_per_group: Optional[int] = None
    stitch_cap: Optional[int] = None
    node_budget: Optional[int] = None


class RectMasks(BaseModel):
    id: int
    masks: list[int]  # one per segment


class StitchLine(BaseModel):
    id: int
    cut: int


class DecomposeResponse(BaseModel):
    rects: list[RectMasks]
    conflicts: list[tuple[int, int]]
    stitches: list[StitchLine]
    cost: str
    proven_optimal: bool
    stats: DecompositionStats


def layout_options(request) -> LayoutOptions:
    settings = get_settings()
    return LayoutOptions(
        k=request.k,
        spacing_nm=request.spacing_nm,
        alpha=request.alpha,
        default_k=settings.k,
        default_spacing_nm=settings.spacing_nm,
        default_alpha=settings.alpha,
    )


def _given(value, default):
    return default if value is None else value


@router.post("/", response_model=DecomposeResponse)
def decompose_endpoint(request: DecomposeRequest):
    """
    Decompose a layout onto k masks.
    Returns the mask of every rect segment plus conflicts, stitches and the cost.
    """
    settings = get_settings()
    engine = _given(request.engine, settings.engine)
    started = time.time()
    try:
        try:
            options = layout_options(request)
        except ValueError as e:
            raise ParameterError(str(e))
        layout = parse_layout(request.layout, options)
        result = decompose_layout(
            layout,
            engine,
            _given(request.workers, settings.workers),
            name=request.name,
            items_per_group=_given(request.items_per_group, settings.items_per_group),
            stitch_cap=_given(request.stitch_cap, settings.stitch_cap),
            node_budget=_given(request.node_budget, settings.node_budget),
        )
        solution, graph = result.solution, result.graph

        masks: dict[int, list[int]] = {}
        for v in graph.vertices:
            masks.setdefault(v.feature_id, []).append(solution.colors[v.id])
        vertices = graph.vertices

        record_decomposition(
            engine,
            "success",
            result.stats.time_s,
            components=len(result.stats.components),
            nodes=solution.nodes_expanded,
            conflicts=result.stats.conflicts,
            stitches=result.stats.stitches,
            proven=solution.proven_optimal,
        )
        return DecomposeResponse(
            rects=[RectMasks(id=r.id, masks=masks[r.id]) for r in layout.rects],
            conflicts=[(vertices[u].feature_id, vertices[v].feature_id) for u, v in solution.conflicts],
            stitches=[
                StitchLine(id=vertices[u].feature_id, cut=stitch_cut(vertices[u].geometry, vertices[v].geometry))
                for u, v in solution.stitches
            ],
            cost=str(solution.cost),
            proven_optimal=solution.proven_optimal,
            stats=result.stats,
        )

    except CLIENT_ERRORS as e:
        record_decomposition(engine, "rejected", time.time() - started)
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e)
        )
    except MPLDError as e:
        logger.error(f"Decomposition failed: {e}")
        record_decomposition(engine, "failed", time.time() - started)
        record_error("decomposition", "error")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Decomposition failed: {str(e)}"
        )
    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"Unexpected error during decomposition: {e}")
        record_error("decomposition", "critical")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Failed to decompose layout: {str(e)}"
        )
