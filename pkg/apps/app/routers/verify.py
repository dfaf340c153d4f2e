from fastapi import APIRouter, HTTPException, status
from pydantic import BaseModel
from typing import Optional
import logging
import sys
import os

from app.mpld.decomposer import verify_colored
from app.mpld.errors import MPLDError, ParameterError
from app.mpld.layout_io import parse_layout, read_colored
from settings import get_settings
from .decompose import CLIENT_ERRORS, layout_options

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', '..', 'monitor-source'))
from metrics import record_error, record_verification

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/verify", tags=["verification"])


class VerifyRequest(BaseModel):
    layout: str
    colored: str  # COLOR/SEGMENT/CONFLICT/STITCH lines
    k: Optional[int] = None
    spacing_nm: Optional[int] = None
    alpha: Optional[str] = None
    stitch_cap: Optional[int] = None


class VerifyResponse(BaseModel):
    ok: bool
    violations: list[str]
    conflicts: Optional[int] = None
    stitches: Optional[int] = None
    cost: Optional[str] = None


@router.post("/", response_model=VerifyResponse)
def verify_endpoint(request: VerifyRequest):
    """Re-check a colored layout against the layout it claims to decompose."""
    try:
        try:
            options = layout_options(request)
        except ValueError as e:
            raise ParameterError(str(e))
        layout = parse_layout(request.layout, options)
        colored = read_colored(request.colored)
        stitch_cap = get_settings().stitch_cap if request.stitch_cap is None else request.stitch_cap
        report, solution = verify_colored(layout, colored, stitch_cap)
        record_verification(report.ok)
        if solution is None:
            return VerifyResponse(ok=False, violations=report.violations)
        return VerifyResponse(
            ok=report.ok,
            violations=report.violations,
            conflicts=len(solution.conflicts),
            stitches=len(solution.stitches),
            cost=str(solution.cost),
        )

    except CLIENT_ERRORS as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e)
        )
    except MPLDError as e:
        logger.error(f"Verification failed: {e}")
        record_error("verification", "error")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Verification failed: {str(e)}"
        )
    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"Unexpected error during verification: {e}")
        record_error("verification", "critical")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Failed to verify layout: {str(e)}"
        )
