"""
Analysis Endpoints
Stateless H/A/alpha decomposition of submitted T3 pixels
"""

import logging

import numpy as np
from fastapi import APIRouter

from app.core_types import CoherencyRaster
from app.decomposition import haa_raster
from app.models import DecompositionResponse, HaaResult, PixelBatch, ProblemDetails

logger = logging.getLogger(__name__)

router = APIRouter(tags=["analysis"])


def pixels_to_raster(batch: PixelBatch) -> CoherencyRaster:
    """A 1 x N raster holding the submitted pixels"""
    p = np.asarray(batch.pixels, dtype=np.float64)
    t12 = p[:, 3] + 1j * p[:, 4]
    t13 = p[:, 5] + 1j * p[:, 6]
    t23 = p[:, 7] + 1j * p[:, 8]
    data = np.zeros((len(p), 3, 3), dtype=np.complex128)
    data[:, 0, 0], data[:, 1, 1], data[:, 2, 2] = p[:, 0], p[:, 1], p[:, 2]
    data[:, 0, 1], data[:, 0, 2], data[:, 1, 2] = t12, t13, t23
    data[:, 1, 0], data[:, 2, 0], data[:, 2, 1] = np.conj(t12), np.conj(t13), np.conj(t23)
    return CoherencyRaster(data[None], looks=1)


@router.post(
    "/decomposition",
    response_model=DecompositionResponse,
    responses={
        200: {"description": "H/A/alpha computed"},
        422: {"model": ProblemDetails, "description": "Malformed pixels"}
    },
    summary="Computes entropy, anisotropy and mean alpha for T3 pixels"
)
async def decompose_pixels(batch: PixelBatch) -> DecompositionResponse:
    """
    Computes the H/A/alpha parameters of every submitted coherency matrix.

    Pixels without power, or that are not positive semi-definite, come back
    with valid=false and zero parameters instead of failing the request.

    Args:
        batch: PixelBatch of 9-value T3 rows

    Returns:
        DecompositionResponse with one result per pixel, in request order
    """
    haa = haa_raster(pixels_to_raster(batch))
    results = [
        HaaResult(
            entropy=float(haa.entropy[0, i]),
            anisotropy=float(haa.anisotropy[0, i]),
            alpha=float(haa.alpha[0, i]),
            degenerate=bool(haa.degenerate[0, i]),
            valid=bool(haa.valid[0, i]),
        )
        for i in range(haa.width)
    ]
    logger.info(f"Decomposed {len(results)} pixel(s)")
    return DecompositionResponse(results=results)
