"""
Speckle filtering
Boxcar multi-looking of scattering data and the span-driven Lee MMSE refinement of coherency rasters
"""

import logging

import numpy as np
from scipy.ndimage import uniform_filter

from app.core_types import CoherencyRaster, SlcRaster, single_look_raster, span
from app.errors import ConfigError
from app.models import FilterConfig, FilterMode

logger = logging.getLogger(__name__)

EDGE_MODE = "mirror"


def _check_window(raster: CoherencyRaster, window: int) -> None:
    if int(window) != window or window < 1 or window % 2 == 0:
        raise ConfigError(f"filter window must be an odd integer >= 1, got {window}")
    if window > min(raster.width, raster.height):
        raise ConfigError(
            f"filter window {window} exceeds raster size {raster.width}x{raster.height}"
        )


def _window_mean(data: np.ndarray, window: int) -> np.ndarray:
    """Mirror-padded moving average over the two spatial axes"""
    size = (window, window) + (1,) * (data.ndim - 2)
    if np.iscomplexobj(data):
        return (uniform_filter(data.real, size=size, mode=EDGE_MODE)
                + 1j * uniform_filter(data.imag, size=size, mode=EDGE_MODE))
    return uniform_filter(data, size=size, mode=EDGE_MODE)


def boxcar_filter(raster: CoherencyRaster, window: int) -> CoherencyRaster:
    """
    Average every matrix element over a window x window neighbourhood.

    Raises:
        ConfigError: window even, below 1 or larger than the raster
    """
    _check_window(raster, window)
    if window == 1:
        return raster
    out = _window_mean(raster.data, window)
    logger.info(
        f"Boxcar {window}x{window} on {raster.width}x{raster.height} raster, "
        f"looks {raster.looks} -> {raster.looks * window * window}"
    )
    return CoherencyRaster(out, looks=raster.looks * window * window)


def boxcar_multilook(slc: SlcRaster, window: int) -> CoherencyRaster:
    """Multi-looked T3 raster from single-look scattering data"""
    return boxcar_filter(single_look_raster(slc), window)


def lee_weight(cy2, cu2):
    """
    MMSE weight max(0, (Cy^2 - Cu^2) / (Cy^2 (1 + Cu^2))).

    Args:
        cy2: squared coefficient of variation of the local span
        cu2: squared speckle coefficient of variation, 1 / looks

    Returns:
        Weight array in [0, 1 / (1 + cu2)); 0 wherever cy2 is 0
    """
    cy2 = np.asarray(cy2, dtype=np.float64)
    positive = cy2 > 0.0
    safe = np.where(positive, cy2, 1.0)
    w = (cy2 - cu2) / (safe * (1.0 + cu2))
    return np.where(positive, np.maximum(w, 0.0), 0.0)


def lee_filter(raster: CoherencyRaster, cfg: FilterConfig) -> CoherencyRaster:
    """
    Lee MMSE filter driven by span statistics.

    The same weight is applied to all nine matrix components of a pixel, so
    each output matrix is a convex combination of the local mean and the
    centre matrix. The look count is carried over unchanged.
    """
    _check_window(raster, cfg.window)
    if cfg.looks < 1:
        raise ConfigError(f"equivalent looks must be >= 1, got {cfg.looks}")

    s = span(raster)
    mean_span = _window_mean(s, cfg.window)
    var_span = np.maximum(_window_mean(s * s, cfg.window) - mean_span ** 2, 0.0)

    flat = mean_span <= 0.0
    cy2 = var_span / np.where(flat, 1.0, mean_span) ** 2
    w = np.where(flat, 0.0, lee_weight(cy2, 1.0 / cfg.looks))

    mean = _window_mean(raster.data, cfg.window)
    out = mean + w[..., None, None] * (raster.data - mean)
    logger.info(
        f"Lee {cfg.window}x{cfg.window} (n={cfg.looks:g}) on {raster.width}x{raster.height} raster, "
        f"mean weight {float(w.mean()):.4f}"
    )
    return CoherencyRaster(out, looks=raster.looks)


def apply_filter(raster: CoherencyRaster, cfg: FilterConfig) -> CoherencyRaster:
    if cfg.mode == FilterMode.LEE:
        return lee_filter(raster, cfg)
    return boxcar_filter(raster, cfg.window)
