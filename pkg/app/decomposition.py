"""
H/A/alpha decomposition
Entropy, anisotropy and mean alpha angle from the eigenstructure of coherency matrices,
plus the Pauli RGB composite used to display a scene
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from app.core_types import (
    EIG_TOLERANCE,
    CoherencyRaster,
    HermitianMatrix3,
    hermitian_eig,
    hermitian_eig_batch,
)
from app.errors import ZeroPowerPixel

logger = logging.getLogger(__name__)

NODATA = -9999.0
LOG3 = np.log(3.0)


@dataclass(frozen=True)
class Haa:
    """Entropy and anisotropy in [0, 1], mean alpha in degrees [0, 90]"""
    entropy: float
    anisotropy: float
    alpha: float
    degenerate: bool = False


def _haa_arrays(w: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, ...]:
    """
    Vectorized parameters from clamped eigenvalues (..., 3) and eigenvector columns (..., 3, 3).

    Eigenvalues within EIG_TOLERANCE of the trace count as zero. Callers guarantee trace > 0.
    """
    total = np.sum(w, axis=-1, keepdims=True)
    w = np.where(w <= EIG_TOLERANCE * total, 0.0, w)
    p = w / np.sum(w, axis=-1, keepdims=True)

    # 0 log 0 = 0
    plogp = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    entropy = np.clip(-np.sum(plogp, axis=-1) / LOG3, 0.0, 1.0)

    minor = w[..., 1] + w[..., 2]
    degenerate = minor <= 0.0
    anisotropy = np.where(degenerate, 0.0, (w[..., 1] - w[..., 2]) / np.where(degenerate, 1.0, minor))

    first = np.clip(np.abs(v[..., 0, :]), 0.0, 1.0)
    alphas = np.degrees(np.arccos(first))
    alpha = np.clip(np.sum(p * alphas, axis=-1), 0.0, 90.0)
    return entropy, np.clip(anisotropy, 0.0, 1.0), alpha, degenerate


def haa_from_matrix(m: HermitianMatrix3) -> Haa:
    """
    H/A/alpha of one coherency matrix.

    Raises:
        ZeroPowerPixel: trace <= 0
        DataIntegrityError: m is not positive semi-definite
    """
    if m.trace <= 0.0:
        raise ZeroPowerPixel(f"matrix trace is {m.trace:g}; H/A/alpha needs positive power")
    eig = hermitian_eig(m)
    h, a, alpha, degenerate = _haa_arrays(np.asarray(eig.eigenvalues), eig.eigenvectors)
    return Haa(float(h), float(a), float(alpha), bool(degenerate))


@dataclass(frozen=True, eq=False)
class HaaRaster:
    """
    Per-pixel H/A/alpha planes of shape (height, width).

    Pixels with valid=False (no power, or not positive semi-definite) carry 0 in
    every plane and are written as NODATA on export.
    """
    entropy: np.ndarray
    anisotropy: np.ndarray
    alpha: np.ndarray
    valid: np.ndarray
    degenerate: np.ndarray

    @property
    def height(self) -> int:
        return self.entropy.shape[0]

    @property
    def width(self) -> int:
        return self.entropy.shape[1]

    def pixel(self, row: int, col: int) -> Optional[Haa]:
        if not self.valid[row, col]:
            return None
        return Haa(
            float(self.entropy[row, col]),
            float(self.anisotropy[row, col]),
            float(self.alpha[row, col]),
            bool(self.degenerate[row, col]),
        )

    def planes(self, nodata: float = NODATA) -> Dict[str, np.ndarray]:
        """float32 export planes with nodata written into invalid pixels"""
        return {
            name: np.where(self.valid, getattr(self, name), nodata).astype(np.float32)
            for name in ("entropy", "anisotropy", "alpha")
        }


def haa_raster(raster: CoherencyRaster) -> HaaRaster:
    """Element-wise haa_from_matrix; invalid pixels are masked, never raised"""
    w, v = hermitian_eig_batch(raster.data, psd=False)
    trace = np.real(np.trace(raster.data, axis1=-2, axis2=-1))
    psd = w[..., -1] >= -EIG_TOLERANCE * np.maximum(trace, 0.0)
    valid = (trace > 0.0) & psd

    w = np.where(valid[..., None], np.maximum(w, 0.0), 1.0)
    h, a, alpha, degenerate = _haa_arrays(w, v)

    masked = int(valid.size - np.count_nonzero(valid))
    if masked:
        logger.warning(
            f"{masked} of {valid.size} pixels masked in H/A/alpha "
            f"({int(np.count_nonzero(trace <= 0.0))} without power)"
        )
    zero = np.zeros_like(h)
    return HaaRaster(
        entropy=np.where(valid, h, zero),
        anisotropy=np.where(valid, a, zero),
        alpha=np.where(valid, alpha, zero),
        valid=valid,
        degenerate=valid & degenerate,
    )


def _stretch(channel: np.ndarray, low: float, high: float) -> np.ndarray:
    finite = channel[np.isfinite(channel)]
    if finite.size == 0:
        return np.zeros(channel.shape, dtype=np.uint8)
    vmin, vmax = np.percentile(finite, [low, high])
    if vmax - vmin < np.finfo(np.float32).eps:
        return np.zeros(channel.shape, dtype=np.uint8)
    scaled = np.clip((channel - vmin) / (vmax - vmin), 0.0, 1.0)
    return np.round(np.nan_to_num(scaled) * 255.0).astype(np.uint8)


def pauli_rgb(raster: CoherencyRaster, low: float = 2.0, high: float = 98.0) -> np.ndarray:
    """
    Pauli composite: red T22 (double bounce), green T33 (volume), blue T11 (surface).

    Each channel is taken in dB and stretched between its low/high percentiles.

    Returns:
        uint8 array of shape (height, width, 3)
    """
    diagonal = np.real(np.diagonal(raster.data, axis1=-2, axis2=-1))
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(np.where(diagonal > 0.0, diagonal, np.nan))
    order = (1, 2, 0)
    return np.dstack([_stretch(db[..., i], low, high) for i in order])
