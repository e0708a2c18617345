"""
Supervised complex Wishart classifier
Class centers from labeled training pixels, minimum Wishart distance assignment
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.special import gammaln

from app.core_types import Q, CoherencyRaster, HermitianMatrix3, MatrixLike
from app.errors import ConfigError, DataError, DegenerateClassError, MissingClassError

logger = logging.getLogger(__name__)

# Diagonal loading relative to the center's trace
LOADING = 1e-9
# A full-rank 3x3 complex sample covariance needs at least q^2 samples
MIN_CLASS_PIXELS = Q * Q
INVERSE_TOLERANCE = 1e-8


def _labels(name: str, labels, minimum: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise DataError(f"{name} must be a 2-D grid, got shape {labels.shape}")
    if labels.size and (labels.min() < minimum or labels.max() > 255):
        raise DataError(f"{name} labels must lie in [{minimum}, 255]")
    labels = labels.astype(np.uint8)
    labels.setflags(write=False)
    return labels


@dataclass(frozen=True, eq=False)
class LabelMask:
    """Per-pixel training or truth label; 0 = unlabeled"""
    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", _labels("label mask", self.labels, 0))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def class_ids(self) -> List[int]:
        return [int(c) for c in np.unique(self.labels) if c != 0]

    def counts(self) -> Dict[int, int]:
        ids, counts = np.unique(self.labels[self.labels != 0], return_counts=True)
        return {int(i): int(n) for i, n in zip(ids, counts)}


@dataclass(frozen=True, eq=False)
class ClassMap:
    """Per-pixel assigned class; every pixel is assigned"""
    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", _labels("class map", self.labels, 1))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]


def check_dimensions(raster: CoherencyRaster, mask) -> None:
    if (raster.height, raster.width) != (mask.height, mask.width):
        raise ConfigError(
            f"raster is {raster.width}x{raster.height} but mask is {mask.width}x{mask.height}"
        )


@dataclass(frozen=True, eq=False)
class WishartClass:
    """One class center with its cached log-determinant and inverse"""
    class_id: int
    center: HermitianMatrix3
    log_det: float
    inverse: np.ndarray

    @classmethod
    def from_center(cls, class_id: int, center: HermitianMatrix3) -> "WishartClass":
        """
        Raises:
            DegenerateClassError: center not positive definite or not invertible
        """
        full = center.full()
        if np.linalg.eigvalsh(full)[0] <= 0.0:
            raise DegenerateClassError(f"class {class_id}: center is not positive definite")
        sign, log_det = np.linalg.slogdet(full)
        inverse = np.linalg.inv(full)
        if sign.real <= 0.0 or np.max(np.abs(inverse @ full - np.eye(Q))) > INVERSE_TOLERANCE:
            raise DegenerateClassError(f"class {class_id}: center cannot be inverted reliably")
        return cls(class_id, center, float(log_det), inverse)


@dataclass(frozen=True, eq=False)
class WishartModel:
    """Class centers sorted by class id plus the look count seen in training"""
    classes: Tuple[WishartClass, ...]
    looks: int

    def __post_init__(self):
        classes = tuple(sorted(self.classes, key=lambda c: c.class_id))
        ids = [c.class_id for c in classes]
        if not ids:
            raise MissingClassError("a Wishart model needs at least one class")
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate class ids in model: {ids}")
        object.__setattr__(self, "classes", classes)

    @classmethod
    def from_centers(cls, centers: Dict[int, HermitianMatrix3], looks: int) -> "WishartModel":
        return cls(tuple(WishartClass.from_center(k, c) for k, c in centers.items()), looks)

    @property
    def class_ids(self) -> List[int]:
        return [c.class_id for c in self.classes]

    def entry(self, class_id: int) -> WishartClass:
        for c in self.classes:
            if c.class_id == class_id:
                return c
        raise MissingClassError(f"class {class_id} is not in the model")


def train_wishart(raster: CoherencyRaster, mask: LabelMask,
                  class_ids: Optional[Iterable[int]] = None) -> WishartModel:
    """
    Estimate one center per class as the mean coherency matrix of its training pixels.

    Args:
        raster: training raster
        mask: training labels, 0 = unused
        class_ids: declared classes; defaults to the labels present in the mask

    Raises:
        ConfigError: raster and mask dimensions differ
        MissingClassError: a declared class has no labeled pixel
        DegenerateClassError: a class has fewer than 9 pixels or a singular center
    """
    check_dimensions(raster, mask)
    declared = sorted(set(class_ids)) if class_ids is not None else mask.class_ids()
    if not declared:
        raise MissingClassError("training mask has no labeled pixels")

    counts = mask.counts()
    centers: Dict[int, HermitianMatrix3] = {}
    for class_id in declared:
        count = counts.get(class_id, 0)
        if count == 0:
            raise MissingClassError(f"class {class_id} has no training pixels")
        if count < MIN_CLASS_PIXELS:
            raise DegenerateClassError(
                f"class {class_id} has {count} training pixels, at least {MIN_CLASS_PIXELS} are required"
            )
        mean = raster.data[mask.labels == class_id].mean(axis=0)
        loading = LOADING * float(np.real(np.trace(mean)))
        centers[class_id] = HermitianMatrix3.from_array(mean + loading * np.eye(Q))
        logger.info(f"Wishart class {class_id}: {count} pixels, center trace {centers[class_id].trace:.6g}")

    return WishartModel.from_centers(centers, raster.looks)


def _full(z: MatrixLike) -> np.ndarray:
    if isinstance(z, HermitianMatrix3):
        return z.full()
    return np.asarray(z, dtype=np.complex128)


def wishart_distance(z: MatrixLike, entry: WishartClass) -> float:
    """d = ln|Sigma| + tr(Sigma^-1 Z)"""
    return entry.log_det + float(np.real(np.trace(entry.inverse @ _full(z))))


def distance_raster(raster: CoherencyRaster, model: WishartModel) -> np.ndarray:
    """Distances to every class, shape (height, width, K) in model class order"""
    inverses = np.stack([c.inverse for c in model.classes])
    log_dets = np.array([c.log_det for c in model.classes])
    traces = np.real(np.einsum("kij,hwji->hwk", inverses, raster.data))
    return log_dets + traces


def classify_wishart(raster: CoherencyRaster, model: WishartModel) -> ClassMap:
    """Minimum-distance assignment; ties go to the lowest class id"""
    d = distance_raster(raster, model)
    ids = np.array(model.class_ids, dtype=np.uint8)
    labels = ids[np.argmin(d, axis=-1)]
    logger.info(f"Classified {raster.width}x{raster.height} raster into {len(ids)} Wishart classes")
    return ClassMap(labels)


def log_normalizer(n: int, q: int = Q) -> float:
    """ln K(n, q) = q(q-1)/2 ln(pi) + sum_{i=1..q} ln Gamma(n - i + 1)"""
    return q * (q - 1) / 2.0 * math.log(math.pi) + float(sum(gammaln(n - i + 1) for i in range(1, q + 1)))


def wishart_log_pdf(z: MatrixLike, sigma: MatrixLike, n: int, normalized: bool = True) -> float:
    """
    Log density of the n-look complex Wishart distribution at Z.

    ln p = q n ln n + (n - q) ln|Z| - n tr(Sigma^-1 Z) - ln K(n, q) - n ln|Sigma|

    With normalized=False the terms that do not depend on Sigma (ln K and the
    |Z| term) are dropped; this form is defined for every n >= 1, while the
    full density needs n >= q.
    """
    if n < 1:
        raise ConfigError(f"looks must be >= 1, got {n}")
    if normalized and n < Q:
        raise ConfigError(f"the Wishart density needs n >= {Q} looks, got {n}")
    z = _full(z)
    s = _full(sigma)
    _, log_det_sigma = np.linalg.slogdet(s)
    trace = float(np.real(np.trace(np.linalg.solve(s, z))))
    value = Q * n * math.log(n) - n * trace - n * float(log_det_sigma)
    if normalized:
        _, log_det_z = np.linalg.slogdet(z)
        value += (n - Q) * float(log_det_z) - log_normalizer(n)
    return value
