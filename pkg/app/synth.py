"""
Synthetic scene generator
Class-conditional complex Wishart scenes with exact ground truth
"""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from app.core_types import (
    SQRT2,
    CoherencyRaster,
    HermitianMatrix3,
    SlcRaster,
    TargetVector,
    coherency_to_covariance,
    covariance_to_coherency,
    hermitize,
)
from app.errors import CholeskyError, ConfigError
from app.models import Rectangle, SceneClass, SceneSpec
from app.wishart import LabelMask

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.PCG64"
RNG_SEEDING = "SeedSequence([seed, row])"
# Cholesky pivots below this fraction of the trace are rejected
PIVOT_TOLERANCE = 1e-12


def cholesky_factor(sigma: HermitianMatrix3) -> np.ndarray:
    """
    Lower-triangular L with L L^H = sigma.

    Raises:
        CholeskyError: sigma is not positive definite
    """
    trace = sigma.trace
    if trace <= 0.0:
        raise CholeskyError(f"covariance trace is {trace:g}")
    try:
        lower = np.linalg.cholesky(sigma.full())
    except np.linalg.LinAlgError as e:
        raise CholeskyError(f"covariance is not positive definite: {e}") from e
    if np.min(np.real(np.diag(lower)) ** 2) <= PIVOT_TOLERANCE * trace:
        raise CholeskyError("covariance is numerically singular")
    return lower


def _circular_normals(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    """i.i.d. CN(0, 1) entries"""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / SQRT2


def sample_gaussian_vector(sigma: HermitianMatrix3, rng: np.random.Generator) -> TargetVector:
    """h = L g with g ~ CN(0, I), so h ~ CN(0, sigma)"""
    h = cholesky_factor(sigma) @ _circular_normals(rng, (3,))
    return TargetVector(*h)


def class_covariance(spec: SceneSpec, scene_class: SceneClass) -> HermitianMatrix3:
    """The class center as a covariance matrix of h"""
    center = scene_class.matrix()
    if spec.basis == "T":
        return coherency_to_covariance(center)
    return center


def validate_scene(spec: SceneSpec) -> np.ndarray:
    """
    Check the scene layout and return its truth labels.

    Raises:
        ConfigError: duplicate class ids, regions outside the raster, overlapping
            regions, uncovered pixels or a center that is not positive definite
    """
    ids = [c.class_id for c in spec.classes]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"duplicate class ids in scene: {ids}")

    labels = np.zeros((spec.height, spec.width), dtype=np.uint8)
    for scene_class in spec.classes:
        for r in scene_class.regions:
            if r.x1 > spec.width or r.y1 > spec.height:
                raise ConfigError(
                    f"class {scene_class.class_id} region {r.x0}:{r.y0}:{r.x1}:{r.y1} "
                    f"lies outside the {spec.width}x{spec.height} raster"
                )
            if np.any(labels[r.y0:r.y1, r.x0:r.x1]):
                raise ConfigError(f"class {scene_class.class_id} region {r.x0}:{r.y0}:{r.x1}:{r.y1} overlaps another")
            labels[r.y0:r.y1, r.x0:r.x1] = scene_class.class_id
        try:
            cholesky_factor(class_covariance(spec, scene_class))
        except CholeskyError as e:
            raise ConfigError(f"class {scene_class.class_id} center: {e}") from e

    uncovered = int(np.count_nonzero(labels == 0))
    if uncovered:
        raise ConfigError(f"scene regions leave {uncovered} pixel(s) uncovered")
    return labels


def _row_rng(seed: int, row: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, row])))


def _draw(spec: SceneSpec, looks: int):
    """Yield (row, labels, h) with h of shape (width, looks, 3) per row"""
    labels = validate_scene(spec)
    factors = np.zeros((256, 3, 3), dtype=np.complex128)
    for scene_class in spec.classes:
        factors[scene_class.class_id] = cholesky_factor(class_covariance(spec, scene_class))
    for row in range(spec.height):
        g = _circular_normals(_row_rng(spec.seed, row), (spec.width, looks, 3))
        h = np.einsum("wij,wkj->wki", factors[labels[row]], g)
        yield row, labels, h


def generate_scene(spec: SceneSpec) -> Tuple[CoherencyRaster, LabelMask]:
    """
    n-look coherency raster and its truth mask.

    Each row draws from its own PCG64 stream seeded with (seed, row), so the
    output is bit-identical for a given spec.
    """
    data = np.empty((spec.height, spec.width, 3, 3), dtype=np.complex128)
    labels = None
    for row, labels, h in _draw(spec, spec.looks):
        z = np.einsum("wki,wkj->wij", h, np.conj(h)) / spec.looks
        data[row] = covariance_to_coherency(z)
    logger.info(
        f"Generated {spec.width}x{spec.height} scene, {len(spec.classes)} classes, "
        f"{spec.looks} looks, seed {spec.seed}"
    )
    return CoherencyRaster(hermitize(data), looks=spec.looks), LabelMask(labels)


def generate_slc(spec: SceneSpec) -> Tuple[SlcRaster, LabelMask]:
    """Single-look scattering samples (S_HH, S_HV, S_VV) from the same class covariances"""
    data = np.empty((spec.height, spec.width, 3), dtype=np.complex128)
    labels = None
    for row, labels, h in _draw(spec, 1):
        h = h[:, 0, :]
        data[row] = np.stack([h[:, 0], h[:, 1] / SQRT2, h[:, 2]], axis=-1)
    logger.info(f"Generated {spec.width}x{spec.height} single-look scene, seed {spec.seed}")
    return SlcRaster(data), LabelMask(labels)


def select_training_pixels(mask: LabelMask, per_class: int, seed: int = 0) -> LabelMask:
    """Keep per_class randomly chosen pixels of every class (all of them when fewer)"""
    rng = np.random.default_rng(seed)
    flat = mask.labels.ravel()
    out = np.zeros_like(flat)
    for class_id in mask.class_ids():
        index = np.flatnonzero(flat == class_id)
        if len(index) > per_class:
            index = np.sort(rng.choice(index, size=per_class, replace=False))
        out[index] = class_id
    return LabelMask(out.reshape(mask.labels.shape))


def scene_metadata(spec: SceneSpec) -> Dict[str, Any]:
    """Description of how a scene was drawn, written next to synthetic datasets"""
    return {
        "rng": {"algorithm": RNG_ALGORITHM, "seeding": RNG_SEEDING, "seed": spec.seed},
        "width": spec.width,
        "height": spec.height,
        "looks": spec.looks,
        "basis": spec.basis,
        "train_per_class": spec.train_per_class,
        "classes": [
            {
                "id": c.class_id,
                "name": c.display_name,
                "center": list(c.center),
                "regions": [[r.x0, r.y0, r.x1, r.y1] for r in c.regions],
            }
            for c in spec.classes
        ],
    }


def three_class_scene(block: int = 100, looks: int = 9, seed: int = 0,
                      train_per_class: int = 500) -> SceneSpec:
    """
    Urban-like, vegetation-like and water-like classes side by side, block x block pixels each.

    Centers are coherency matrices: urban diag(1, 0.8, 0.1) with a strong T12,
    vegetation 0.5 I, water diag(0.4, 0.05, 0.02).
    """
    centers: List[Tuple[str, HermitianMatrix3]] = [
        ("Urban", HermitianMatrix3(1.0, 0.8, 0.1, t12=0.6)),
        ("Vegetation", HermitianMatrix3(0.5, 0.5, 0.5)),
        ("Water", HermitianMatrix3(0.4, 0.05, 0.02)),
    ]
    classes = [
        SceneClass(
            class_id=k + 1,
            name=name,
            center=list(center.to_planes()),
            regions=[Rectangle(x0=k * block, y0=0, x1=(k + 1) * block, y1=block)],
        )
        for k, (name, center) in enumerate(centers)
    ]
    return SceneSpec(
        width=3 * block, height=block, looks=looks, basis="T",
        seed=seed, train_per_class=train_per_class, classes=classes
    )
