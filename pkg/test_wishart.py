"""
Tests for the supervised complex Wishart classifier
"""

import math

import numpy as np
import pytest

from app.core_types import CoherencyRaster, HermitianMatrix3
from app.errors import ConfigError, DegenerateClassError, MissingClassError
from app.evaluation import confusion, overall_accuracy
from app.models import Rectangle, SceneClass, SceneSpec
from app.synth import generate_scene
from app.wishart import (
    LabelMask,
    WishartClass,
    WishartModel,
    classify_wishart,
    distance_raster,
    train_wishart,
    wishart_distance,
    wishart_log_pdf,
)
from conftest import random_psd

Q = 3


def full_log_pdf(z: np.ndarray, sigma: np.ndarray, n: int) -> float:
    """Complex Wishart log density written out term by term"""
    log_k = Q * (Q - 1) / 2 * math.log(math.pi) + sum(math.lgamma(n - i + 1) for i in range(1, Q + 1))
    det_z = np.linalg.det(z).real
    det_sigma = np.linalg.det(sigma).real
    trace = np.trace(np.linalg.inv(sigma) @ z).real
    return (Q * n * math.log(n) + (n - Q) * math.log(det_z) - n * trace
            - log_k - n * math.log(det_sigma))


def class_dependent_log_pdf(z: np.ndarray, sigma: np.ndarray, n: int) -> float:
    """The Sigma-dependent part of the log density, -n ln|Sigma| - n tr(Sigma^-1 Z); defined for any n"""
    det_sigma = np.linalg.det(sigma).real
    trace = np.trace(np.linalg.inv(sigma) @ z).real
    return -n * math.log(det_sigma) - n * trace


def test_distance_anchors():
    identity = WishartClass.from_center(1, HermitianMatrix3.identity())
    doubled = WishartClass.from_center(2, HermitianMatrix3.diag(2.0, 2.0, 2.0))
    z = HermitianMatrix3.identity()
    assert wishart_distance(z, identity) == pytest.approx(3.0)
    assert wishart_distance(z, doubled) == pytest.approx(3 * math.log(2.0) + 1.5)


def test_distance_ranking_matches_full_density(rng):
    """Test that ordering classes by distance equals ordering by likelihood for n in {1, 9, 16}"""
    for trial in range(100):
        n = (1, 9, 16)[trial % 3]
        sigmas = random_psd(rng, 4) + 0.1 * np.eye(3)
        z = random_psd(rng, 1)[0] / 3.0
        entries = [WishartClass.from_center(k, HermitianMatrix3.from_array(s)) for k, s in enumerate(sigmas, 1)]
        by_distance = np.argsort([wishart_distance(z, e) for e in entries])
        if n >= Q:
            likelihood = [full_log_pdf(z, s, n) for s in sigmas]
        else:
            likelihood = [class_dependent_log_pdf(z, s, n) for s in sigmas]
        assert list(by_distance) == list(np.argsort(likelihood)[::-1])


def test_log_pdf_matches_written_out_density(rng):
    z, sigma = random_psd(rng, 2)
    assert wishart_log_pdf(z, sigma, 9) == pytest.approx(full_log_pdf(z, sigma, 9), rel=1e-10)


def test_unnormalized_log_pdf_is_scaled_distance(rng):
    z, sigma = random_psd(rng, 2)
    entry = WishartClass.from_center(1, HermitianMatrix3.from_array(sigma))
    for n in (1, 4, 9):
        value = -wishart_log_pdf(z, sigma, n, normalized=False) / n
        assert value == pytest.approx(wishart_distance(z, entry) - Q * math.log(n), rel=1e-10)


def test_full_density_needs_three_looks():
    with pytest.raises(ConfigError):
        wishart_log_pdf(np.eye(3), np.eye(3), 1)


def test_singular_center_is_rejected():
    with pytest.raises(DegenerateClassError):
        WishartClass.from_center(1, HermitianMatrix3.diag(1.0, 1.0, 0.0))


def test_duplicate_class_ids():
    entry = WishartClass.from_center(1, HermitianMatrix3.identity())
    with pytest.raises(ConfigError):
        WishartModel((entry, entry), looks=1)


def test_ties_go_to_lowest_class_id():
    model = WishartModel.from_centers({3: HermitianMatrix3.identity(), 2: HermitianMatrix3.identity()}, looks=1)
    raster = CoherencyRaster(np.broadcast_to(np.eye(3, dtype=np.complex128), (2, 2, 3, 3)))
    assert np.all(classify_wishart(raster, model).labels == 2)


def test_distance_raster_matches_scalar_distance(rng):
    raster = CoherencyRaster(random_psd(rng, 6).reshape(2, 3, 3, 3))
    model = WishartModel.from_centers(
        {1: HermitianMatrix3.identity(), 2: HermitianMatrix3.diag(3.0, 1.0, 0.5)}, looks=1
    )
    d = distance_raster(raster, model)
    assert d.shape == (2, 3, 2)
    assert d[1, 2, 1] == pytest.approx(wishart_distance(raster.pixel(1, 2), model.entry(2)))


def _small_raster(rng, height=4, width=5):
    return CoherencyRaster(random_psd(rng, height * width).reshape(height, width, 3, 3))


def test_training_center_is_class_mean(rng):
    raster = _small_raster(rng)
    labels = np.zeros((4, 5), dtype=np.uint8)
    labels[:2] = 1
    labels[2:] = 2
    model = train_wishart(raster, LabelMask(labels))
    expected = raster.data[:2].reshape(-1, 3, 3).mean(axis=0)
    np.testing.assert_allclose(model.entry(1).center.full(), expected, rtol=1e-6)
    assert model.class_ids == [1, 2]


def test_training_needs_nine_pixels_per_class(rng):
    labels = np.zeros((4, 5), dtype=np.uint8)
    labels[0, :5] = 1
    with pytest.raises(DegenerateClassError):
        train_wishart(_small_raster(rng), LabelMask(labels))


def test_training_declared_class_without_pixels(rng):
    labels = np.ones((4, 5), dtype=np.uint8)
    with pytest.raises(MissingClassError):
        train_wishart(_small_raster(rng), LabelMask(labels), class_ids=[1, 2])


def test_training_dimension_mismatch(rng):
    with pytest.raises(ConfigError):
        train_wishart(_small_raster(rng), LabelMask(np.ones((5, 4), dtype=np.uint8)))


def test_three_class_scene_accuracy(three_class):
    """Test overall accuracy on the urban / vegetation / water scene"""
    model = train_wishart(three_class.raster, three_class.train)
    assert model.looks == 9
    cm = confusion(three_class.truth, classify_wishart(three_class.raster, model))
    assert overall_accuracy(cm) >= 90.0
    np.testing.assert_allclose(cm.percentages.sum(axis=1), 100.0, atol=0.01)


def _random_model(rng, ids):
    centers = random_psd(rng, len(ids)) + 0.2 * np.eye(3)
    return {k: HermitianMatrix3.from_array(c) for k, c in zip(ids, centers)}


@pytest.mark.parametrize("c", [1e-3, 7.5, 1e3])
def test_common_scaling_keeps_the_decision(rng, c):
    raster = _small_raster(rng, 6, 7)
    centers = _random_model(rng, [1, 2, 3])
    model = WishartModel.from_centers(centers, looks=9)
    scaled = WishartModel.from_centers({k: v.scaled(c) for k, v in centers.items()}, looks=9)
    scaled_raster = CoherencyRaster(raster.data * c, looks=9)
    np.testing.assert_array_equal(
        classify_wishart(scaled_raster, scaled).labels, classify_wishart(raster, model).labels
    )


def test_relabeling_permutes_the_output(rng):
    raster = _small_raster(rng, 6, 7)
    centers = _random_model(rng, [1, 2, 3])
    relabel = {1: 7, 2: 4, 3: 9}
    original = classify_wishart(raster, WishartModel.from_centers(centers, looks=9)).labels
    renamed = classify_wishart(
        raster, WishartModel.from_centers({relabel[k]: v for k, v in centers.items()}, looks=9)
    ).labels
    np.testing.assert_array_equal(renamed, np.vectorize(relabel.get)(original))


def test_training_recovers_class_covariances():
    """Test two diagonal classes, 9 looks, 2500 pixels each: centers within 10% of the truth"""
    truth = {1: np.diag([1.0, 0.1, 0.1]), 2: np.diag([0.1, 1.0, 0.1])}
    spec = SceneSpec(
        width=100, height=50, looks=9, seed=21, train_per_class=2500,
        classes=[
            SceneClass(class_id=1, center=[1.0, 0.1, 0.1, 0, 0, 0, 0, 0, 0],
                       regions=[Rectangle(x0=0, y0=0, x1=50, y1=50)]),
            SceneClass(class_id=2, center=[0.1, 1.0, 0.1, 0, 0, 0, 0, 0, 0],
                       regions=[Rectangle(x0=50, y0=0, x1=100, y1=50)]),
        ],
    )
    raster, labels = generate_scene(spec)
    model = train_wishart(raster, labels)
    for class_id, sigma in truth.items():
        estimate = model.entry(class_id).center.full()
        assert np.linalg.norm(estimate - sigma) <= 0.1 * np.linalg.norm(sigma)
    assert overall_accuracy(confusion(labels, classify_wishart(raster, model))) >= 99.0


def test_training_pixels_score_at_least_as_well_as_held_out(three_class):
    """Accuracy on the training pixels against the rest of the scene, within 2 points of sampling noise"""
    model = train_wishart(three_class.raster, three_class.train)
    predicted = classify_wishart(three_class.raster, model)
    held_out = np.where(three_class.train.labels == 0, three_class.truth.labels, 0)
    on_training = overall_accuracy(confusion(three_class.train, predicted))
    on_held_out = overall_accuracy(confusion(LabelMask(held_out), predicted))
    assert on_training >= on_held_out - 2.0
