"""
Tests for entropy / anisotropy / mean alpha and the Pauli composite
"""

import math

import numpy as np
import pytest

from app.core_types import CoherencyRaster, HermitianMatrix3
from app.decomposition import NODATA, haa_from_matrix, haa_raster, pauli_rgb
from app.errors import DataIntegrityError, ZeroPowerPixel
from app.models import Rectangle, SceneClass, SceneSpec
from app.synth import generate_scene
from conftest import random_psd


def test_rank_one_matrix():
    """Test diag(1, 0, 0): a single pure surface mechanism"""
    haa = haa_from_matrix(HermitianMatrix3.diag(1.0, 0.0, 0.0))
    assert haa.entropy == pytest.approx(0.0, abs=1e-9)
    assert haa.alpha == pytest.approx(0.0, abs=1e-9)
    assert haa.anisotropy == 0.0
    assert haa.degenerate


def test_identity_is_fully_random():
    haa = haa_from_matrix(HermitianMatrix3.identity())
    assert haa.entropy == pytest.approx(1.0, abs=1e-9)
    assert haa.anisotropy == pytest.approx(0.0, abs=1e-9)
    assert haa.alpha == pytest.approx(60.0, abs=1e-9)


def test_diagonal_anchor():
    """Test diag(0.5, 0.3, 0.2) against the scalar formulas"""
    p = (0.5, 0.3, 0.2)
    haa = haa_from_matrix(HermitianMatrix3.diag(*p))
    assert haa.entropy == pytest.approx(-sum(x * math.log(x, 3) for x in p), abs=1e-9)
    assert haa.anisotropy == pytest.approx(0.2, abs=1e-9)
    assert haa.alpha == pytest.approx(45.0, abs=1e-9)


def test_bounds_on_random_matrices(rng):
    data = random_psd(rng, 10_000).reshape(100, 100, 3, 3)
    haa = haa_raster(CoherencyRaster(data))
    assert haa.valid.all()
    assert np.all((haa.entropy >= 0.0) & (haa.entropy <= 1.0))
    assert np.all((haa.anisotropy >= 0.0) & (haa.anisotropy <= 1.0))
    assert np.all((haa.alpha >= 0.0) & (haa.alpha <= 90.0))


@pytest.mark.parametrize("factor", [1e-3, 1.0, 1e3])
def test_scale_invariance(rng, factor):
    m = HermitianMatrix3.from_array(random_psd(rng, 1)[0])
    reference = haa_from_matrix(m)
    scaled = haa_from_matrix(m.scaled(factor))
    assert scaled.entropy == pytest.approx(reference.entropy, abs=1e-9)
    assert scaled.anisotropy == pytest.approx(reference.anisotropy, abs=1e-9)
    assert scaled.alpha == pytest.approx(reference.alpha, abs=1e-9)


def test_raster_matches_single_pixel(rng):
    data = random_psd(rng, 6).reshape(2, 3, 3, 3)
    raster = CoherencyRaster(data)
    haa = haa_raster(raster)
    single = haa_from_matrix(raster.pixel(1, 2))
    assert haa.pixel(1, 2).entropy == pytest.approx(single.entropy, abs=1e-12)
    assert haa.pixel(1, 2).alpha == pytest.approx(single.alpha, abs=1e-10)


def test_zero_power_pixel():
    with pytest.raises(ZeroPowerPixel):
        haa_from_matrix(HermitianMatrix3.diag(0.0, 0.0, 0.0))


def test_indefinite_pixel():
    with pytest.raises(DataIntegrityError):
        haa_from_matrix(HermitianMatrix3.diag(1.0, 0.5, -0.2))


def test_raster_masks_invalid_pixels():
    """Test that zero-power and indefinite pixels are masked and exported as nodata"""
    data = np.zeros((1, 3, 3, 3), dtype=np.complex128)
    data[0, 0] = np.eye(3)
    data[0, 2] = np.diag([1.0, 0.5, -0.2])
    haa = haa_raster(CoherencyRaster(data))
    assert haa.valid.tolist() == [[True, False, False]]
    assert haa.pixel(0, 1) is None
    planes = haa.planes()
    assert planes["entropy"][0, 1] == NODATA and planes["alpha"][0, 2] == NODATA
    assert planes["alpha"][0, 0] == pytest.approx(60.0)


def test_entropy_estimate_converges_with_looks():
    """Test that the sample entropy rises toward the entropy of the true covariance as looks grow"""
    center = [1.0, 0.5, 0.25, 0, 0, 0, 0, 0, 0]
    p = np.array(center[:3]) / sum(center[:3])
    true_entropy = float(-(p * np.log(p)).sum() / np.log(3.0))

    def mean_entropy(looks):
        spec = SceneSpec(
            width=50, height=50, looks=looks, seed=3,
            classes=[SceneClass(class_id=1, center=center, regions=[Rectangle(x0=0, y0=0, x1=50, y1=50)])],
        )
        raster, _ = generate_scene(spec)
        return float(haa_raster(raster).entropy.mean())

    single = mean_entropy(1)
    means = [mean_entropy(n) for n in (9, 25, 49)]
    assert single == pytest.approx(0.0, abs=1e-6)
    assert means[0] < means[1] < means[2]
    assert means[2] == pytest.approx(true_entropy, abs=0.05)


def test_pauli_rgb_channels():
    """Test channel order (double bounce, volume, surface) on a two-pixel raster"""
    data = np.zeros((1, 2, 3, 3), dtype=np.complex128)
    data[0, 0] = np.diag([1.0, 0.01, 0.01])
    data[0, 1] = np.diag([0.01, 1.0, 1.0])
    rgb = pauli_rgb(CoherencyRaster(data), low=0.0, high=100.0)
    assert rgb.dtype == np.uint8 and rgb.shape == (1, 2, 3)
    assert rgb[0, 0].tolist() == [0, 0, 255]
    assert rgb[0, 1].tolist() == [255, 255, 0]
