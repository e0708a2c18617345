"""
Tests for the numeric substrate: vectors, Hermitian matrices, rasters and the Jacobi eigensolver
"""

import numpy as np
import pytest

from app.core_types import (
    SQRT2,
    CoherencyRaster,
    HermitianMatrix3,
    ScatteringSample,
    SlcRaster,
    coherency_to_covariance,
    covariance_to_coherency,
    hermitian_eig,
    hermitian_eig_batch,
    multilook,
    outer_product,
    pauli_vector,
    single_look_raster,
    target_vector,
)
from app.errors import DataError, DataIntegrityError, EmptyWindow
from conftest import random_psd


def test_pauli_vector_of_surface_scatterer():
    """Test that S_HH = S_VV, S_HV = 0 lands entirely in the first Pauli component"""
    k = pauli_vector(ScatteringSample(1.0, 0.0, 1.0))
    assert k.k1 == pytest.approx(SQRT2)
    assert abs(k.k2) == 0.0 and abs(k.k3) == 0.0


def test_pauli_vector_of_double_bounce_and_mixed_samples():
    k = pauli_vector(ScatteringSample(1.0, 0.0, -1.0))
    assert (k.k1, k.k2, k.k3) == pytest.approx((0.0, SQRT2, 0.0))
    k = pauli_vector(ScatteringSample(0.3 + 0.1j, 0.05j, 0.2 - 0.4j))
    assert k.k1 == pytest.approx((0.5 - 0.3j) / SQRT2)
    assert k.k2 == pytest.approx((0.1 + 0.5j) / SQRT2)
    assert k.k3 == pytest.approx(0.1j / SQRT2)


def test_target_vector_scales_cross_pol():
    h = target_vector(ScatteringSample(1.0, 1j, 2.0))
    assert h.h2 == pytest.approx(SQRT2 * 1j)
    assert h.power == pytest.approx(1.0 + 2.0 + 4.0)


def test_sample_rejects_non_finite():
    with pytest.raises(DataError):
        ScatteringSample(float("nan"), 0.0, 1.0)


def test_outer_product_is_rank_one_with_trace_power():
    """Test the single-look matrix k k^H"""
    s = ScatteringSample(0.3 + 0.1j, -0.2j, 0.7)
    k = pauli_vector(s)
    t = outer_product(k)
    assert t.trace == pytest.approx(k.power)
    eig = hermitian_eig(t)
    assert eig.eigenvalues[1] == pytest.approx(0.0, abs=1e-12)
    assert eig.eigenvalues[2] == pytest.approx(0.0, abs=1e-12)


def test_pauli_and_lexicographic_bases_are_related_by_similarity():
    """Test T = D C D^H for the same scattering sample"""
    s = ScatteringSample(1.0 - 0.5j, 0.25 + 0.1j, -0.3 + 0.8j)
    t = outer_product(pauli_vector(s)).full()
    c = outer_product(target_vector(s))
    np.testing.assert_allclose(covariance_to_coherency(c).full(), t, atol=1e-12)
    np.testing.assert_allclose(coherency_to_covariance(covariance_to_coherency(c)).full(), c.full(), atol=1e-12)


def test_basis_similarity_on_random_samples(rng):
    for _ in range(200):
        parts = rng.normal(size=(3, 2))
        s = ScatteringSample(*(complex(re, im) for re, im in parts))
        t = outer_product(pauli_vector(s)).full()
        c = outer_product(target_vector(s))
        scale = max(1.0, float(np.abs(t).max()))
        np.testing.assert_allclose(covariance_to_coherency(c).full(), t, atol=1e-12 * scale)
        assert target_vector(s).power == pytest.approx(pauli_vector(s).power, rel=1e-12)


def test_multilook_averages_outer_products():
    samples = [target_vector(ScatteringSample(1.0, 0.0, 0.0)), target_vector(ScatteringSample(0.0, 0.0, 1.0))]
    z = multilook(samples)
    assert (z.t11, z.t22, z.t33) == pytest.approx((0.5, 0.0, 0.5))


def test_multilook_of_empty_window():
    with pytest.raises(EmptyWindow):
        multilook([])


def test_hermitian_matrix_planes_round_trip():
    m = HermitianMatrix3(1.0, 0.8, 0.1, t12=0.6 - 0.2j, t13=0.05j, t23=-0.01)
    assert HermitianMatrix3.from_planes(m.to_planes()) == m
    np.testing.assert_array_equal(m.full(), np.conj(m.full().T))


def test_coherency_raster_is_hermitian_and_read_only():
    data = np.zeros((2, 2, 3, 3), dtype=np.complex128)
    data[..., 0, 0] = 1.0
    data[..., 0, 1] = 0.5
    raster = CoherencyRaster(data, looks=4)
    assert raster.data[0, 0, 1, 0] == pytest.approx(0.25)
    assert not raster.data.flags.writeable
    assert raster.span().shape == (2, 2)


def test_coherency_raster_rejects_non_finite():
    data = np.zeros((1, 1, 3, 3), dtype=np.complex128)
    data[0, 0, 1, 1] = np.inf
    with pytest.raises(DataError):
        CoherencyRaster(data)


def test_single_look_raster_from_slc():
    slc = SlcRaster(np.array([[[1.0, 0.0, 1.0], [1.0, 0.0, -1.0]]]))
    raster = single_look_raster(slc)
    assert raster.looks == 1
    assert raster.pixel(0, 0).t11 == pytest.approx(2.0)
    assert raster.pixel(0, 1).t22 == pytest.approx(2.0)


def test_eigendecomposition_of_random_psd_matrices(rng):
    """Test reconstruction, orthonormality and ordering over 10^4 random matrices"""
    m = random_psd(rng, 10_000)
    w, v = hermitian_eig_batch(m)

    assert np.all(np.diff(w, axis=-1) <= 0.0)
    rebuilt = (v * w[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2))
    scale = np.maximum(1.0, np.linalg.norm(m, axis=(1, 2)))
    assert np.all(np.linalg.norm(rebuilt - m, axis=(1, 2)) <= 1e-10 * scale)

    gram = np.conj(np.swapaxes(v, 1, 2)) @ v
    assert np.max(np.abs(gram - np.eye(3))) <= 1e-10


def test_eigendecomposition_rejects_indefinite_matrix():
    with pytest.raises(DataIntegrityError):
        hermitian_eig(HermitianMatrix3(1.0, 1.0, -0.5))


def test_eigendecomposition_clamps_drift():
    """Test that eigenvalues a hair below zero are clamped rather than rejected"""
    m = HermitianMatrix3(1.0, 0.0, -1e-12)
    assert hermitian_eig(m).eigenvalues[2] == 0.0


def test_eigendecomposition_of_diagonal_matrix():
    eig = hermitian_eig(HermitianMatrix3.diag(0.2, 0.5, 0.3))
    assert eig.eigenvalues == pytest.approx((0.5, 0.3, 0.2))
    assert abs(eig.vector(0)[1]) == pytest.approx(1.0)
