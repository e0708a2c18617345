"""
Shared pytest fixtures
The registry database points at a throw-away SQLite file before any app module is imported
"""

import os
import tempfile

os.environ["POLSAR_DATABASE_URL"] = f"sqlite:///{tempfile.mkdtemp(prefix='polsar-test-')}/registry.db"

from types import SimpleNamespace

import numpy as np
import pytest

from app.synth import generate_scene, select_training_pixels, three_class_scene


@pytest.fixture(scope="session")
def three_class():
    """Urban / vegetation / water scene, 9 looks, 10^4 pixels and 500 training pixels per class"""
    spec = three_class_scene(block=100, looks=9, seed=0, train_per_class=500)
    raster, truth = generate_scene(spec)
    train = select_training_pixels(truth, spec.train_per_class, spec.seed)
    return SimpleNamespace(spec=spec, raster=raster, truth=truth, train=train)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_psd(rng: np.random.Generator, count: int) -> np.ndarray:
    """Random full-rank Hermitian positive definite 3x3 matrices"""
    a = rng.normal(size=(count, 3, 3)) + 1j * rng.normal(size=(count, 3, 3))
    return a @ np.conj(np.swapaxes(a, 1, 2))
