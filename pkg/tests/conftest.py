import numpy as np
import pytest

from hal.scenarios import build_sphere_es, build_sync, build_vehicle, r2_params
from hal.scenarios.es_affine import EsAffineParams, build_es_affine


@pytest.fixture(scope="session")
def vehicle():
    scenario, analytic = build_vehicle()
    return scenario, analytic


@pytest.fixture(scope="session")
def sync_r2():
    scenario, analytic = build_sync(r2_params())
    return scenario, analytic


@pytest.fixture(scope="session")
def es_plane():
    scenario, analytic = build_es_affine(EsAffineParams(n=2))
    return scenario, analytic


@pytest.fixture(scope="session")
def sphere():
    scenario, analytic = build_sphere_es()
    return scenario, analytic


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
