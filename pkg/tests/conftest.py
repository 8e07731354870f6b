import math

import pytest
from hypothesis import HealthCheck, settings

from curvtrack.manifold import Kind, ManifoldSpec

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def unit_sphere():
    return ManifoldSpec(Kind.SPHERE, 1.0, 0.0, 1.0)


@pytest.fixture
def sphere_mhz():
    return ManifoldSpec.from_mhz(Kind.SPHERE, 1.735, 0.0, 1.735)


@pytest.fixture
def torus_mhz():
    return ManifoldSpec.from_mhz(Kind.TORUS, 1.735, 0.0, 1.735)


@pytest.fixture
def torus_khz():
    return ManifoldSpec.from_mhz(Kind.TORUS, 0.01735, 0.0, 0.01735)


def relerr(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


PI = math.pi
