"""Shared fixtures: CDF tables are expensive, so build each geometry once."""

import pytest

from cylcov import CylinderGeometry, build_cdf

SQUAT = CylinderGeometry(R=120.0, H=20.0)
TALL = CylinderGeometry(R=20.0, H=120.0)
CUBIC = CylinderGeometry(R=50.0, H=50.0)
NEEDLE = CylinderGeometry(R=10.0, H=200.0)

REGIME_GEOMETRIES = (SQUAT, TALL, CUBIC, NEEDLE)

_cache = {}


def get_dist(geom, grid_size=2048):
    key = (geom, grid_size)
    if key not in _cache:
        _cache[key] = build_cdf(geom, grid_size)
    return _cache[key]


@pytest.fixture(scope="session")
def dist_for():
    return get_dist


@pytest.fixture(scope="session")
def squat_dist():
    return get_dist(SQUAT)


@pytest.fixture(scope="session")
def tall_dist():
    return get_dist(TALL)
