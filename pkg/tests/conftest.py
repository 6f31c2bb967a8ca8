import math

import pytest
from hypothesis import HealthCheck, settings

from spectrabound.geometry import Disk, Ellipse, HalfPlane, Polygon, Sector

settings.register_profile(
    "default",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

SQUARE = Polygon((1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j))


@pytest.fixture
def unit_disk():
    return Disk(0.0, 1.0)


@pytest.fixture
def ellipse21():
    return Ellipse(0.0, 2.0, 1.0)


@pytest.fixture
def square():
    return SQUARE


@pytest.fixture
def sector_quarter():
    return Sector(0.0, 0.0, math.pi / 4)


BOUNDED = [Disk(0.0, 1.0), Ellipse(0.0, 2.0, 1.0), SQUARE]
UNBOUNDED = [Sector(0.0, 0.0, math.pi / 4), Sector(1 + 1j, 0.7, math.pi / 6), HalfPlane(0.5j, 0.3)]


# --- acceptance summary -----------------------------------------------------

ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])
