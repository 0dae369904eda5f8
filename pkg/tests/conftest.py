import numpy as np
import pytest

from nkverify import _pykernels
from nkverify.chart import SphereChart, random_tangent_frame
from nkverify.nk import NKStructure, random_rotation

try:
    from nkverify import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def rotated(rng):
    return NKStructure(random_rotation(rng))


@pytest.fixture
def chart(rng):
    return SphereChart.random(rng)


def unit_point(rng):
    p = rng.normal(size=7)
    return p / np.linalg.norm(p)


def point_and_frame(rng):
    p = unit_point(rng)
    return p, random_tangent_frame(p, rng)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
