import numpy as np
import pytest

from robonav import kernels
from robonav.calibration import CameraIntrinsics
from robonav.synthcam import calibration_views

TRUE_K = CameraIntrinsics(fx=800.0, fy=780.0, skew=0.5, cx=320.0, cy=240.0)

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run a test once per kernel implementation, restoring the default afterwards."""
    previous = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


@pytest.fixture(scope="session")
def true_k():
    return TRUE_K


@pytest.fixture(scope="session")
def clean_views():
    """20 noiseless views of the 13x12-corner board and their true poses."""
    return calibration_views(TRUE_K, n_views=20, noise_px=0.0, seed=11)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
