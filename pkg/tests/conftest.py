import os

import pytest
from hypothesis import HealthCheck, settings

from resbundle import bundle as bd
from resbundle import manifold as mf
from resbundle.spectrum import SHParams, compute_spectrum

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=50, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def sp():
    return compute_spectrum(SHParams(0.2, 1.6))


@pytest.fixture(scope="session")
def mps(sp):
    return mf.sh_manifold(sp, "stable", 35, 0.5)


@pytest.fixture(scope="session")
def mpu(sp):
    return mf.sh_manifold(sp, "unstable", 35, 0.5)


@pytest.fixture(scope="session")
def frame(mps):
    B = bd.solve_bundle_coeffs(mps)
    bd.validate_bundle(B)
    return B


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "LINES", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[n])
