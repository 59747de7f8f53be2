"""Shared, cached orbit runs; integrations are deterministic so reuse is safe."""

from functools import lru_cache

import pytest

from hlk.model import ModelParams
from hlk.orbits import OrbitOptions, OrbitSeed, integrate_orbit, reconstruct_profile


@lru_cache(maxsize=None)
def axis_trace(n, lam, delta):
    p = ModelParams(n, lam)
    seed = OrbitSeed.axis_up(p) if delta == 1 else OrbitSeed.axis_down(p)
    return integrate_orbit(seed)


@lru_cache(maxsize=None)
def axis_profile(n, lam, delta):
    return reconstruct_profile(axis_trace(n, lam, delta))


@lru_cache(maxsize=None)
def interior_trace(n, lam, x0, y0=0.0, eps=1, direction=1):
    p = ModelParams(n, lam)
    return integrate_orbit(OrbitSeed.interior(p, x0, y0, eps), opts=OrbitOptions(direction=direction))


@pytest.fixture(scope="session")
def traces():
    return axis_trace


@pytest.fixture(scope="session")
def profiles():
    return axis_profile


@pytest.fixture(scope="session")
def interior():
    return interior_trace


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
