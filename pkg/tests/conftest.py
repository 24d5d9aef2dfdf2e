"""Shared, session-scoped objects that are expensive to build."""
from __future__ import annotations

import time

import pytest
from hypothesis import HealthCheck, settings

from hclab.counterexample import solve_and_build
from hclab.debranges import build_clark, construct_example, power_spectrum

settings.register_profile(
    "artifact", max_examples=40, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("artifact")


@pytest.fixture(scope="session")
def bundle4():
    """K = 4 counterexample on the default dense window."""
    return solve_and_build(4)


@pytest.fixture(scope="session")
def bundle10():
    """K = 10 counterexample; enough shifted zeros for ten samples per side."""
    return solve_and_build(10, window=256)


@pytest.fixture(scope="session")
def two_point():
    return build_clark([-1.0, 1.0], [1.0, 1.0])


@pytest.fixture(scope="session")
def pipeline():
    """Power spectrum ``sign(n)|n|**1.5`` on ``[-200, 4200]`` with four blocks, and its runtime."""
    idx, t = power_spectrum(-200, 4200, 1.5)
    start = time.perf_counter()
    res = construct_example(idx, t, K=4)
    return res, time.perf_counter() - start
