from __future__ import annotations

import numpy as np
import pytest

from distorder.contour import InverterConfig
from distorder.kernels import KernelEvaluator
from distorder.weights import linear_weight, uniform_weight


@pytest.fixture(scope="session")
def ke_uniform() -> KernelEvaluator:
    return KernelEvaluator(uniform_weight())


@pytest.fixture(scope="session")
def ke_linear() -> KernelEvaluator:
    return KernelEvaluator(linear_weight())


@pytest.fixture(scope="session")
def cfg_uniform(ke_uniform) -> InverterConfig:
    return InverterConfig(ke_uniform)


@pytest.fixture(scope="session")
def cfg_linear(ke_linear) -> InverterConfig:
    return InverterConfig(ke_linear)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240501)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
