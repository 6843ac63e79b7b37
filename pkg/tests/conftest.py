import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dwarp.config import from_preset

settings.register_profile("dwarp", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dwarp")


@pytest.fixture(scope="session")
def presets():
    return {name: from_preset(name).build() for name in ("CFG-A", "CFG-B", "CFG-C", "CFG-D", "PLANE")}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.summary_lines():
            terminalreporter.write_line(line)
