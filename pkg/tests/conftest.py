import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from topofam.corpus.builders import build_finfilt, build_finset, build_fintop  # noqa: E402


@pytest.fixture(scope="session")
def fintop():
    return build_fintop(2)


@pytest.fixture(scope="session")
def finfilt():
    return build_finfilt(2)


@pytest.fixture(scope="session")
def finset2():
    return build_finset(2)


@pytest.fixture(scope="session")
def finset1():
    return build_finset(1)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
