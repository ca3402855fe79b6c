from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from skewlab import ContinuedFraction, Indicator, StepFunction, SystemConfig
from skewlab.reference import THREE_MINUS_ONE, reference_config, running_example

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_cfg(quotients, beta="1/4", k=3, pieces=THREE_MINUS_ONE, left=0, odd_mode=False):
    return SystemConfig(
        k=k,
        alpha=ContinuedFraction.of(quotients),
        indicator=Indicator(Fraction(beta), Fraction(left)),
        f=StepFunction.replicated(pieces, k),
        odd_mode=odd_mode,
    )


@pytest.fixture
def five_eighths():
    """Running example with alpha exactly 5/8."""
    return running_example((1, 1, 1, 2))


@pytest.fixture(scope="session")
def running():
    return running_example()


@pytest.fixture(scope="session")
def reference():
    return reference_config()


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
