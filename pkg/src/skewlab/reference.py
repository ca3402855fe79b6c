"""Built-in configurations used by the tests, the CLI and the docs.

``running_example``: k = 3, indicator [0, 1/4), f = 3 on [0, 1/4) and -1 on
[1/4, 1) on every level. Its expansion starts ``[1, 1, 1, 2]`` (so the
fourth convergent is 5/8) and plants large quotients after the odd
denominators 19 and 1183.

``reference_config``: same f with indicator [0, 3/10), expansion of ones
with large quotients planted after q = 5, 203 and 6095.
"""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

from skewlab.dynamics import Indicator, StepFunction, SystemConfig
from skewlab.rational import ContinuedFraction

RUNNING_QUOTIENTS = (1, 1, 1, 2, 2, 20, 3, 30, 1, 1, 1, 1)
REFERENCE_QUOTIENTS = (1, 1, 1, 1, 40, 30, 40) + (1,) * 17
THREE_MINUS_ONE = ((Fraction(0), 3), (Fraction(1, 4), -1))


def running_example(quotients=RUNNING_QUOTIENTS) -> SystemConfig:
    return SystemConfig(
        k=3,
        alpha=ContinuedFraction.of(quotients),
        indicator=Indicator(Fraction(1, 4)),
        f=StepFunction.replicated(THREE_MINUS_ONE, 3),
        odd_mode=True,
        name="running-example",
    )


def reference_config() -> SystemConfig:
    return SystemConfig(
        k=3,
        alpha=ContinuedFraction.of(REFERENCE_QUOTIENTS),
        indicator=Indicator(Fraction(3, 10)),
        f=StepFunction.replicated(THREE_MINUS_ONE, 3),
        odd_mode=True,
        name="reference",
    )


BUILTIN = {"running-example": running_example, "reference": reference_config}


def builtin_config_text(name: str) -> str:
    return resources.files("skewlab.configs").joinpath(f"{name}.json").read_text()
