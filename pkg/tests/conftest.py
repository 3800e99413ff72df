import os

import mpmath
import pytest
from hypothesis import HealthCheck, settings

from margulis.cf import Angle, liouville_angle

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def mp_alpha(quotients, dps=120):
    """Independent evaluation of [0; a_1, a_2, ...] by mpmath from a long truncation."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(0)
        for a in reversed(quotients):
            x = 1 / (a + x)
        return +x


def periodic_quotients(period, prefix=(), count=400):
    out = list(prefix)
    while len(out) < count:
        out.extend(period)
    return out[:count]


@pytest.fixture(scope="session")
def golden():
    return Angle.periodic((1,))


@pytest.fixture(scope="session")
def one_three():
    return Angle.periodic((1, 3))


@pytest.fixture(scope="session")
def silver():
    return Angle.periodic((2,))


@pytest.fixture(scope="session")
def liouville():
    return liouville_angle((1,))


# one PASS/FAIL line per acceptance criterion, shown whether or not output is captured
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
