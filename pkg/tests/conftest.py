import math
import sys

import pytest
from hypothesis import settings

from twoway_ic.channel import ChannelParams

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def ref_point():
    return ChannelParams(100.0, 10.0)


def db_grid(start=0, stop=60, step=1):
    return [ChannelParams.from_db(s, i) for s in range(start, stop + 1, step) for i in range(start, stop + 1, step)]


def bits(x):
    return math.log2(x)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
