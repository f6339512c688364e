import math

import pytest

from fucik.cli import PRESETS, load_config
from fucik.sl_core import PiecewiseFn, SLProblem

ACCEPTANCE: dict[int, str] = {}


def constant_problem(length=math.pi, q=None):
    return SLProblem.single(0.0, length, PiecewiseFn.constant(1.0), q=q)


@pytest.fixture(scope="session")
def presets():
    return {name: load_config(name).problem for name in PRESETS}


@pytest.fixture(scope="session")
def const():
    return constant_problem()


@pytest.fixture(scope="session")
def long_const():
    return constant_problem(10.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[num])


@pytest.fixture(scope="session")
def report_text():
    """``cmd_report`` output per preset, built once per session."""
    from fucik.cli import cmd_report
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = cmd_report(load_config(name))
        return cache[name]
    return get
