import math

import pytest

from hestonlaw.params import EvalContext, ModelParams

# strongly skewed reference set; v0 defaults to b (the abscissae ignore b and v0)
EXAMPLE = dict(a=2.0, b=0.0225, c=0.8, rho=-0.9)
# a milder equity-style calibration
DESK = dict(a=2.0, b=0.04, c=0.4, rho=-0.5)


def make_ctx(a, b, c, rho, t=1.0, v0=None, s0=1.0, mu=0.0):
    v0 = b if v0 is None else v0
    return EvalContext(ModelParams(a, b, c, rho, s0=s0, v0=v0, mu=mu), t)


@pytest.fixture
def example_ctx():
    return make_ctx(**EXAMPLE)


@pytest.fixture
def desk_ctx():
    return make_ctx(**DESK)


def rel(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


__all__ = ["EXAMPLE", "DESK", "make_ctx", "rel", "math", "ACCEPTANCE_LINES"]


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
