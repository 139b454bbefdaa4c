import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from metallic_slant import SamplingPlan, builtin_example1, builtin_example2, metallic_number

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ex1():
    return builtin_example1(1, 1)


@pytest.fixture(scope="session")
def ex2():
    return builtin_example2(2, 1, 1)


@pytest.fixture
def small_plan():
    return SamplingPlan(seed=7, count=8, dirs=4)


def rotated_structure_matrix(params, m=7, a=0, b=2, axis=4, rate=0.3):
    """Expression matrix of R J0 R^T, R a rotation in the (a, b) plane by rate * x_{axis+1}.

    J0 = diag(sigma, ..., sigma_bar at index b); pointwise metallic and symmetric,
    but not parallel, so it violates the locally-metallic hypothesis.
    """
    diag = ["sigma"] * m
    diag[b] = "sigma_bar"
    rows = [["0"] * m for _ in range(m)]
    for i in range(m):
        rows[i][i] = diag[i]
    ang = f"({rate}*x{axis + 1})"
    c, s = f"cos{ang}", f"sin{ang}"
    # conjugate the 2x2 block diag(sigma, sigma_bar) by the rotation
    rows[a][a] = f"sigma*{c}^2 + sigma_bar*{s}^2"
    rows[b][b] = f"sigma*{s}^2 + sigma_bar*{c}^2"
    rows[a][b] = rows[b][a] = f"(sigma - sigma_bar)*{c}*{s}"
    return rows


def numeric_structure(rows, params, x):
    from metallic_slant import eval_value, parse
    m = len(rows)
    v = [f"x{i + 1}" for i in range(m)]
    return np.array([[eval_value(parse(e, v, params), x) for e in r] for r in rows])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
