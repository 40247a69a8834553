import numpy as np
import pytest

from minkowski_neumann import (RadialProblem, WeightSpec, NonlinearitySpec, constants_for,
                               desk_problem, detect_sign_structure, figure1_problem,
                               find_two_solutions)

# desk problem: N=1, R=3, a = 1 on [1, 2], -1 elsewhere, g = u^2
DESK_LAMBDA_STAR = 2165.2271999219128

ACCEPTANCE = []


def report(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" :: {detail}" if detail else "")
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fig1():
    return figure1_problem()


@pytest.fixture(scope="session")
def fig1_structure(fig1):
    return detect_sign_structure(fig1, strict=True)


@pytest.fixture(scope="session")
def fig1_bundle(fig1, fig1_structure):
    return constants_for(fig1, fig1_structure)


@pytest.fixture(scope="session")
def fig1_pair(fig1, fig1_bundle, fig1_structure):
    return find_two_solutions(fig1, fig1_bundle, structure=fig1_structure)


@pytest.fixture(scope="session")
def desk_bundle():
    return constants_for(desk_problem(1.0))


@pytest.fixture(scope="session")
def desk():
    return desk_problem(2 * DESK_LAMBDA_STAR)


@pytest.fixture(scope="session")
def desk_pair(desk, desk_bundle):
    return find_two_solutions(desk, desk_bundle)


@pytest.fixture(scope="session")
def smooth():
    """Fig.-1 variant with a C-infinity weight cos((r-5)^2 + 1)."""
    return RadialProblem(
        2, 5.0,
        WeightSpec("cosine-shifted", {"center": 5.0, "shift": 1.0, "exponent": 2.0}),
        NonlinearitySpec("power-sum", {"p": 2.0, "q": 3.0}), 0.1)


def negative_weight_problem(N=1, R=3.0, lam=1.0):
    return RadialProblem(N, R, WeightSpec("table", {"r": [0.0, R], "a": [-1.0, -1.0]}),
                         NonlinearitySpec("power", {"p": 2.0}), lam)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
