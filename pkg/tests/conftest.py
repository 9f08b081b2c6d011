import numpy as np
import pytest

from hyperplate.assembly import Assembler
from hyperplate.forward import forward
from hyperplate.material import NeoHookean
from hyperplate.mesh import build_plate
from hyperplate.scenarios import build_scenario, true_coefficients
from hyperplate.verify import desk_problem

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def desk():
    """Default desk problem (2x8x8 cells, m = 16) and its excitation loads."""
    return desk_problem()


@pytest.fixture(scope="session")
def desk_truth(desk):
    problem, loads = desk
    asm = problem.assembler
    alpha = true_coefficients(build_scenario("A"), asm.grid2, asm.grid3)
    return alpha, forward(problem, alpha, loads).U


@pytest.fixture
def cube():
    return build_plate(((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)), (1, 1, 1))


@pytest.fixture
def small_assembler():
    mesh = build_plate(((-0.1, 0.1), (-1.0, 1.0), (-1.0, 1.0)), (2, 3, 3))
    return Assembler(mesh, NeoHookean(), 3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def acceptance_report():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
