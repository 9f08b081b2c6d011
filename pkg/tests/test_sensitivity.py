import numpy as np
import pytest

from hyperplate.errors import LengthMismatch
from hyperplate.forward import TimeGrid, forward
from hyperplate.observation import layout_nodes, make_sensor_array
from hyperplate.sensitivity import (
    adjoint_full, adjoint_sensor, adjoint_systems, derivative_apply, gradient_history, state_norm, trapezoid,
)
from hyperplate.verify import desk_problem, pairing_error


@pytest.fixture(scope="module")
def small():
    problem, loads = desk_problem(steps=8, cells=(2, 4, 4), knots=4)
    alpha = np.ones((5, 5))
    U = forward(problem, alpha, loads).U
    return problem, loads, alpha, U


def test_trapezoid_examples():
    assert trapezoid(np.full(9, 3.0), TimeGrid(2.0, 8)) == pytest.approx(6.0)
    assert trapezoid(np.array([1.0, 5.0]), TimeGrid(2.0, 1)) == pytest.approx(6.0)
    assert trapezoid(np.arange(11) / 10.0, TimeGrid(1.0, 10)) == pytest.approx(0.5, abs=1e-15)
    stacked = np.ones((5, 2, 2))
    assert np.allclose(trapezoid(stacked, TimeGrid(4.0, 4)), 4.0)
    with pytest.raises(LengthMismatch):
        trapezoid(np.ones(3), TimeGrid(1.0, 4))


def test_zero_direction(small):
    problem, _, alpha, U = small
    assert np.all(derivative_apply(problem, alpha, np.zeros((5, 5)), U) == 0.0)


def test_derivative_linear(small, rng):
    problem, _, alpha, U = small
    h = rng.uniform(-1, 1, (5, 5))
    V1 = derivative_apply(problem, alpha, h, U)
    V3 = derivative_apply(problem, alpha, -3.0 * h, U)
    assert np.linalg.norm(V3 + 3.0 * V1) <= 1e-10 * np.linalg.norm(V3)
    assert np.linalg.norm(V1) > 0


def test_derivative_matches_difference_quotient(small, rng):
    problem, loads, alpha, U = small
    h = rng.uniform(-1, 1, (5, 5))
    V = derivative_apply(problem, alpha, h, U)
    e = 1e-4
    fd = (forward(problem, alpha + e * h, loads).U - forward(problem, alpha - e * h, loads).U) / (2 * e)
    assert np.linalg.norm(fd - V) <= 1e-6 * np.linalg.norm(V)


def test_adjoint_trivial(small, rng):
    problem, _, alpha, U = small
    assert np.all(adjoint_full(problem, alpha, np.zeros_like(U), U) == 0.0)
    P = adjoint_full(problem, alpha, rng.standard_normal(U.shape), U)
    assert np.all(P[-1] == 0.0)
    assert np.abs(P[0]).max() > 0
    with pytest.raises(LengthMismatch):
        adjoint_full(problem, alpha, np.zeros((3, U.shape[1])), U)


def test_adjoint_systems_symmetric(small):
    problem, _, alpha, U = small
    _, S0, S1 = adjoint_systems(problem, alpha, U, 3)
    for S in (S0, S1):
        assert abs(S - S.T).max() <= 1e-12 * abs(S).max()


def test_adjoint_sensor_equals_full(small, rng):
    problem, _, alpha, U = small
    sensors = make_sensor_array(problem.mesh, layout_nodes(problem.mesh, "R3d"))
    Ws = rng.standard_normal((len(U), sensors.count))
    P1 = adjoint_sensor(problem, alpha, Ws, U, sensors)
    P2 = adjoint_full(problem, alpha, (sensors.matrix.T @ Ws.T).T, U)
    assert np.array_equal(P1, P2)
    assert np.all(adjoint_sensor(problem, alpha, np.zeros_like(Ws), U, sensors) == 0.0)


def test_terminal_impulse_propagates_backwards(small):
    problem, _, alpha, U = small
    sensors = make_sensor_array(problem.mesh, layout_nodes(problem.mesh, "R3d")[:1])
    Ws = np.zeros((len(U), 1))
    Ws[-1, 0] = 1.0
    P = adjoint_sensor(problem, alpha, Ws, U, sensors)
    active = [np.abs(p).max() > 1e-12 for p in P]
    assert not active[-1]
    assert all(active[:-1])
    # support grows going backwards from the impulse
    support = [np.count_nonzero(np.abs(p) > 1e-12) for p in P[:-1]]
    assert support[-1] <= support[0]


def test_pairing_small(small):
    problem, loads, alpha, U = small
    assert pairing_error(problem, loads, alpha) < 5e-2


def test_gradient_history_shape(small, rng):
    problem, _, alpha, U = small
    P = rng.standard_normal(U.shape)
    z = gradient_history(problem, U, P)
    assert z.shape == (len(U), 5, 5)
    assert np.all(z[0] == 0.0)  # U^0 = 0


def test_state_norm(small):
    problem, _, _, U = small
    assert state_norm(problem, np.zeros_like(U)) == 0.0
    assert state_norm(problem, 2.0 * U) == pytest.approx(2.0 * state_norm(problem, U))
