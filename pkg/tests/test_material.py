import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from hyperplate.errors import NonPositiveJacobian
from hyperplate.material import (
    NeoHookean, SplineGrid, bspline_eval, bspline_matrix, check_coeffs, dict_gradient_weight,
    dict_weight, energy, stress, tangent_apply, tangent_tensor,
)
from hyperplate.verify import material_checks, random_admissible

# c1 = mu / 2 = 1 and beta = (3K - 2mu) / (6mu) = 1
UNIT = NeoHookean(bulk_modulus=16.0 / 3.0, shear_modulus=2.0)

small = arrays(np.float64, (3, 3), elements=st.floats(-0.2, 0.2))


def test_unit_parameters():
    assert UNIT.c1 == pytest.approx(1.0)
    assert UNIT.beta == pytest.approx(1.0)
    p = NeoHookean()
    assert p.c1 == pytest.approx(13.16)
    assert p.beta == pytest.approx((3 * 68.6 - 2 * 26.32) / (6 * 26.32))


@pytest.mark.parametrize("K, mu", [(1.0, 0.0), (1.0, -1.0), (1.0, 2.0)])
def test_invalid_parameters(K, mu):
    with pytest.raises(ValueError):
        NeoHookean(K, mu)


def test_reference_state_is_stress_free():
    Y = np.zeros((3, 3))
    assert energy(NeoHookean(), Y) == 0.0
    assert np.all(stress(NeoHookean(), Y) == 0.0)


def test_energy_value():
    # I1 = 3.63, D = 1.331: 0.63 + (1.331**-2 - 1)
    expected = 0.63 + (1.331 ** -2 - 1.0)
    assert energy(UNIT, 0.1 * np.eye(3)) == pytest.approx(expected, rel=1e-12)
    assert energy(UNIT, 0.1 * np.eye(3)) == pytest.approx(0.1944739, abs=1e-7)


def test_stress_value():
    expected = 2.2 - 2.0 * 1.331 ** -2 / 1.1
    assert np.allclose(stress(UNIT, 0.1 * np.eye(3)), expected * np.eye(3), rtol=1e-12)
    assert expected == pytest.approx(1.1736838, abs=1e-7)


def test_tangent_at_reference_on_identity():
    assert np.allclose(tangent_apply(UNIT, np.zeros((3, 3)), np.eye(3)), 16.0 * np.eye(3), rtol=1e-14)


def test_tangent_zero_direction():
    Y = random_admissible(np.random.default_rng(0))
    assert np.all(tangent_apply(NeoHookean(), Y, np.zeros((3, 3))) == 0.0)


@pytest.mark.parametrize("fn", [energy, stress])
def test_collapsed_state_rejected(fn):
    with pytest.raises(NonPositiveJacobian):
        fn(NeoHookean(), -np.eye(3))


def test_inverted_state_rejected():
    Y = np.diag([-2.0, 0.0, 0.0])
    with pytest.raises(NonPositiveJacobian):
        tangent_apply(NeoHookean(), Y, np.eye(3))


def test_tangent_tensor_matches_apply(rng):
    p = NeoHookean()
    Y = random_admissible(rng)
    H = rng.standard_normal((3, 3))
    C = tangent_tensor(p, Y)
    assert np.allclose(np.einsum("ijkl,kl->ij", C, H), tangent_apply(p, Y, H), rtol=1e-13, atol=1e-12)
    # major symmetry of the Hessian
    assert np.allclose(C, C.transpose(2, 3, 0, 1), atol=1e-12)


def test_vectorised_evaluation(rng):
    p = NeoHookean()
    Ys = np.array([random_admissible(rng) for _ in range(5)])
    assert np.allclose(stress(p, Ys), np.array([stress(p, Y) for Y in Ys]))
    assert energy(p, Ys).shape == (5,)


@settings(max_examples=40, deadline=None)
@given(Y=small, H=arrays(np.float64, (3, 3), elements=st.floats(-1, 1)))
def test_stress_is_energy_gradient(Y, H):
    p = NeoHookean()
    e = 1e-5
    fd = (energy(p, Y + e * H) - energy(p, Y - e * H)) / (2 * e)
    an = np.sum(stress(p, Y) * H)
    assert abs(an - fd) <= 1e-6 * max(1.0, abs(an))


@settings(max_examples=40, deadline=None)
@given(Y=small, H1=arrays(np.float64, (3, 3), elements=st.floats(-1, 1)),
       H2=arrays(np.float64, (3, 3), elements=st.floats(-1, 1)))
def test_tangent_symmetry(Y, H1, H2):
    p = NeoHookean()
    lhs = np.sum(H1 * tangent_apply(p, Y, H2))
    rhs = np.sum(H2 * tangent_apply(p, Y, H1))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_material_suite_passes():
    for check in material_checks():
        assert check.passed, check.line()


# -- splines and dictionary weights -----------------------------------------

GRID = SplineGrid(-15.0, 15.0, 8)


@pytest.mark.parametrize("i", range(9))
def test_bspline_delta_property(i):
    vals = [float(bspline_eval(GRID, i, x)) for x in GRID.knots]
    assert np.allclose(vals, np.eye(9)[i], atol=1e-12)


def test_bspline_midpoint():
    x = 0.5 * (GRID.knots[3] + GRID.knots[4])
    assert float(bspline_eval(GRID, 3, x)) == pytest.approx(0.5)
    assert float(bspline_eval(GRID, 4, x)) == pytest.approx(0.5)


@given(st.floats(-15.0, 15.0))
def test_bspline_partition_of_unity(x):
    assert bspline_matrix(GRID, x).sum() == pytest.approx(1.0, abs=1e-12)


def test_bspline_outside_support():
    assert bspline_matrix(GRID, [-16.0, 16.0]).sum() == 0.0


def test_dict_weight_examples(rng):
    alpha = rng.uniform(0.0, 2.0, (9, 9))
    x = np.array([0.0, 1.7, -4.2])
    assert dict_weight(GRID, GRID, np.ones((9, 9)), x, True) == pytest.approx(1.0)
    assert dict_weight(GRID, GRID, alpha, x, False) == 1.0
    for p, q in [(0, 0), (3, 5), (8, 2)]:
        at_knot = np.array([0.0, GRID.knots[p], GRID.knots[q]])
        assert dict_weight(GRID, GRID, alpha, at_knot, True) == pytest.approx(alpha[p, q], abs=1e-12)


def test_dict_gradient_weight_examples():
    x = np.array([0.0, GRID.knots[2], GRID.knots[6]])
    assert dict_gradient_weight(GRID, GRID, 2, 6, x, True) == pytest.approx(1.0)
    assert dict_gradient_weight(GRID, GRID, 2, 6, x, False) == 0.0
    y = np.array([0.0, 2.3, -7.1])
    total = sum(dict_gradient_weight(GRID, GRID, r, s, y, True) for r in range(9) for s in range(9))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_check_coeffs():
    assert check_coeffs(np.ones((3, 3)), 2).shape == (3, 3)
    with pytest.raises(ValueError):
        check_coeffs(np.ones((2, 2)), 2)
    with pytest.raises(ValueError):
        check_coeffs(-np.ones((3, 3)), 2)
