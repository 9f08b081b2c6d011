import os
import subprocess
import sys

import numpy as np
import pytest

from hyperplate import _kernels_py, kernels
from hyperplate.errors import NonPositiveJacobian
from hyperplate.forward import forward
from hyperplate.sensitivity import adjoint_full, gradient_history, trapezoid
from hyperplate.verify import desk_problem

BACKENDS = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])


def _impl(name):
    if name == "python":
        return _kernels_py
    from hyperplate import _kernels
    return _kernels


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    impl = _impl(request.param)
    monkeypatch.setattr(kernels, "element_system", impl.element_system)
    monkeypatch.setattr(kernels, "stress_contraction", impl.stress_contraction)
    return request.param


def test_env_var_forces_python_backend():
    env = dict(os.environ, HYPERPLATE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from hyperplate import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_backend_reports_element(backend):
    Y = np.zeros((3, 8, 3, 3))
    Y[1, 5] = -np.eye(3)
    dN = np.zeros((8, 8, 3))
    with pytest.raises(NonPositiveJacobian) as err:
        _impl(backend).element_system(Y, np.ones((3, 8)), dN, 1.0, 1.0, False)
    assert (err.value.element, err.value.qp) == (1, 5)


@pytest.fixture(scope="module")
def reference():
    problem, loads = desk_problem(steps=6, cells=(2, 4, 4), knots=4)
    alpha = np.full((5, 5), 1.0)
    alpha[2, 2] = 0.7
    return problem, loads, alpha


def _gradient(problem, loads, alpha):
    U = forward(problem, alpha, loads).U
    P = adjoint_full(problem, alpha, (problem.M @ U.T).T, U)
    return U, trapezoid(gradient_history(problem, U, P), problem.tg)


def test_end_to_end_backends_agree(reference, monkeypatch):
    problem, loads, alpha = reference
    results = {}
    for name in BACKENDS:
        impl = _impl(name)
        monkeypatch.setattr(kernels, "element_system", impl.element_system)
        monkeypatch.setattr(kernels, "stress_contraction", impl.stress_contraction)
        results[name] = _gradient(problem, loads, alpha)
    U0, g0 = results["python"]
    assert np.abs(g0).max() > 0
    for U, g in results.values():
        assert np.allclose(U, U0, rtol=1e-9, atol=1e-12 * np.abs(U0).max())
        assert np.allclose(g, g0, rtol=1e-8, atol=1e-10 * np.abs(g0).max())


def test_each_backend_deterministic(reference, backend):
    problem, loads, alpha = reference
    U1, g1 = _gradient(problem, loads, alpha)
    U2, g2 = _gradient(problem, loads, alpha)
    assert np.array_equal(U1, U2) and np.array_equal(g1, g2)
