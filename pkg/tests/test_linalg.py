import numpy as np
import pytest
import scipy.sparse as sp

from hyperplate.errors import IndefiniteMatrix, NotConverged
from hyperplate.linalg import BlockJacobi, cg_solve


def test_identity_one_iteration(rng):
    b = rng.standard_normal(7)
    res = cg_solve(sp.identity(7, format="csr"), b, full_output=True)
    assert np.allclose(res.x, b)
    assert res.iterations == 1


def test_diagonal():
    x = cg_solve(sp.diags([1.0, 2.0, 4.0]).tocsr(), np.array([1.0, 2.0, 4.0]))
    assert np.allclose(x, 1.0, rtol=1e-12)


def test_two_by_two():
    x = cg_solve(np.array([[4.0, 1.0], [1.0, 3.0]]), np.array([1.0, 2.0]))
    assert np.allclose(x, [1.0 / 11.0, 7.0 / 11.0], rtol=1e-12)


def test_zero_rhs():
    res = cg_solve(np.eye(3), np.zeros(3), full_output=True)
    assert res.iterations == 0 and np.all(res.x == 0.0)


@pytest.mark.parametrize("d", [5, 20, 50])
def test_random_spd(rng, d):
    Q = rng.standard_normal((d, d))
    A = Q @ Q.T + d * np.eye(d)
    b = rng.standard_normal(d)
    res = cg_solve(A, b, rel_tol=1e-12, max_iter=2 * d, full_output=True)
    assert res.iterations <= 2 * d
    assert np.linalg.norm(A @ res.x - b) <= 1e-12 * np.linalg.norm(b)
    recomputed = np.linalg.norm(A @ res.x - b)
    assert res.residual == pytest.approx(recomputed, rel=1e-14)


def test_indefinite():
    with pytest.raises(IndefiniteMatrix):
        cg_solve(np.diag([1.0, -1.0]), np.array([1.0, 1.0]))


def test_not_converged(rng):
    Q = rng.standard_normal((30, 30))
    A = Q @ Q.T + 0.01 * np.eye(30)
    with pytest.raises(NotConverged) as err:
        cg_solve(A, rng.standard_normal(30), max_iter=2)
    assert err.value.iterations == 2


def test_warm_start_with_exact_solution():
    A = np.array([[4.0, 1.0], [1.0, 3.0]])
    x = np.array([1.0 / 11.0, 7.0 / 11.0])
    res = cg_solve(A, np.array([1.0, 2.0]), x0=x, rel_tol=1e-10, full_output=True)
    assert res.iterations == 0


def test_block_jacobi_preconditioner(rng):
    d, bs = 24, 6
    Q = rng.standard_normal((d, d))
    A = sp.csr_matrix(Q @ Q.T + d * np.eye(d))
    pre = BlockJacobi(A, bs)
    blk = A.toarray()[:bs, :bs]
    r = rng.standard_normal(d)
    assert np.allclose((pre @ r)[:bs], np.linalg.solve(blk, r[:bs]))
    b = rng.standard_normal(d)
    x = cg_solve(A, b, precond=pre)
    assert np.linalg.norm(A @ x - b) <= 1e-12 * np.linalg.norm(b)
    with pytest.raises(ValueError):
        BlockJacobi(A, 5)
