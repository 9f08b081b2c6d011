"""Compiled vs pure-Python element kernels.

Times the element force/tangent kernel, the dictionary gradient kernel and
one full forward solve on the desk plate with each backend.

    python3 benchmarks/bench_kernels.py [--repeat N] [--cells 2 8 8]
"""
import argparse
import timeit

import numpy as np

from hyperplate import _kernels_py, kernels
from hyperplate.forward import forward
from hyperplate.mesh import element_gradients
from hyperplate.verify import desk_problem

try:
    from hyperplate import _kernels as _compiled
except ImportError:
    _compiled = None


def _use(impl):
    kernels.element_system = impl.element_system
    kernels.stress_contraction = impl.stress_contraction


def bench(cells, repeat):
    problem, loads = desk_problem(cells=tuple(cells))
    asm, mesh = problem.assembler, problem.mesh
    rng = np.random.default_rng(0)
    U = 1e-3 * rng.standard_normal(mesh.n_dofs)
    P = rng.standard_normal(mesh.n_dofs)
    Y = np.ascontiguousarray(element_gradients(mesh, U))
    Z = np.ascontiguousarray(element_gradients(mesh, P))
    w = np.ascontiguousarray(asm.weights(np.ones((asm.n_knots + 1,) * 2)))
    c1, beta = asm.material.c1, asm.material.beta
    alpha = np.ones((asm.n_knots + 1,) * 2)

    backends = [("python", _kernels_py)] + ([("compiled", _compiled)] if _compiled else [])
    rows = []
    for name, impl in backends:
        _use(impl)
        t_sys = min(timeit.repeat(lambda: impl.element_system(Y, w, mesh.qp_grad, c1, beta, True),
                                  number=1, repeat=repeat))
        t_str = min(timeit.repeat(lambda: impl.stress_contraction(Y, Z, c1, beta), number=1, repeat=repeat))
        t_fwd = min(timeit.repeat(lambda: forward(problem, alpha, loads), number=1, repeat=max(1, repeat // 5)))
        rows.append((name, t_sys, t_str, t_fwd))
    _use(kernels._impl)

    print(f"mesh cells {tuple(cells)}: {mesh.n_elements} elements, {mesh.n_dofs} dofs")
    print(f"{'backend':<10} {'force+tangent':>14} {'grad kernel':>12} {'forward solve':>14}")
    for name, a, b, c in rows:
        print(f"{name:<10} {a * 1e3:11.2f} ms {b * 1e3:9.2f} ms {c:11.3f} s")
    if len(rows) == 2:
        (_, a0, b0, c0), (_, a1, b1, c1_) = rows
        print(f"{'speedup':<10} {a0 / a1:13.1f}x {b0 / b1:11.1f}x {c0 / c1_:13.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=10)
    parser.add_argument("--cells", type=int, nargs=3, default=[2, 8, 8])
    args = parser.parse_args()
    bench(args.cells, args.repeat)


if __name__ == "__main__":
    main()
