"""Desk-scale property suites behind ``hyperplate verify``."""
from dataclasses import dataclass

import numpy as np

from .assembly import Assembler
from .forward import Problem, SolverConfig, TimeGrid, forward
from .inversion import cone_ratio
from .material import NeoHookean, energy, stress, tangent_apply
from .mesh import build_plate
from .scenarios import Excitation, build_excitation, build_scenario, true_coefficients
from .sensitivity import adjoint_full, derivative_apply, gradient_history, state_norm, trapezoid

__all__ = ["Check", "SUITES", "run_suite", "random_admissible", "pairing_error", "taylor_slope", "desk_problem"]


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<48s} {self.value:12.4e}  (limit {self.threshold:.1e})"


def random_admissible(rng, scale=0.2):
    """Random displacement gradient with det(I + Y) bounded away from 0."""
    while True:
        Y = rng.uniform(-scale, scale, (3, 3))
        if np.linalg.det(np.eye(3) + Y) > 0.2:
            return Y


def desk_problem(steps=16, cells=(2, 8, 8), knots=8, excitation=Excitation(amplitude=5.0), cfg=SolverConfig()):
    mesh = build_plate(cells=cells)
    asm = Assembler(mesh, NeoHookean(), knots)
    tg = TimeGrid(4.0, steps, 0.5)
    problem = Problem(asm, tg, cfg)
    return problem, build_excitation(mesh, tg, excitation)


def material_checks(n=100, seed=0, step=1e-5):
    params = NeoHookean()
    rng = np.random.default_rng(seed)
    e_stress = e_tan = e_sym = e_lin = 0.0
    for _ in range(n):
        Y = random_admissible(rng)
        H1, H2 = rng.standard_normal((2, 3, 3))
        P = stress(params, Y)
        fd = (energy(params, Y + step * H1) - energy(params, Y - step * H1)) / (2 * step)
        an = np.sum(P * H1)
        e_stress = max(e_stress, abs(an - fd) / max(1.0, abs(an)))
        T = tangent_apply(params, Y, H1)
        fdT = (stress(params, Y + step * H1) - stress(params, Y - step * H1)) / (2 * step)
        e_tan = max(e_tan, np.abs(T - fdT).max() / max(1.0, np.abs(T).max()))
        e_sym = max(e_sym, abs(np.sum(H2 * T) - np.sum(H1 * tangent_apply(params, Y, H2))))
        a, b = rng.standard_normal(2)
        lin = tangent_apply(params, Y, a * H1 + b * H2) - a * T - b * tangent_apply(params, Y, H2)
        e_lin = max(e_lin, np.abs(lin).max())
    return [
        Check("stress vs FD of energy (rel)", e_stress, 1e-6, e_stress <= 1e-6),
        Check("tangent vs FD of stress (rel)", e_tan, 1e-6, e_tan <= 1e-6),
        Check("tangent symmetry (abs)", e_sym, 1e-12, e_sym <= 1e-12),
        Check("tangent linearity (abs)", e_lin, 1e-12, e_lin <= 1e-12),
    ]


def pairing_error(problem, loads, alpha=None, W=None, U=None):
    """Relative error between the adjoint gradient and exact directional derivatives.

    For every unit coefficient direction ``e_rs`` the pairing
    ``trap <T'(alpha) e_rs, W>`` is computed with the linearised forward map;
    the adjoint side is ``-trap z_rs`` from the backward sweep. ``W``
    defaults to the mass-weighted residual against scenario-A data.
    """
    tg = problem.tg
    n = problem.assembler.n_knots
    alpha = np.ones((n + 1, n + 1)) if alpha is None else alpha
    if U is None:
        U = forward(problem, alpha, loads).U
    if W is None:
        asm = problem.assembler
        a_true = true_coefficients(build_scenario("A"), asm.grid2, asm.grid3)
        Ut = forward(problem, a_true, loads).U
        W = (problem.M @ (U - Ut).T).T
    P = adjoint_full(problem, alpha, W, U)
    adj = -trapezoid(gradient_history(problem, U, P), tg)
    exact = np.zeros_like(adj)
    for r in range(n + 1):
        for s in range(n + 1):
            h = np.zeros_like(adj)
            h[r, s] = 1.0
            V = derivative_apply(problem, alpha, h, U)
            exact[r, s] = trapezoid(np.einsum("ji,ji->j", V, W), tg)
    return float(np.linalg.norm(adj - exact) / np.linalg.norm(exact))


def taylor_slope(problem, loads, scales=(1e-1, 1e-2, 1e-3, 1e-4), seed=0):
    """Log-log slope of the linearisation remainder against the step size."""
    n = problem.assembler.n_knots
    alpha = np.ones((n + 1, n + 1))
    d = np.random.default_rng(seed).uniform(-1.0, 1.0, alpha.shape)
    d /= np.abs(d).max()
    U = forward(problem, alpha, loads).U
    V = derivative_apply(problem, alpha, d, U)
    rem = [state_norm(problem, forward(problem, alpha + e * d, loads).U - U - e * V) for e in scales]
    slope = np.polyfit(np.log(scales), np.log(rem), 1)[0]
    return float(slope), rem


def adjoint_checks():
    checks = []
    for steps, limit in ((16, 1e-2), (32, 5e-3)):
        problem, loads = desk_problem(steps)
        err = pairing_error(problem, loads)
        checks.append(Check(f"derivative/adjoint pairing, m={steps}", err, limit, err <= limit))
    return checks


def taylor_checks():
    problem, loads = desk_problem()
    slope, _ = taylor_slope(problem, loads)
    return [Check("Taylor remainder slope (>= 1.4, <= 2.1)", slope, 1.4, 1.4 <= slope <= 2.1)]


def cone_checks(count=10, radius=0.1, seed=0):
    problem, loads = desk_problem()
    n = problem.assembler.n_knots
    alpha = np.ones((n + 1, n + 1))
    rng = np.random.default_rng(seed)
    worst = max(cone_ratio(problem, loads, alpha, alpha + rng.uniform(-radius, radius, alpha.shape))
                for _ in range(count))
    return [Check(f"max tangential cone ratio over {count} draws", worst, 0.5, worst < 0.5)]


SUITES = {
    "material": material_checks,
    "adjoint": adjoint_checks,
    "taylor": taylor_checks,
    "cone": cone_checks,
}


def run_suite(name):
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    checks = []
    for n in names:
        checks.extend(SUITES[n]())
    return checks
