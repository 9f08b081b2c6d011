"""Attenuated Landweber reconstruction of the dictionary coefficients."""
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import DegenerateDenominator, HyperplateError, InvalidTau, InversionError, ZeroSignal
from .forward import forward
from .sensitivity import adjoint_full, derivative_apply, gradient_history, state_norm, trapezoid

__all__ = [
    "LandweberConfig",
    "RunRecord",
    "trapezoid_time_integral",
    "add_noise",
    "discrepancy_stop",
    "landweber_full",
    "landweber_sensor",
    "cone_ratio",
    "halving_omega",
]


@dataclass(frozen=True)
class LandweberConfig:
    """Settings of one Landweber run.

    ``tau`` enables discrepancy stopping when not None. ``noise_delta`` is
    the relative noise level injected into the data with generator ``seed``.
    """

    omega: float = 10.0
    max_iter: int = 50
    tol: float = 1e-12
    tau: float | None = None
    noise_delta: float = 0.0
    seed: int = 0
    project_nonneg: bool = True

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")
        if self.noise_delta < 0:
            raise ValueError("noise level must be nonnegative")
        if self.tau is not None and not self.tau > 2:
            raise InvalidTau(f"tau must exceed 2, got {self.tau}")


@dataclass
class RunRecord:
    """Trace of a Landweber run.

    ``residuals`` holds the squared data misfit of every iterate (the time
    trapezoid of the squared residual norms), ``residual_norms`` its square
    root. ``alpha`` is the returned iterate.
    """

    residuals: list = field(default_factory=list)
    residual_norms: list = field(default_factory=list)
    alpha: np.ndarray | None = None
    iterations: int = 0
    stop_reason: str = "maxiter"
    noise_level: float = 0.0
    config: dict = field(default_factory=dict)
    timings: list = field(default_factory=list)

    def to_json(self, include_timings=False):
        out = {
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
            "residuals": [float(r) for r in self.residuals],
            "residual_norms": [float(r) for r in self.residual_norms],
            "noise_level": float(self.noise_level),
            "alpha": np.asarray(self.alpha).tolist(),
            "config": self.config,
        }
        if include_timings:
            out["timings"] = [float(t) for t in self.timings]
        return out


def trapezoid_time_integral(values, tg):
    """``(T/m)(v0/2 + v1 + ... + v_{m-1} + v_m/2)``."""
    return float(trapezoid(np.asarray(values, dtype=float), tg))


def _l2_time(data):
    # discrete L2(0,T) norm up to the constant factor T/m, which cancels in ratios
    data = np.asarray(data, dtype=float)
    sq = np.sum(data.reshape(len(data), -1) ** 2, axis=1)
    w = np.ones(len(data))
    w[0] = w[-1] = 0.5
    return np.sqrt(np.dot(w, sq))


def add_noise(data, delta, seed=0):
    """Add Gaussian noise scaled to relative discrete ``L2(0,T)`` level ``delta``."""
    data = np.asarray(data, dtype=float)
    if delta < 0:
        raise ValueError("noise level must be nonnegative")
    if delta == 0:
        return data.copy()
    norm = _l2_time(data)
    if norm == 0:
        raise ZeroSignal("cannot scale noise relative to an all-zero signal")
    noise = np.random.default_rng(seed).standard_normal(data.shape)
    noise *= delta * norm / _l2_time(noise)
    return data + noise


def discrepancy_stop(residual_norm, delta, tau):
    """Whether ``residual_norm <= tau * delta``."""
    if not tau > 2:
        raise InvalidTau(f"tau must exceed 2, got {tau}")
    if delta < 0:
        raise ValueError("noise level must be nonnegative")
    return bool(residual_norm <= tau * delta)


def _landweber(problem, loads, cfg, alpha0, misfit, adjoint_source, noise_level):
    """Shared loop: ``misfit(U) -> (w, sq_norms)``, ``adjoint_source(w) -> W``."""
    tg = problem.tg
    n = problem.assembler.n_knots
    alpha = np.ones((n + 1, n + 1)) if alpha0 is None else np.array(alpha0, dtype=float)
    rec = RunRecord(config=asdict(cfg), noise_level=noise_level)
    delta = np.inf
    i = 0
    while i < cfg.max_iter and delta > cfg.tol:
        i += 1
        t0 = time.perf_counter()
        try:
            U = forward(problem, alpha, loads).U
            w, sq = misfit(U)
            delta = trapezoid_time_integral(sq, tg)
            rec.residuals.append(delta)
            rec.residual_norms.append(float(np.sqrt(delta)))
            if cfg.tau is not None and discrepancy_stop(np.sqrt(delta), noise_level, cfg.tau):
                rec.stop_reason = "discrepancy"
                rec.timings.append(time.perf_counter() - t0)
                break
            P = adjoint_full(problem, alpha, adjoint_source(w), U)
            gamma = trapezoid(gradient_history(problem, U, P), tg)
        except HyperplateError as exc:
            raise InversionError(i, exc) from exc
        alpha = alpha + cfg.omega * gamma
        if cfg.project_nonneg:
            alpha = np.maximum(alpha, 0.0)
        rec.timings.append(time.perf_counter() - t0)
    else:
        rec.stop_reason = "tolerance" if delta <= cfg.tol else "maxiter"
    rec.iterations = i
    rec.alpha = alpha
    return alpha, rec


def _noise_history(clean, cfg):
    noisy = add_noise(clean, cfg.noise_delta, cfg.seed)
    return noisy, noisy - clean


def landweber_sensor(problem, loads, sensors, y, cfg=LandweberConfig(), alpha0=None):
    """Reconstruct ``alpha`` from sensor series ``y`` of shape (m + 1, l).

    Noise of relative level ``cfg.noise_delta`` is added to ``y`` first; the
    misfit is the time trapezoid of squared Euclidean sensor residuals.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (problem.tg.steps + 1, sensors.count):
        raise ValueError(f"sensor data must have shape {(problem.tg.steps + 1, sensors.count)}")
    ydelta, noise = _noise_history(y, cfg)
    noise_level = float(np.sqrt(trapezoid_time_integral(np.sum(noise ** 2, axis=1), problem.tg)))
    G = sensors.matrix

    def misfit(U):
        w = (G @ U.T).T - ydelta
        return w, np.sum(w ** 2, axis=1)

    return _landweber(problem, loads, cfg, alpha0, misfit, sensors.adjoint_history, noise_level)


def landweber_full(problem, loads, u_data, cfg=LandweberConfig(), alpha0=None):
    """Reconstruct ``alpha`` from a full displacement history ``u_data``.

    The misfit is measured in the discrete ``L2(0,T; L2)`` norm
    (mass-weighted); the adjoint is driven by ``W^j = M (U^j - U_data^j)``.
    """
    u_data = np.asarray(u_data, dtype=float)
    if u_data.shape != (problem.tg.steps + 1, problem.mesh.n_dofs):
        raise ValueError("field data must have one nodal vector per time level")
    M = problem.M
    udelta, noise = _noise_history(u_data, cfg)
    noise_level = float(np.sqrt(trapezoid_time_integral(np.einsum("ji,ji->j", noise, (M @ noise.T).T), problem.tg)))

    def misfit(U):
        w = U - udelta
        Mw = (M @ w.T).T
        return Mw, np.einsum("ji,ji->j", w, Mw)

    return _landweber(problem, loads, cfg, alpha0, misfit, lambda Mw: Mw, noise_level)


def cone_ratio(problem, loads, alpha, alpha_bar):
    """``||T(ab) - T(a) - T'(a)(ab - a)|| / ||T(ab) - T(a)||`` in the state norm."""
    alpha = np.asarray(alpha, dtype=float)
    alpha_bar = np.asarray(alpha_bar, dtype=float)
    U = forward(problem, alpha, loads).U
    Ub = forward(problem, alpha_bar, loads).U
    diff = Ub - U
    den = state_norm(problem, diff)
    if den < 1e-14:
        raise DegenerateDenominator(f"||T(alpha_bar) - T(alpha)|| = {den:.3e}")
    V = derivative_apply(problem, alpha, alpha_bar - alpha, U)
    return state_norm(problem, diff - V) / den


def halving_omega(run, cfg=LandweberConfig(), probe_iter=10, halvings=8):
    """First relaxation in ``omega, omega/2, ..., omega/2**halvings`` with a monotone residual.

    ``run(cfg) -> (alpha, RunRecord)`` is called with ``max_iter = probe_iter``
    and the candidate ``omega``. A probe whose iterates break the solver
    counts as rejected. Returns ``(omega, alpha, record)`` of the accepted
    probe, or the last candidate's if none is monotone.
    """
    omega = cfg.omega
    alpha = rec = None
    for _ in range(halvings + 1):
        probe = replace(cfg, omega=omega, max_iter=probe_iter, tau=None)
        try:
            alpha, rec = run(probe)
        except InversionError:
            omega *= 0.5
            continue
        r = np.asarray(rec.residuals)
        if np.all(np.isfinite(r)) and np.all(np.diff(r) <= 0.0):
            return omega, alpha, rec
        omega *= 0.5
    if rec is None:
        raise InversionError(probe_iter, "no relaxation candidate ran without solver failure")
    return omega * 2.0, alpha, rec
