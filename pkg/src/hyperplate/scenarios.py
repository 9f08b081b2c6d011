"""Excitation signals and the damage scenarios of the plate experiments."""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidWidth, UnknownScenario

__all__ = [
    "Excitation",
    "DamageSquare",
    "Scenario",
    "SCENARIOS",
    "pulse",
    "build_excitation",
    "build_scenario",
    "true_coefficients",
]


@dataclass(frozen=True)
class Excitation:
    """Separable point-like load ``A f_t(t) f_2(x2) f_3(x3) e_3``.

    ``f_t`` is a raised-cosine pulse of duration ``pulse_width``; ``f_2`` and
    ``f_3`` are hat functions of half-width ``spatial_halfwidth`` centred at
    the plate centre.
    """

    amplitude: float = 1.0
    pulse_width: float = 1.0
    spatial_halfwidth: float = 3.75
    center: tuple = (0.0, 0.0)


def pulse(t, amplitude, width):
    """Raised cosine ``A (1 - cos(2 pi t / w)) / 2`` on ``[0, w]``, zero elsewhere."""
    t = np.asarray(t, dtype=float)
    val = amplitude * 0.5 * (1.0 - np.cos(2.0 * np.pi * t / width))
    return np.where((t >= 0) & (t <= width), val, 0.0)


def build_excitation(mesh, tg, params=Excitation()):
    """Load vectors ``MF^j`` for every time level, shape ``(m + 1, L)``."""
    if not params.spatial_halfwidth > 0:
        raise InvalidWidth("spatial half-width must be positive")
    if not 0 < params.pulse_width <= tg.horizon:
        raise InvalidWidth("pulse width must lie in (0, T]")
    x = mesh.qp_coords  # (ne, nq, 3)
    c2, c3 = params.center
    hw = params.spatial_halfwidth
    fx = np.clip(1 - np.abs(x[..., 1] - c2) / hw, 0, None) * np.clip(1 - np.abs(x[..., 2] - c3) / hw, 0, None)
    # spatial load on the x3 component: sum_q w f(x_q) N_a(x_q)
    fe = mesh.qp_weight * np.einsum("eq,qa->ea", fx, mesh.qp_shape)
    spatial = np.bincount(3 * mesh.elements.ravel() + 2, weights=fe.ravel(), minlength=mesh.n_dofs)
    ft = pulse(tg.times, params.amplitude, params.pulse_width)
    return ft[:, None] * spatial[None, :]


@dataclass(frozen=True)
class DamageSquare:
    center: tuple
    side: float = 1.0
    value: float = 0.5

    def __post_init__(self):
        if not self.side > 0:
            raise ValueError("damage side length must be positive")
        if any(abs(c) > 15.0 for c in self.center):
            raise ValueError("damage centre must lie inside [-15, 15]^2")
        if self.value < 0:
            raise ValueError("damaged coefficient must be nonnegative")


@dataclass(frozen=True)
class Scenario:
    name: str
    damages: tuple = field(default_factory=tuple)


SCENARIOS = {
    "A": ((-1.5, 1.5),),
    "B": ((5.5, 5.5), (-1.5, -10.5)),
    "C": ((-1.5, -4.5), (5.5, 5.5)),
}


def build_scenario(name, damaged_value=0.5, side=1.0):
    """One of the named damage scenarios A, B, C."""
    try:
        centers = SCENARIOS[str(name).upper()]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return Scenario(str(name).upper(), tuple(DamageSquare(c, side, damaged_value) for c in centers))


def damaged_knots(scenario, grid2, grid3):
    """Knot index pairs ``(i, j)`` marked damaged, one list per damage square.

    A knot is damaged when it lies inside the square. On grids too coarse
    for any knot to fall inside, the knot nearest to the centre is used.
    """
    k2, k3 = grid2.knots, grid3.knots
    out = []
    for d in scenario.damages:
        half = 0.5 * d.side
        in2 = np.flatnonzero(np.abs(k2 - d.center[0]) <= half)
        in3 = np.flatnonzero(np.abs(k3 - d.center[1]) <= half)
        if len(in2) == 0:
            in2 = [int(np.argmin(np.abs(k2 - d.center[0])))]
        if len(in3) == 0:
            in3 = [int(np.argmin(np.abs(k3 - d.center[1])))]
        out.append([(int(i), int(j)) for i in in2 for j in in3])
    return out


def true_coefficients(scenario, grid2, grid3):
    """Coefficient matrix of the damaged plate: 1 everywhere except damaged knots."""
    alpha = np.ones((grid2.n + 1, grid3.n + 1))
    for d, knots in zip(scenario.damages, damaged_knots(scenario, grid2, grid3)):
        for i, j in knots:
            alpha[i, j] = d.value
    return alpha
