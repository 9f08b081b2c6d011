"""Damage identification in thin hyperelastic plates from transient wave data."""
from . import kernels
from .assembly import Assembler
from .errors import HyperplateError
from .forward import ForwardResult, Problem, SolverConfig, TimeGrid, forward
from .inversion import LandweberConfig, RunRecord, add_noise, cone_ratio, landweber_full, landweber_sensor
from .material import NeoHookean, SplineGrid
from .mesh import PlateMesh, assemble_boundary_mass, assemble_mass, build_plate
from .observation import SensorArray, layout_nodes, make_sensor_array
from .scenarios import SCENARIOS, DamageSquare, Excitation, Scenario, build_excitation, build_scenario
from .sensitivity import adjoint_full, adjoint_sensor, derivative_apply, gradient_history

__version__ = "0.1.0"
