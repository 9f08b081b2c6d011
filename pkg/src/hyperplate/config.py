"""JSON run configuration and the objects it resolves to."""
import hashlib
import json
from dataclasses import dataclass

from .assembly import Assembler
from .forward import Problem, SolverConfig, TimeGrid
from .inversion import LandweberConfig
from .material import NeoHookean
from .mesh import build_plate
from .observation import layout_nodes, make_sensor_array
from .scenarios import DamageSquare, Excitation, Scenario, build_scenario

__all__ = ["DEFAULTS", "resolve", "content_hash", "Setup", "build_setup"]

DEFAULTS = {
    "mesh": {"extents": [[-0.1, 0.1], [-15.0, 15.0], [-15.0, 15.0]], "cells": [2, 8, 8], "layers": "outer"},
    "time": {"horizon": 4.0, "steps": 16, "theta": 0.5},
    "material": {"bulk_modulus": 68.6, "shear_modulus": 26.32, "density": 1.0},
    "dictionary": {"knots_per_axis": 8},
    "scenario": {"name": "A", "damaged_value": 0.5, "side": 1.0},
    "sensors": None,
    "excitation": {"amplitude": 5.0, "pulse_width": 1.0, "spatial_halfwidth": 3.75},
    "landweber": {
        "omega": 10.0,
        "max_iter": 50,
        "tol": 1e-12,
        "tau": None,
        "noise_delta": 0.0,
        "seed": 0,
        "project_nonneg": True,
    },
    "solver": {"newton_tol": 1e-10, "newton_max_iter": 20, "cg_rel_tol": 1e-12, "preconditioner": "column"},
    "boundary": {"mode": "free"},
    "output": {"dir": "out"},
}

# recorded with every run; the computation itself is nondimensional
PHYSICAL_LABELS = {"plate": "6.7 mm x 1 m x 1 m", "time_window": "133 us"}


def _merge(base, override):
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(base.get(key), dict):
            out[key] = _merge(base[key], val)
        else:
            out[key] = val
    return out


def resolve(config):
    """Fill in defaults; unknown top-level sections are rejected."""
    unknown = set(config) - set(DEFAULTS)
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    return _merge(DEFAULTS, config)


def content_hash(obj):
    """SHA-256 of the canonical JSON encoding."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass
class Setup:
    config: dict
    problem: Problem
    excitation: Excitation
    scenario: Scenario | None
    sensors: object
    landweber: LandweberConfig


def _scenario(entry):
    if entry is None:
        return None
    if "damages" in entry:
        damages = tuple(
            DamageSquare(tuple(d["center"]), d.get("side", 1.0), d.get("value", entry.get("damaged_value", 0.5)))
            for d in entry["damages"]
        )
        return Scenario(entry.get("name", "custom"), damages)
    return build_scenario(entry["name"], entry.get("damaged_value", 0.5), entry.get("side", 1.0))


def build_setup(config):
    """Turn a resolved configuration into solver objects."""
    cfg = resolve(config)
    mesh = build_plate(cfg["mesh"]["extents"], cfg["mesh"]["cells"], cfg["mesh"].get("layers", "outer"))
    mat = cfg["material"]
    material = NeoHookean(mat["bulk_modulus"], mat["shear_modulus"])
    asm = Assembler(mesh, material, int(cfg["dictionary"]["knots_per_axis"]))
    t = cfg["time"]
    tg = TimeGrid(t["horizon"], int(t["steps"]), t["theta"])
    s = cfg["solver"]
    solver = SolverConfig(
        density=mat["density"],
        newton_tol=s["newton_tol"],
        newton_max_iter=int(s["newton_max_iter"]),
        cg_rel_tol=s["cg_rel_tol"],
        boundary=cfg["boundary"]["mode"],
        preconditioner=s["preconditioner"],
    )
    problem = Problem(asm, tg, solver)
    ex = cfg["excitation"]
    excitation = Excitation(ex["amplitude"], ex["pulse_width"], ex["spatial_halfwidth"])
    sensors = None
    sc = cfg["sensors"]
    if sc is not None:
        if sc.get("nodes") is not None:
            nodes = sc["nodes"]
        else:
            nodes = layout_nodes(mesh, sc["layout"])
        sensors = make_sensor_array(mesh, nodes, sc.get("component", "x3"))
    lw = cfg["landweber"]
    landweber = LandweberConfig(
        omega=lw["omega"],
        max_iter=int(lw["max_iter"]),
        tol=lw["tol"],
        tau=lw["tau"],
        noise_delta=lw["noise_delta"],
        seed=int(lw["seed"]),
        project_nonneg=bool(lw["project_nonneg"]),
    )
    return Setup(cfg, problem, excitation, _scenario(cfg["scenario"]), sensors, landweber)
