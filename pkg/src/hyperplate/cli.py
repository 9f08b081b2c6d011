"""Command-line entry point: ``hyperplate {reconstruct,simulate,verify,scenario}``."""
import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__, kernels
from .config import PHYSICAL_LABELS, build_setup, content_hash, resolve
from .errors import HyperplateError
from .forward import forward
from .inversion import add_noise, landweber_full, landweber_sensor
from .io import write_field_csv, write_json, write_matrix_csv, write_pgm
from .observation import write_sensor_csv
from .scenarios import build_excitation, build_scenario, damaged_knots, true_coefficients
from .material import SplineGrid
from .verify import run_suite

log = logging.getLogger("hyperplate")


def _load_config(path):
    with open(path) as fh:
        return json.load(fh)


def _meta(setup, raw, extra):
    mesh = setup.problem.mesh
    meta = {
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "config": setup.config,
        "config_hash": content_hash(setup.config),
        "input_hash": content_hash(raw),
        "physical_labels": PHYSICAL_LABELS,
        "mesh": {"nodes": mesh.n_nodes, "elements": mesh.n_elements, "dofs": mesh.n_dofs},
    }
    if setup.sensors is not None:
        meta["sensors"] = {
            "count": setup.sensors.count,
            "node_ids": setup.sensors.node_ids.tolist(),
            "components": setup.sensors.components.tolist(),
            "coords": setup.sensors.coords.tolist(),
        }
    meta.update(extra)
    return meta


def _true_alpha(setup):
    asm = setup.problem.assembler
    if setup.scenario is None:
        return np.ones((asm.n_knots + 1, asm.n_knots + 1))
    return true_coefficients(setup.scenario, asm.grid2, asm.grid3)


def run_reconstruct(config_path):
    """Synthetic data from the true coefficients, then a Landweber reconstruction."""
    raw = _load_config(config_path)
    setup = build_setup(raw)
    problem = setup.problem
    loads = build_excitation(problem.mesh, problem.tg, setup.excitation)
    alpha_true = _true_alpha(setup)
    t0 = time.perf_counter()
    u_true = forward(problem, alpha_true, loads).U
    if setup.sensors is not None:
        y = setup.sensors.observe_history(u_true)
        alpha, rec = landweber_sensor(problem, loads, setup.sensors, y, setup.landweber)
    else:
        y = None
        alpha, rec = landweber_full(problem, loads, u_true, setup.landweber)
    elapsed = time.perf_counter() - t0

    out = setup.config["output"]["dir"]
    os.makedirs(out, exist_ok=True)
    write_matrix_csv(os.path.join(out, "alpha.csv"), alpha)
    write_pgm(os.path.join(out, "alpha.pgm"), alpha)
    write_json(os.path.join(out, "residuals.json"), rec.to_json())
    if y is not None:
        # the series the inversion saw: same seeded noise as inside landweber_sensor
        lw = setup.landweber
        write_sensor_csv(os.path.join(out, "sensors.csv"), add_noise(y, lw.noise_delta, lw.seed))
    write_json(os.path.join(out, "meta.json"), _meta(setup, raw, {
        "command": "reconstruct",
        "alpha_true": alpha_true.tolist(),
        "elapsed_seconds": elapsed,
        "iteration_seconds": rec.timings,
    }))
    log.info("%d iterations, stop reason %s, final residual %.3e",
             rec.iterations, rec.stop_reason, rec.residuals[-1] if rec.residuals else float("nan"))
    return 0


def run_simulate(config_path):
    """Forward solve only; writes sensor series and per-level field dumps."""
    raw = _load_config(config_path)
    setup = build_setup(raw)
    problem = setup.problem
    loads = build_excitation(problem.mesh, problem.tg, setup.excitation)
    alpha_true = _true_alpha(setup)
    res = forward(problem, alpha_true, loads)
    out = setup.config["output"]["dir"]
    fields = os.path.join(out, "fields")
    os.makedirs(fields, exist_ok=True)
    for j, U in enumerate(res.U):
        write_field_csv(os.path.join(fields, f"u_{j:04d}.csv"), problem.mesh, U)
    if setup.sensors is not None:
        write_sensor_csv(os.path.join(out, "sensors.csv"), setup.sensors.observe_history(res.U))
    write_json(os.path.join(out, "meta.json"), _meta(setup, raw, {
        "command": "simulate",
        "alpha_true": alpha_true.tolist(),
        "newton_iterations": [len(r) - 1 for r in res.newton_residuals],
    }))
    return 0


def run_verify(suite):
    checks = run_suite(suite)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


def run_scenario(name, out, knots=8, damaged_value=0.5):
    sc = build_scenario(name, damaged_value)
    (_, _), (a2, b2), (a3, b3) = resolve({})["mesh"]["extents"]
    g2, g3 = SplineGrid(a2, b2, knots), SplineGrid(a3, b3, knots)
    payload = {
        "name": sc.name,
        "damages": [{"center": list(d.center), "side": d.side, "value": d.value} for d in sc.damages],
        "knots_per_axis": knots,
        "damaged_knots": damaged_knots(sc, g2, g3),
        "alpha_true": true_coefficients(sc, g2, g3).tolist(),
    }
    parent = os.path.dirname(out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    write_json(out, payload)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="hyperplate", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("reconstruct", help="generate synthetic data and run Landweber")
    p.add_argument("config")
    p = sub.add_parser("simulate", help="forward solve only")
    p.add_argument("config")
    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("suite", choices=["material", "adjoint", "taylor", "cone", "all"])
    p = sub.add_parser("scenario", help="write a damage scenario and its true coefficients")
    p.add_argument("name", choices=["A", "B", "C"])
    p.add_argument("--out", required=True)
    p.add_argument("--knots", type=int, default=8)
    p.add_argument("--damaged-value", type=float, default=0.5)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "reconstruct":
            return run_reconstruct(args.config)
        if args.command == "simulate":
            return run_simulate(args.config)
        if args.command == "verify":
            return run_verify(args.suite)
        return run_scenario(args.name, args.out, args.knots, args.damaged_value)
    except (OSError, ValueError, KeyError, TypeError, HyperplateError) as exc:
        print(f"hyperplate: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
