"""Command-line front end: certification, quantifiers, witnesses, LP checks,
steering transforms, and golden-table reproduction over JSON files."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import reproduce
from .config import RunConfig
from .conic import SolverFailure
from .identities import measurement_identity_space, preparation_identity_space
from .operators import (
    MultiMeasurement,
    MultiSource,
    StateSet,
    make_mub_multimeasurement,
    make_named_state_set,
    make_planar_measurement,
    make_planar_state_set,
    make_platonic_measurement,
    matrix_to_json,
    quantum_behavior,
    trivial_measurement,
)
from .polytope import (
    EnumerationCapExceeded,
    build_measurement_polytope,
    build_preparation_polytope,
    enumerate_vertices,
    measurement_vertices,
    preparation_vertices,
    simplex_product_vertices,
)
from .quantifiers import (
    analytic_upper_bound_measurement,
    analytic_upper_bound_states,
    certify_measurement,
    certify_states,
    noise_sweep,
    nonclassical_fraction_measurement,
    nonclassical_fraction_states,
    white_noise_robustness_measurement,
    white_noise_robustness_measurement_dual,
    white_noise_robustness_states,
    white_noise_robustness_states_dual,
)
from .scenarios import axis_multimeasurement, icosahedron_axes, isotropic_state, multisource_to_state_set, steer
from .witnesses import (
    evaluate_measurement_witness,
    evaluate_state_witness,
    nc_model_lp,
    witness_from_dual_measurement,
    witness_from_dual_states,
)

EXIT_CLASSICAL = 0
EXIT_INPUT_ERROR = 2
EXIT_SOLVER_FAILURE = 3
EXIT_ENUM_CAP = 4
EXIT_NONCLASSICAL = 10

PLATONIC = ("tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron")


def builtin_measurement(name: str) -> MultiMeasurement:
    if name.startswith("planar"):
        return make_planar_measurement(int(name[len("planar"):]))
    if name == "bb84":
        return make_planar_measurement(4)
    if name == "pentagon":
        return make_planar_measurement(5)
    if name == "trivial":
        return trivial_measurement(2)
    if name in PLATONIC:
        return make_platonic_measurement(name)
    if name.startswith("mub"):
        return make_mub_multimeasurement(int(name[len("mub"):]))
    raise ValueError(f"unknown built-in measurement {name!r}")


def builtin_states(name: str) -> StateSet:
    if name == "pentagon_states":
        return make_planar_state_set(5)
    if name == "pentagon_states_rotated":
        return make_planar_state_set(5, shift=np.pi / 5)
    return make_named_state_set(name)


def _load_target(args, config):
    if args.builtin:
        if args.kind == "measurement":
            return builtin_measurement(args.target)
        return builtin_states(args.target)
    with open(args.target) as fh:
        data = json.load(fh)
    if args.kind == "measurement":
        return MultiMeasurement.from_json_dict(data, config)
    return StateSet.from_json_dict(data, config)


def _config_from_args(args) -> RunConfig:
    overrides = {}
    for name in ("herm_tol", "psd_tol", "null_tol", "vert_tol", "verdict_tol", "solver_eps"):
        flag = getattr(args, name, None)
        if flag is not None:
            overrides[name] = flag
    for name in ("jobs", "enum_cap", "max_iters"):
        flag = getattr(args, name, None)
        if flag is not None:
            overrides[name] = flag
    return RunConfig.from_env(**overrides)


def _emit(report, fmt: str):
    if fmt == "json":
        print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
    else:
        print(f"target   : {report.target}")
        print(f"quantity : {report.quantity}")
        print(f"value    : {report.value:.10f}")
        print(f"verdict  : {report.verdict}")


def _verdict_exit(report) -> int:
    return EXIT_NONCLASSICAL if report.is_nonclassical else EXIT_CLASSICAL


def cmd_certify(args) -> int:
    config = _config_from_args(args)
    target = _load_target(args, config)
    report = certify_measurement(target, config=config) if args.kind == "measurement" else certify_states(target, config=config)
    _emit(report, args.format)
    return _verdict_exit(report)


def cmd_robustness(args) -> int:
    config = _config_from_args(args)
    target = _load_target(args, config)
    if args.sweep:
        start, stop, steps = args.sweep.split(":")
        etas = np.linspace(float(start), float(stop), int(steps))
        rows = noise_sweep(args.kind, target, etas, config)
        for eta, mu, verdict in rows:
            print(f"eta={eta:.6f} mu={mu:+.8f} {verdict}")
        return EXIT_CLASSICAL
    if args.kind == "measurement":
        fn = white_noise_robustness_measurement_dual if args.dual else white_noise_robustness_measurement
        report = fn(target, config=config)
        bound = analytic_upper_bound_measurement(target, config=config)
    else:
        fn = white_noise_robustness_states_dual if args.dual else white_noise_robustness_states
        report = fn(target, config=config)
        bound = analytic_upper_bound_states(target, config=config)
    report.diagnostics["analytic_upper_bound"] = bound
    _emit(report, args.format)
    if args.format == "text":
        print(f"bound    : {bound:.10f}")
    return _verdict_exit(report)


def cmd_fraction(args) -> int:
    config = _config_from_args(args)
    target = _load_target(args, config)
    fn = nonclassical_fraction_measurement if args.kind == "measurement" else nonclassical_fraction_states
    report = fn(target, config=config)
    _emit(report, args.format)
    return _verdict_exit(report)


def cmd_witness(args) -> int:
    config = _config_from_args(args)
    target = _load_target(args, config)
    if args.kind == "measurement":
        report = nonclassical_fraction_measurement(target, config=config)
        witness = witness_from_dual_measurement(report.dual_certificate, config)
        value, verdict = evaluate_measurement_witness(witness, target, config)
        payload = {
            "schema": 1,
            "kind": "measurement_witness",
            "weights": witness.weights.tolist(),
            "states": [matrix_to_json(s) for s in witness.states.states],
            "value": value,
            "threshold": witness.threshold,
            "verdict": verdict,
        }
    else:
        report = nonclassical_fraction_states(target, config=config)
        witness = witness_from_dual_states(report.dual_certificate, config)
        value, verdict = evaluate_state_witness(witness, target, config)
        payload = {
            "schema": 1,
            "kind": "state_witness",
            "weights": witness.weights.tolist(),
            "tests": [matrix_to_json(t) for t in witness.tests],
            "value": value,
            "threshold": witness.threshold,
            "verdict": verdict,
        }
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"witness value : {value:.10f}")
        print(f"threshold     : {witness.threshold}")
        print(f"verdict       : {verdict}")
    return EXIT_NONCLASSICAL if verdict == "nonclassical" else EXIT_CLASSICAL


def cmd_lp_model(args) -> int:
    config = _config_from_args(args)
    with open(args.scenario) as fh:
        data = json.load(fh)
    source = MultiSource.from_json_dict(data["source"], config)
    meas = MultiMeasurement.from_json_dict(data["measurement"], config)
    beh = quantum_behavior(source, meas)
    result = nc_model_lp(beh, preparation_vertices(source, config), measurement_vertices(meas, config), config)
    if result.feasible:
        out = {"schema": 1, "feasible": True, "weights": result.weights.tolist()}
        print(json.dumps(out, indent=2) if args.format == "json" else "feasible: noncontextual model found")
        return EXIT_CLASSICAL
    if args.format == "json":
        out = {
            "schema": 1,
            "feasible": False,
            "violation": result.violation,
            "inequality": result.inequality.to_json_dict(),
        }
        print(json.dumps(out, indent=2))
    else:
        print("infeasible: behavior admits no noncontextual model")
        print(result.inequality.pretty())
        print(f"violation margin: {result.violation:.8f}")
    return EXIT_NONCLASSICAL


def cmd_steer(args) -> int:
    config = _config_from_args(args)
    import os

    if args.state == "isotropic":
        rho = isotropic_state(args.eta)
    else:
        with open(args.state) as fh:
            data = json.load(fh)
        from .scenarios import BipartiteState

        da, db = int(data["dim_a"]), int(data["dim_b"])
        rho = BipartiteState(
            da, db,
            np.asarray([complex(re, im) for re, im in data["matrix"]]).reshape(da * db, da * db),
        )
    if args.measurement == "icosahedron_axes":
        meas = axis_multimeasurement(icosahedron_axes())
    elif os.path.exists(args.measurement):
        with open(args.measurement) as fh:
            meas = MultiMeasurement.from_json_dict(json.load(fh), config)
    else:
        meas = builtin_measurement(args.measurement)
    assemblage = steer(rho, meas)
    out = assemblage.to_json_dict()
    if args.reduce:
        out = multisource_to_state_set(assemblage).to_json_dict()
    print(json.dumps(out, indent=2 if args.format == "text" else None, sort_keys=True))
    return EXIT_CLASSICAL


def cmd_dump_polytope(args) -> int:
    config = _config_from_args(args)
    target = _load_target(args, config)
    if args.kind == "measurement":
        space = measurement_identity_space(target, config)
        poly = build_measurement_polytope(target, space)
    else:
        space = preparation_identity_space(target, config)
        poly = build_preparation_polytope(target, space)
    verts = simplex_product_vertices(poly) or enumerate_vertices(poly, config)
    out = {
        "schema": 1,
        "identity_space": space.to_json_dict(),
        "h_representation": poly.to_json_dict(),
        "v_representation": verts.to_json_dict(),
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_CLASSICAL


def cmd_reproduce(args) -> int:
    config = _config_from_args(args)
    rows = reproduce.run_table(args.table, include_slow=args.include_slow, config=config)
    worst = 0.0
    for row in rows:
        worst = max(worst, row.delta)
        print(f"{row.name:36s} computed={row.computed:.8f} published={row.published:.8f} |delta|={row.delta:.2e}")
    if worst > 1e-4:
        print(f"FAIL: worst deviation {worst:.3e} exceeds 1e-4")
        return 1
    print("OK")
    return EXIT_CLASSICAL


def _add_common(p: argparse.ArgumentParser, kinds=("measurement", "states")) -> None:
    p.add_argument("--kind", choices=kinds, required=True)
    p.add_argument("target", help="JSON file, or a built-in name with --builtin")
    p.add_argument("--builtin", action="store_true", help="interpret target as a built-in name")


def _add_tuning(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--tol-herm", dest="herm_tol", type=float)
    p.add_argument("--tol-psd", dest="psd_tol", type=float)
    p.add_argument("--tol-null", dest="null_tol", type=float)
    p.add_argument("--tol-vert", dest="vert_tol", type=float)
    p.add_argument("--tol-verdict", dest="verdict_tol", type=float)
    p.add_argument("--solver-eps", dest="solver_eps", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--enum-cap", dest="enum_cap", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncq", description="Nonclassicality certification and quantifiers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="classicality verdict via the decomposition program")
    _add_common(p)
    _add_tuning(p)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("robustness", help="white-noise robustness (primal, --dual, or --sweep)")
    _add_common(p)
    p.add_argument("--dual", action="store_true")
    p.add_argument("--sweep", metavar="START:STOP:STEPS")
    _add_tuning(p)
    p.set_defaults(fn=cmd_robustness)

    p = sub.add_parser("fraction", help="nonclassical fraction (primal + dual)")
    _add_common(p)
    _add_tuning(p)
    p.set_defaults(fn=cmd_fraction)

    p = sub.add_parser("witness", help="build the optimal witness and evaluate it")
    _add_common(p)
    _add_tuning(p)
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("lp-model", help="noncontextual-model LP on a scenario file")
    p.add_argument("scenario", help="JSON file with 'source' and 'measurement'")
    _add_tuning(p)
    p.set_defaults(fn=cmd_lp_model)

    p = sub.add_parser("steer", help="steer a bipartite state into an assemblage")
    p.add_argument("--state", default="isotropic", help="'isotropic' or a JSON file")
    p.add_argument("--eta", type=float, default=1.0, help="noise parameter for the isotropic state")
    p.add_argument("--measurement", default="icosahedron_axes", help="built-in name or a JSON file")
    p.add_argument("--reduce", action="store_true", help="emit the deduplicated state set instead")
    _add_tuning(p)
    p.set_defaults(fn=cmd_steer)

    p = sub.add_parser("dump-polytope", help="identity space + H/V polytope representations")
    _add_common(p)
    _add_tuning(p)
    p.set_defaults(fn=cmd_dump_polytope)

    p = sub.add_parser("reproduce", help="recompute a published table and compare")
    p.add_argument("table", choices=sorted(reproduce.TABLES))
    p.add_argument("--include-slow", action="store_true")
    _add_tuning(p)
    p.set_defaults(fn=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENUM_CAP
    except SolverFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
