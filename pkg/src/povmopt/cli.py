"""Command line entry point.

Subcommands: optimize, sweep, bounds, analytic, verify.  All numeric fields
are formatted at 9 significant digits so re-runs with the same seeds are
byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .analytic import (
    classify_povm,
    feasible_q1_interval,
    randomized_pvm_povm,
    tetrahedron_povm,
    three_outcome_povm,
    trine_povm,
    two_copy_povm,
)
from .bounds import bound_report, check_optimality, nh_bound, sld_bound, holevo_dinv
from .errors import InfeasibleFreeParameterError, PovmOptError
from .fisher import objective
from .measurement import povm_to_json
from .model import dephasing_model, model_from_json, qubit_bloch_model, tensor_power
from .optimizer import OptConfig, find_min_outcomes, multi_restart
from .verify import run_all

CSV_COLUMNS = ["theta", "epsilon", "M", "K", "K_star", "objective", "sld", "holevo", "nh", "iterations", "seed"]


def _g(x) -> str:
    return "" if x is None else "%.9g" % x


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _write_out(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_optimize(args) -> int:
    model = model_from_json(_load_json(args.model))
    if args.opt:
        config = OptConfig.from_json(json.dumps(_load_json(args.opt)))
    else:
        config = OptConfig(K=args.K)
    if args.restarts is not None:
        config = OptConfig(**{**config.__dict__, "restarts": args.restarts})
    if args.seed is not None:
        config = OptConfig(**{**config.__dict__, "seed": args.seed})
    result = multi_restart(model, config)
    payload = {
        "run": json.loads(result.to_json()),
        "povm": json.loads(povm_to_json(result.final_povm)),
    }
    _write_out(json.dumps(payload, indent=1), args.out)
    return 0 if result.stop_reason == "converged" else 2


def cmd_bounds(args) -> int:
    model = model_from_json(_load_json(args.model))
    which = tuple(args.bounds.split(",")) if args.bounds else ("sld", "holevo", "nh")
    report = bound_report(model, which=which)
    _write_out(report.to_json(), args.out)
    return 0


def _parse_grid(spec: str):
    if ":" in spec:
        start, stop, steps = spec.split(":")
        return [float(x) for x in np.linspace(float(start), float(stop), int(steps))]
    return [float(x) for x in spec.split(",")]


def _sweep_model(template: dict, family: str, value: float, copies: int):
    spec = dict(template)
    if family == "dephasing":
        spec["theta"] = [value]
    else:
        theta = list(spec.get("theta", [0.0, 0.0, 0.0]))
        theta[0] = value
        spec["theta"] = theta
    spec["copies"] = copies
    return model_from_json(spec)


def cmd_sweep(args) -> int:
    template = _load_json(args.model)
    family = template.get("family", "bloch")
    grid = _parse_grid(args.grid)
    copies = [int(m) for m in args.copies.split(",")] if args.copies else [1, 2, 3]
    which = set(args.bounds.split(",")) if args.bounds else {"sld", "holevo", "nh"}
    if args.opt:
        config = OptConfig.from_json(json.dumps(_load_json(args.opt)))
    else:
        config = OptConfig(K=args.K, restarts=args.restarts or 10, seed=args.seed or 0)
    out_fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(out_fh)
    writer.writerow(CSV_COLUMNS)
    status = 0
    try:
        for value in grid:
            for m in copies:
                row = {c: None for c in CSV_COLUMNS}
                row["epsilon" if family == "dephasing" else "theta"] = value
                row["M"] = m
                try:
                    model = _sweep_model(template, family, value, m)
                    kcfg = OptConfig(**{**config.__dict__, "K": min(config.K * m, 64)})
                    if args.kstar:
                        k_star, result = find_min_outcomes(model, kcfg)
                        row["K_star"] = k_star
                    else:
                        result = multi_restart(model, kcfg)
                    row["K"] = result.final_povm.n_outcomes
                    row["objective"] = result.final_objective
                    row["iterations"] = result.iterations_used
                    row["seed"] = result.seed
                    if "sld" in which:
                        row["sld"] = sld_bound(model)
                    if "holevo" in which:
                        row["holevo"] = holevo_dinv(model)
                    if "nh" in which:
                        row["nh"] = nh_bound(model)[0]
                except PovmOptError as exc:
                    print(f"# point {value}, M={m} failed: {exc}", file=sys.stderr)
                    status = 2
                writer.writerow(
                    [
                        _g(row["theta"]),
                        _g(row["epsilon"]),
                        "" if row["M"] is None else str(row["M"]),
                        "" if row["K"] is None else str(row["K"]),
                        "" if row["K_star"] is None else str(row["K_star"]),
                        _g(row["objective"]),
                        _g(row["sld"]),
                        _g(row["holevo"]),
                        _g(row["nh"]),
                        "" if row["iterations"] is None else str(row["iterations"]),
                        "" if row["seed"] is None else str(row["seed"]),
                    ]
                )
                out_fh.flush()
    finally:
        if args.out:
            out_fh.close()
    return status


def cmd_analytic(args) -> int:
    params = [float(x) for x in args.params]
    if args.family == "trine":
        povm = trine_povm(*params)
        model = qubit_bloch_model((0.0, 0.0, 0.0), active=(1, 2))
    elif args.family == "tetra":
        povm = tetrahedron_povm(*params)
        model = qubit_bloch_model((0.0, 0.0, 0.0), active=(1, 2, 3))
    elif args.family == "two_copy":
        povm = two_copy_povm(*params)
        model = tensor_power(qubit_bloch_model((0.0, 0.0, 0.0), active=(1, 2)), 2)
    elif args.family == "randomized_pvm":
        model = qubit_bloch_model((args.r, 0.0, 0.0), active=(1, 2))
        povm = randomized_pvm_povm(model)
    elif args.family == "three_outcome":
        model = qubit_bloch_model((args.r, 0.0, 0.0), active=(1, 2))
        try:
            _, povm = three_outcome_povm(args.r, params[0] if params else 0.0, args.q1)
        except InfeasibleFreeParameterError as exc:
            print(f"error: {exc} (feasible interval: {exc.interval})", file=sys.stderr)
            return 1
    else:  # argparse choices make this unreachable
        return 1
    payload = {
        "povm": json.loads(povm_to_json(povm)),
        "objective": float("%.9g" % objective(model, povm)),
    }
    if model.dim == 2:
        payload["optimality_residual"] = float("%.9g" % check_optimality(model, povm))
    _write_out(json.dumps(payload, indent=1), args.out)
    return 0


def cmd_verify(args) -> int:
    results = run_all(full=args.full)
    lines = [r.line() for r in results]
    _write_out("\n".join(lines), args.out)
    if args.json:
        report = [{"name": r.name, "passed": r.passed, "details": r.details} for r in results]
        print(json.dumps(report, indent=1))
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="povmopt", description="POVM optimization and estimation bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run the steepest-descent POVM optimizer")
    p.add_argument("--model", required=True, help="model spec JSON file")
    p.add_argument("--opt", help="optimizer config JSON file")
    p.add_argument("-K", type=int, default=4, help="number of outcomes when --opt absent")
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("bounds", help="compute SLD / Holevo / NH lower bounds")
    p.add_argument("--model", required=True)
    p.add_argument("--bounds", help="comma list from {sld,holevo,nh}")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="parameter sweep emitting CSV rows")
    p.add_argument("--model", required=True, help="model template JSON (first theta coordinate is swept)")
    p.add_argument("--grid", required=True, help="'start:stop:steps' or comma-separated values")
    p.add_argument("--copies", help="comma list of M values (default 1,2,3)")
    p.add_argument("--opt")
    p.add_argument("-K", type=int, default=4)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--bounds", help="comma list from {sld,holevo,nh}")
    p.add_argument("--kstar", action="store_true", help="also search the minimal outcome count per point")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analytic", help="emit a closed-form optimal POVM")
    p.add_argument("family", choices=["trine", "tetra", "two_copy", "randomized_pvm", "three_outcome"])
    p.add_argument("params", nargs="*", help="family angles (trine: phi1; tetra: alpha beta gamma; ...)")
    p.add_argument("--r", type=float, default=0.0, help="Bloch radius for r-dependent families")
    p.add_argument("--q1", type=float, help="free probability parameter (three_outcome)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--full", action="store_true", help="include the slow M=3 minimal-outcome search")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PovmOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
