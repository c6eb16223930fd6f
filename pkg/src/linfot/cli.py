"""Command-line front end.

Exit status: 0 on success, 1 when a validation report fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import jsonio
from .checks import run_suite
from .coupling import maximal_displacement_sets, monotone_coupling, winf_value
from .errors import DegenerateCritical, InputError, LinfotError
from .instances import BUILTIN
from .measures import BVPotential, DiscretePlan, measure_from_json
from .oracle import sample_quantile_grid, sorted_matching_bottleneck, threshold_matching_bottleneck
from .potentials import REPORT_TOL, RhoConfig, check_dual_feasibility, kantorovich_potentials
from .structure import (
    StructureDecomposition,
    assemble_plan,
    decompose,
    monotone_sub_plans,
    random_sub_plans,
    validate_plan,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def report_tol() -> float:
    raw = os.environ.get("WINF_TOL")
    if raw is None:
        return REPORT_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise InputError(f"WINF_TOL must be a number, got {raw!r}") from exc
    if not tol >= 0:
        raise InputError("WINF_TOL must be nonnegative")
    return tol


def _read_json(path):
    try:
        return jsonio.load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _measures(args):
    return measure_from_json(_read_json(args.mu)), measure_from_json(_read_json(args.nu))


def _emit(obj, out):
    text = jsonio.dumps(obj)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sets_json(mu, nu):
    plan = monotone_coupling(mu, nu)
    lam = winf_value(plan)
    try:
        sets = maximal_displacement_sets(plan, lam)
    except DegenerateCritical:
        return {"lambda_c": lam, "m_plus": [], "m_minus": []}
    return sets.to_json()


def cmd_winf(args) -> int:
    mu, nu = _measures(args)
    _emit(_sets_json(mu, nu), args.out)
    return EXIT_OK


def cmd_potentials(args) -> int:
    mu, nu = _measures(args)
    cfg = RhoConfig(args.endpoint_weight, args.interior_density, args.z_plus_weight, args.z_minus_weight)
    pp = kantorovich_potentials(mu, nu, cfg)
    rho = pp.rho
    obj = {
        "lambda_c": pp.lambda_c,
        "m_plus": pp.sets.m_plus.to_list() if pp.sets else [],
        "m_minus": pp.sets.m_minus.to_list() if pp.sets else [],
        "phi": pp.phi.to_json(),
        "psi": pp.psi.to_json(),
        "rho": {
            "atoms": [[p, w] for p, w in rho.atoms] if rho else [],
            "segments": [[lo, hi, d] for lo, hi, d in rho.segments] if rho else [],
        },
        "config": {
            "endpoint_weight": cfg.endpoint_weight,
            "interior_density": cfg.interior_density,
            "z_plus_weight": cfg.z_plus_weight,
            "z_minus_weight": cfg.z_minus_weight,
        },
    }
    _emit(obj, args.out)
    if args.csv:
        lo = min(mu.lo, nu.lo) - pp.lambda_c
        hi = max(mu.hi, nu.hi) + pp.lambda_c
        xs = np.unique(np.concatenate([np.linspace(lo, hi, args.csv_points), pp.phi.xs, pp.psi.xs]))
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "phi", "psi"])
            for x, f, g in zip(xs, pp.phi(xs), pp.psi(xs)):
                w.writerow([jsonio.fmt_float(float(x)), jsonio.fmt_float(float(f)), jsonio.fmt_float(float(g))])
    return EXIT_OK


def cmd_verify_dual(args) -> int:
    mu, nu = _measures(args)
    pot = _read_json(args.phi)
    try:
        phi = BVPotential.from_json(pot["phi"])
        psi = BVPotential.from_json(pot["psi"])
        lam = float(args.lam if args.lam is not None else pot["lambda_c"])
    except (KeyError, TypeError) as exc:
        raise InputError("potential file needs 'phi', 'psi' and a lambda") from exc
    if lam < 0:
        raise InputError("lambda must be nonnegative")
    rep = check_dual_feasibility(phi, psi, lam, mu, nu, grid_step=args.grid or None, tol=report_tol())
    _emit(rep.to_json(), args.out)
    return EXIT_OK if rep.feasible else EXIT_FAIL


def cmd_decompose(args) -> int:
    mu, nu = _measures(args)
    _emit(decompose(mu, nu).to_json(), args.out)
    return EXIT_OK


def cmd_sample_plan(args) -> int:
    dec = StructureDecomposition.from_json(_read_json(args.dec))
    if args.monotone:
        subs = monotone_sub_plans(dec, args.n)
    else:
        subs = random_sub_plans(dec, args.n, args.seed)
    plan = assemble_plan(dec, subs, args.n)
    obj = plan.to_json()
    obj["meta"] = {"n": args.n, "seed": None if args.monotone else args.seed}
    _emit(obj, args.out)
    return EXIT_OK


def cmd_validate_plan(args) -> int:
    raw = _read_json(args.plan)
    plan = DiscretePlan.from_json(raw)
    meta = raw.get("meta") or {}
    n = args.n if args.n is not None else meta.get("n")
    if n is not None:
        plan = DiscretePlan(plan.x, plan.y, plan.w, {"n": int(n)})
    dec = StructureDecomposition.from_json(_read_json(args.dec))
    rep = validate_plan(plan, dec, args.tol)
    _emit(rep, args.out)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_oracle(args) -> int:
    mu, nu = _measures(args)
    xs, ys = sample_quantile_grid(mu, args.n), sample_quantile_grid(nu, args.n)
    s = sorted_matching_bottleneck(xs, ys)
    t = threshold_matching_bottleneck(xs, ys, cap=args.cap)
    obj = {"bottleneck": s, "threshold": t, "method_agreement": s == t, "n": args.n}
    _emit(obj, args.out)
    return EXIT_OK if s == t else EXIT_FAIL


def cmd_selftest(args) -> int:
    names = args.instances or sorted(BUILTIN)
    try:
        instances = {name: BUILTIN[name.upper()]() for name in names}
    except KeyError as exc:
        raise InputError(f"unknown instance {exc.args[0]}; choose from {', '.join(sorted(BUILTIN))}") from exc
    res = run_suite(instances)
    passed = all(c["ok"] for inst in res.values() for c in inst.values())
    _emit({"passed": passed, "instances": res}, args.out)
    return EXIT_OK if passed else EXIT_FAIL


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linfot", description="One-dimensional L-infinity optimal transport.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_measures(sp):
        sp.add_argument("--mu", required=True, help="source measure JSON")
        sp.add_argument("--nu", required=True, help="target measure JSON")
        sp.add_argument("--out", help="output JSON (default: stdout)")
        return sp

    sp = with_measures(sub.add_parser("winf", help="critical distance and maximal displacement sets"))
    sp.set_defaults(func=cmd_winf)

    sp = with_measures(sub.add_parser("potentials", help="explicit Kantorovich potentials"))
    sp.add_argument("--csv", help="also write x,phi,psi samples for plotting")
    sp.add_argument("--csv-points", type=_positive_int, default=1001)
    defaults = RhoConfig()
    sp.add_argument("--endpoint-weight", type=float, default=defaults.endpoint_weight)
    sp.add_argument("--interior-density", type=float, default=defaults.interior_density)
    sp.add_argument("--z-plus-weight", type=float, default=defaults.z_plus_weight)
    sp.add_argument("--z-minus-weight", type=float, default=defaults.z_minus_weight)
    sp.set_defaults(func=cmd_potentials)

    sp = with_measures(sub.add_parser("verify-dual", help="feasibility and value of a potential pair"))
    sp.add_argument("--phi", required=True, help="potential JSON written by 'potentials'")
    sp.add_argument("--lambda", dest="lam", type=float, help="band half-width (default: file's lambda_c)")
    sp.add_argument("--grid", type=float, default=1e-3, help="extra uniform grid spacing, 0 to disable")
    sp.set_defaults(func=cmd_verify_dual)

    sp = with_measures(sub.add_parser("decompose", help="structure decomposition of optimal plans"))
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("sample-plan", help="assemble a seeded optimal plan from a decomposition")
    sp.add_argument("--dec", required=True)
    sp.add_argument("--seed", type=_nonneg_int, default=0)
    sp.add_argument("--n", type=_positive_int, default=500)
    sp.add_argument("--monotone", action="store_true", help="use monotone sub-plans instead of random ones")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sample_plan)

    sp = sub.add_parser("validate-plan", help="check a discrete plan against a decomposition")
    sp.add_argument("--plan", required=True)
    sp.add_argument("--dec", required=True)
    sp.add_argument("--n", type=_positive_int, help="resolution for the default tolerance")
    sp.add_argument("--tol", type=float, help="absolute tolerance (default 2*diameter/n)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_validate_plan)

    sp = with_measures(sub.add_parser("oracle", help="bottleneck matching of equi-quantile samples"))
    sp.add_argument("--n", type=_positive_int, default=1000)
    sp.add_argument("--cap", type=_positive_int, default=2000)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("selftest", help="invariant suite on the built-in instances")
    sp.add_argument("instances", nargs="*", help="subset of E1..E4")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"linfot: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LinfotError as exc:
        print(f"linfot: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
