"""``lpvdd`` command line.

Exit codes: 0 success (or rank test holds), 1 check failed, 2 usage error,
3 numerical failure. ``LPVDD_RANK_SAFETY`` overrides the rank safety factor.
"""
import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import datagen, experiments
from . import io as lio
from .ddrep import (build, embedded_pe_check, estimate_order, gpe_check, min_samples_report,
                    naive_input_pe_check)
from .exceptions import InfeasibleError, InconsistentWindowError, LpvddError
from .models import Complexity, example2_model, msd_model, nl_embedding_model

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

BUILTIN_MODELS = {"msd": msd_model, "example2": example2_model, "nl_example": nl_embedding_model}


class UsageError(Exception):
    pass


def positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {v}")
    return v


def _clean(obj):
    """JSON-safe copy: arrays to lists, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


# --- generate --------------------------------------------------------------

def cmd_generate(args):
    name = args.model
    if name == "example2" and args.input == "feedback":
        data = datagen.example2_dictionary(args.Nd, args.seed)
    elif args.input == "feedback":
        raise UsageError("feedback input is only defined for the example2 model")
    elif name == "nl_example":
        data = datagen.nl_dictionary(args.Nd, args.seed)
    elif name in BUILTIN_MODELS:
        data = datagen.model_dictionary(BUILTIN_MODELS[name](), args.Nd,
                                        datagen.make_rng(args.seed), f"{name} gaussian", args.seed)
    elif Path(name).suffix == ".json" and Path(name).exists():
        data = datagen.model_dictionary(lio.read_model(name), args.Nd, datagen.make_rng(args.seed),
                                        f"{Path(name).name} gaussian", args.seed)
    else:
        raise UsageError(f"unknown model {name!r}")
    out = Path(args.out or f"{Path(name).stem}_N{args.Nd}_s{args.seed}.csv")
    csv_path, meta_path = lio.write_dictionary(data, out)
    print(f"wrote {csv_path} and {meta_path}")
    return EXIT_OK


# --- check -----------------------------------------------------------------

def _complexity(args, data):
    given = [args.m, args.lag, args.order]
    if all(v is not None for v in given):
        return Complexity(args.m, args.lag, args.order)
    if any(v is not None for v in given):
        raise UsageError("--m, --lag and --order must be given together")
    if data.complexity is None:
        raise UsageError("dictionary has no complexity metadata; pass --m --lag --order")
    return data.complexity


def cmd_check(args):
    data = lio.read_dictionary(args.dictionary)
    c = _complexity(args, data)
    if args.L > data.N:
        raise UsageError(f"--L {args.L} exceeds the dictionary length {data.N}")
    rep = build(data, args.L)
    gpe = gpe_check(rep, c)
    report = {"L": args.L, "N": data.N, "complexity": c.as_dict(), "gpe": gpe.as_dict(),
              "estimated_order": estimate_order(rep, c.m),
              "min_samples": min_samples_report(c, data.n_p, data.n_w, args.L, data.N)}
    if args.L + c.order <= data.N:
        report["naive_input_pe"] = naive_input_pe_check(data, c, args.L).as_dict()
        report["embedded_pe"] = embedded_pe_check(data, c, args.L).as_dict()
    _emit(report, args.out)
    return EXIT_OK if gpe.holds else EXIT_FAILED


def _emit(obj, out):
    import json
    obj = _clean(obj)
    if out:
        lio.write_json(out, obj)
        print(f"wrote {out}")
    else:
        print(json.dumps(obj, indent=2, sort_keys=True))


# --- simulate / control ------------------------------------------------------

def cmd_simulate(args):
    from .simulate import dd_simulate

    prob = lio.read_sim_problem(args.problem)
    res = dd_simulate(prob, consistency_tol=args.tol if args.tol else 1e-6)
    out = Path(args.out or "simulate_out")
    header, rows = lio.trajectory_table(prob.T_i + 1, y=res.y_r)
    lio.write_table(out / "y_r.csv", header, rows)
    lio.write_json(out / "diagnostics.json", _clean(res.diagnostics()))
    print(f"wrote {out / 'y_r.csv'} ({res.uniqueness}, residual {res.residual:.3g})")
    return EXIT_OK


def cmd_control(args):
    from .control import iterate

    prob = lio.read_control_problem(args.problem)
    if args.tol:
        prob.tol = args.tol
    res = iterate(prob)
    out = Path(args.out or "control_out")
    lio.write_table(out / "iterations.csv", ["iteration", "objective", "dp"],
                    [[h["iteration"], h["objective"], h["dp"]] for h in res.history])
    rows = []
    for h in res.history:
        _, r = lio.trajectory_table(len(prob.w_ini) + 1, u=h["u"], y=h["y"], p=h["p"])
        rows += [[row[0], h["iteration"]] + row[1:] for row in r]
    header, _ = lio.trajectory_table(1, u=res.u_r, y=res.y_r, p=res.p_r)
    lio.write_table(out / "trajectories.csv", header[:1] + ["iteration"] + header[1:], rows)
    header, rows = lio.trajectory_table(len(prob.w_ini) + 1, u=res.u_r, y=res.y_r, p=res.p_r)
    lio.write_table(out / "final.csv", header, rows)
    lio.write_json(out / "result.json", _clean({"converged": res.converged,
                                                "iterations": res.iterations,
                                                "objective": res.objective,
                                                "final_dp": res.history[-1]["dp"]}))
    print(f"wrote {out} (converged={res.converged}, iterations={res.iterations})")
    return EXIT_OK if res.converged else EXIT_NUMERIC


# --- reproduce ---------------------------------------------------------------

REPRODUCERS = {"example2": ("example2", experiments.example2),
               "msd-cases": ("msd", experiments.msd_cases),
               "nonlinear": ("nonlinear", experiments.nonlinear)}


def cmd_reproduce(args):
    key, fn = REPRODUCERS[args.example]
    kw = {"seed": args.seed}
    if args.Nd is not None:
        kw["N"] = args.Nd
    if args.example == "nonlinear" and args.Ti is not None:
        kw["T_i"] = args.Ti
    if args.example == "nonlinear" and args.Tr is not None:
        kw["T_r"] = args.Tr
    if args.example == "nonlinear" and args.tol:
        kw["tol"] = args.tol
    if args.example != "nonlinear" and args.L is not None:
        kw["L"] = args.L
    result = fn(**kw)
    out = Path(args.out or f"reproduce_{key}")
    for name, table in result.pop("tables").items():
        table = np.atleast_2d(table)
        header = experiments.table_header(key, name, table.shape[1])
        header = header or ["c%d" % i for i in range(table.shape[1])]
        rows = [[int(r[0])] + list(r[1:]) for r in table]
        lio.write_table(out / f"{name}.csv", header, rows)
    lio.write_json(out / "summary.json", _clean(result))
    for name, ok in result["checks"].items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if result["passed"] else EXIT_FAILED


# --- entry point --------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="lpvdd", description="Data-driven LPV toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="record a seeded data dictionary")
    g.add_argument("--model", required=True, help="msd, example2, nl_example or a model JSON")
    g.add_argument("--Nd", type=positive_int, required=True)
    g.add_argument("--seed", type=nonneg_int, default=0)
    g.add_argument("--input", choices=["gaussian", "feedback"], default=None)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", help="rank tests on a dictionary")
    c.add_argument("dictionary")
    c.add_argument("--L", type=positive_int, required=True)
    c.add_argument("--m", type=nonneg_int)
    c.add_argument("--lag", type=positive_int)
    c.add_argument("--order", type=positive_int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("simulate", help="data-driven simulation from a problem JSON")
    s.add_argument("problem")
    s.add_argument("--out")
    s.add_argument("--tol", type=positive_float)
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("control", help="iterative data-driven control from a problem JSON")
    k.add_argument("problem")
    k.add_argument("--out")
    k.add_argument("--tol", type=positive_float)
    k.set_defaults(func=cmd_control)

    r = sub.add_parser("reproduce", help="rerun a built-in experiment")
    r.add_argument("example", choices=sorted(REPRODUCERS))
    r.add_argument("--seed", type=nonneg_int, default=0)
    r.add_argument("--Nd", type=positive_int)
    r.add_argument("--L", type=positive_int)
    r.add_argument("--Ti", type=positive_int)
    r.add_argument("--Tr", type=positive_int)
    r.add_argument("--tol", type=positive_float)
    r.add_argument("--out")
    r.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    if getattr(args, "input", None) is None and args.command == "generate":
        args.input = "feedback" if args.model == "example2" else "gaussian"
    try:
        return args.func(args)
    except UsageError as e:
        print(f"lpvdd: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleError, InconsistentWindowError, np.linalg.LinAlgError, RuntimeError) as e:
        print(f"lpvdd: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (LpvddError, OSError, KeyError, ValueError) as e:
        print(f"lpvdd: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
