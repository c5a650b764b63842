"""``firefront`` command line: simulate, estimate and evaluate scenarios.

Exit codes: 0 success, 2 usage error, 3 invalid input, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .artifacts import read_fronts, write_run
from .estimation import estimate, generate_synthetic_measurements
from .metrics import metric_report
from .scenario import BUNDLED, ScenarioError, load_scenario
from .solver import NumericalError, SolverConfig, simulate
from .spread import ParamVector

EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4


class InputError(Exception):
    pass


def parse_params(text):
    """Eight numbers separated by commas or spaces, or a report.json path."""
    path = Path(text)
    if path.suffix == ".json" and path.exists():
        doc = json.loads(path.read_text())
        p = doc.get("p_hat") or doc.get("params")
        if not isinstance(p, dict):
            raise InputError(f"{path}: no p_hat or params object")
        values = [p[name] for name in ParamVector.names()]
    else:
        try:
            values = [float(v) for v in text.replace(",", " ").split()]
        except ValueError:
            raise InputError(f"--params: cannot parse {text!r}") from None
    try:
        return ParamVector.from_array(values)
    except ValueError as exc:
        raise InputError(f"--params: {exc}") from None


def _params(args, sf):
    if args.params is not None:
        return parse_params(args.params)
    p = sf.truth()
    if p is None:
        raise InputError(f"{sf.source}: no [truth] section; pass --params")
    return p


def _measured(args, sf, scenario, solver):
    if args.measured is not None:
        measured = read_fronts(args.measured)
        if measured.grid != scenario.grid:
            raise InputError(f"{args.measured}: measurement grid {measured.grid} does not "
                             f"match the scenario grid {scenario.grid}")
        return measured
    p_star = sf.truth()
    if p_star is None:
        raise InputError("no measured fronts given and the scenario has no [truth] to "
                         "synthesize them from")
    print(f"measured: synthetic fronts at p* from [truth] ({len(scenario.times)} snapshots)")
    return generate_synthetic_measurements(scenario, p_star, solver)


def _fmt_params(p):
    return "  ".join(f"{k}={v:.6g}" for k, v in zip(ParamVector.names(), p.to_array()))


def print_table(report, out=None):
    """Indexes as rows and snapshots as columns."""
    out = out or sys.stdout
    snaps = report.snapshots
    head = "".join(f"{s.time:>12.6g}" for s in snaps)
    print(f"{'t':<10}{head}", file=out)
    print(f"{'mismatch':<10}" + "".join(f"{s.mismatch:>12d}" for s in snaps), file=out)
    for name in ("ssi", "jsc", "ks"):
        cells = "".join(f"{'-':>12}" if getattr(s, name) is None else f"{getattr(s, name):>12.4f}"
                        for s in snaps)
        print(f"{name.upper():<10}{cells}", file=out)
    print(f"J = {report.J}   N = {report.N}   r = {report.r:.6g}", file=out)
    if report.e is not None:
        print(f"e = {report.e:.6g}", file=out)


def _metric_dict(report):
    d = report.to_dict()
    d["snapshots"] = [dict(s) for s in d["snapshots"]]
    return d


def cmd_simulate(args):
    sf = load_scenario(args.scenario)
    scenario = sf.build()
    p = _params(args, sf)
    solver = sf.solver_config(cfl=args.cfl)
    series = simulate(scenario, p, solver)
    burnt = series.burnt().sum(axis=(1, 2))
    report = {
        "scenario": sf.name, "params": dict(zip(ParamVector.names(), p.to_array().tolist())),
        "times": series.times.tolist(), "burnt_cells": burnt.tolist(), "N": scenario.grid.size,
    }
    print(f"simulated {sf.name}: {len(series)} snapshots, t in [{series.times[0]:g}, "
          f"{series.times[-1]:g}]")
    print("burnt cells: " + " ".join(str(b) for b in burnt))
    if args.out:
        write_run(args.out, series=series, report=report)
        print(f"wrote {args.out}")
    return 0


def cmd_estimate(args):
    sf = load_scenario(args.scenario)
    scenario = sf.build()
    solver = sf.solver_config(cfl=args.cfl)
    measured = _measured(args, sf, scenario, solver)
    config = sf.search_config(seed=args.seed, max_iter=args.max_iter, max_evals=args.max_evals,
                              budget_seconds=args.budget_seconds,
                              parallel_poll=args.parallel_poll or None)
    report = estimate(scenario, measured, config, solver, p_star=sf.truth())
    print(f"p_hat: {_fmt_params(report.p_hat)}")
    print(f"status: {report.status}  evaluations: {report.nfev}  iterations: {report.nit}  "
          f"seconds: {report.seconds:.1f}")
    print_table(report)
    if args.out:
        doc = report.to_dict()
        doc["scenario"] = sf.name
        doc["seed"] = config.seed
        doc.pop("seconds")  # keeps report.json byte-stable across runs
        write_run(args.out, report=doc, trace=report.trace)
        print(f"wrote {args.out}")
    return 0


def cmd_evaluate(args):
    sf = load_scenario(args.scenario)
    scenario = sf.build()
    p = _params(args, sf)
    solver = sf.solver_config(cfl=args.cfl)
    measured = _measured(args, sf, scenario, solver)
    snaps = tuple(float(t) for t in measured.times if t > scenario.t0 + 1e-12)
    if not snaps:
        raise InputError("measured fronts have no snapshot after t0")
    series = simulate(scenario, p, SolverConfig(solver.cfl, snaps, solver.reinit_period))
    report = metric_report(series, measured, p, sf.truth())
    print(f"params: {_fmt_params(p)}")
    print_table(report)
    if args.out:
        doc = _metric_dict(report)
        doc["scenario"] = sf.name
        doc["params"] = dict(zip(ParamVector.names(), p.to_array().tolist()))
        write_run(args.out, series=series, report=doc)
        print(f"wrote {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="firefront", description="Level-set wildfire spread simulation and estimation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", help=f"scenario file or bundled name ({', '.join(BUNDLED)})")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--cfl", type=float, help="CFL number in (0, 1]")

    s = sub.add_parser("simulate", help="run one simulation and write fronts")
    common(s)
    s.add_argument("--params", help="8 parameters, comma separated, or a report.json")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="fit parameters to measured fronts")
    common(e)
    e.add_argument("measured", nargs="?", type=Path,
                   help="fronts directory (default: synthesize from [truth])")
    e.add_argument("--seed", type=int)
    e.add_argument("--max-iter", type=int)
    e.add_argument("--max-evals", type=int)
    e.add_argument("--budget-seconds", type=float)
    e.add_argument("--parallel-poll", action="store_true")
    e.set_defaults(func=cmd_estimate)

    v = sub.add_parser("evaluate", help="score parameters against measured fronts")
    common(v)
    v.add_argument("measured", nargs="?", type=Path,
                   help="fronts directory (default: synthesize from [truth])")
    v.add_argument("--params", help="8 parameters, comma separated, or a report.json")
    v.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"firefront: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ScenarioError, InputError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"firefront: error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
