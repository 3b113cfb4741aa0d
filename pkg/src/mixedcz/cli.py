"""Command-line entry point: ``mixedcz eval | validate | case | laminate``.

Exit codes: 0 success, 1 a validation check failed, 2 a solver did not
converge, 64 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .config import ConfigError, load_law, load_problem
from .laminate import NonConvergence, run_evolution
from .mixedmode import PotentialLaw, TensionLaw
from .pathsim import CASES, case_density, case_path, simulate_path
from .validate import Status, run_all, standard_grid

EXIT_OK, EXIT_FAIL, EXIT_NONCONV, EXIT_USAGE = 0, 1, 2, 64
EVAL_COLUMNS = ("y1", "y2", "z1", "z2", "phi", "dphi1", "dphi2", "t1", "t2")
REPORT_COLUMNS = ("law", "hypothesis", "status", "worst", "tolerance", "location", "grid", "note")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v):
    return "" if v is None else repr(float(v))


def build_parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = _Parser(prog="mixedcz", description="Mixed-mode cohesive laws with loading-unloading history.", formatter_class=fmt)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="print law values at one (y, z)", formatter_class=fmt)
    e.add_argument("--law", required=True, help="law config file")
    e.add_argument("--y", nargs=2, type=float, required=True, metavar=("Y1", "Y2"), help="cohesive variables")
    e.add_argument("--z", nargs=2, type=float, default=[0.0, 0.0], metavar=("Z1", "Z2"), help="history")

    v = sub.add_parser("validate", help="check the structural hypotheses of a law", formatter_class=fmt)
    v.add_argument("law", help="law config file")
    v.add_argument("--format", choices=("csv", "json"), default="csv", help="report format")
    v.add_argument("--out", help="report file (default: stdout)")
    v.add_argument("--random", type=int, default=10_000, help="random grid points (seed 42)")

    c = sub.add_parser("case", help="run a reference loading path", formatter_class=fmt)
    c.add_argument("n", type=int, choices=sorted(CASES), help="case number")
    c.add_argument("--model", choices=("potential", "nonpotential", "both"), default="both", help="law(s) to drive")
    c.add_argument("--samples", type=int, default=2000, help="time samples along the path")
    c.add_argument("--out", required=True, help="output directory")
    c.add_argument("--no-svg", action="store_true", help="skip plots")

    lm = sub.add_parser("laminate", help="run a laminate evolution", formatter_class=fmt)
    lm.add_argument("problem", help="problem config file")
    lm.add_argument("--out", required=True, help="output directory")
    lm.add_argument("--scheme", choices=("energetic", "equilibrium"), help="override the problem's scheme")
    lm.add_argument("--fields", action="store_true", help="dump nodal fields of the final step")
    lm.add_argument("--no-svg", action="store_true", help="skip plots")
    return p


def cmd_eval(args, out):
    cfg = load_law(args.law)
    psi = cfg.density()
    y = np.array(args.y, dtype=float)
    z = np.array(args.z, dtype=float)
    if np.any(y < 0) or np.any(z < 0):
        raise UsageError("openings and histories must be nonnegative")
    pot = PotentialLaw(psi)
    ten = TensionLaw.from_density(psi, cfg.clip)
    g = pot.traction(y, z)
    t = ten.traction(y, z)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(EVAL_COLUMNS)
    w.writerow([_fmt(v) for v in (*y, *z, pot.energy(y, z), *g, *t)])
    return EXIT_OK


def cmd_validate(args, out):
    cfg = load_law(args.law)
    reports = []
    for law in cfg.laws():
        grid = standard_grid(law.openings, n_random=args.random)
        reports += [(law.model.value, r) for r in run_all(law, grid)]
    reports.sort(key=lambda mr: (mr[0], mr[1].hypothesis))
    if args.format == "json":
        text = json.dumps([{"law": m, **r.as_row()} for m, r in reports], indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, REPORT_COLUMNS, lineterminator="\n")
        w.writeheader()
        for m, r in reports:
            w.writerow({"law": m, **r.as_row()})
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    failed = [r.hypothesis for _, r in reports if r.status is Status.FAIL]
    if failed:
        print(f"failed: {', '.join(sorted(set(failed)))}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_case(args, out):
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    os.makedirs(args.out, exist_ok=True)
    psi = case_density(args.n)
    path = case_path(args.n, args.samples)
    laws = {"potential": PotentialLaw(psi), "nonpotential": TensionLaw.from_density(psi)}
    models = list(laws) if args.model == "both" else [args.model]
    for m in models:
        stem = "trace" if len(models) == 1 else f"trace_{m}"
        trace = simulate_path(laws[m], path)
        csv_path = os.path.join(args.out, stem + ".csv")
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            trace.to_csv(fh)
        if not args.no_svg:
            from .plots import trace_svg

            trace_svg(csv_path, os.path.join(args.out, stem + ".svg"), f"case {args.n}, {m}")
        out.write(f"wrote {csv_path}\n")
    return EXIT_OK


def cmd_laminate(args, out):
    pc = load_problem(args.problem)
    os.makedirs(args.out, exist_ok=True)
    status = EXIT_OK
    try:
        traj = run_evolution(pc.problem, args.scheme)
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    if not traj.converged:
        bad = [s.t for s in traj.states if not s.converged]
        print(f"error: minimisation did not converge at t = {bad}", file=sys.stderr)
        status = EXIT_NONCONV
    ledger = os.path.join(args.out, "ledger.csv")
    with open(ledger, "w", encoding="utf-8", newline="") as fh:
        traj.to_csv(fh)
    if args.fields:
        with open(os.path.join(args.out, "fields.csv"), "w", encoding="utf-8", newline="") as fh:
            traj.fields_csv(fh=fh)
    if not args.no_svg:
        from .plots import ledger_svg

        ledger_svg(ledger, os.path.join(args.out, "ledger.svg"))
    out.write(f"wrote {ledger}\n")
    return status


COMMANDS = {"eval": cmd_eval, "validate": cmd_validate, "case": cmd_case, "laminate": cmd_laminate}


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except (ConfigError, UsageError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"mixedcz {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
