"""Command-line interface.

    minkowski-neumann constants --problem P.json --out DIR
    minkowski-neumann solve     --problem P.json --out DIR [--grid M] [--tol X]
    minkowski-neumann sweep     --problem P.json --out DIR --lambda-grid a:b:n
    minkowski-neumann verify    --problem P.json --profile U.csv [--out DIR]
    minkowski-neumann figure1   --out DIR

Exit codes: 0 success, 1 certificate failed (verify), 2 hypothesis
violation, 3 multiplicity not found, 4 I/O, parse or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .constants import UnboundedBranch, constants_for, empirical_radii
from .grid import grid_for
from .problem import ConfigError, ProblemError, detect_sign_structure, figure1_problem, load_problem
from .shooting import oracle_match
from .solver import MultiplicityNotFound, SolveOptions, find_two_solutions, lambda_sweep
from .verify import certify, read_profile_csv, write_profile_csv

EXIT_OK, EXIT_CERT, EXIT_HYPOTHESIS, EXIT_MULTIPLICITY, EXIT_IO = 0, 1, 2, 3, 4

log = logging.getLogger("minkowski_neumann")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def parse_lambda_grid(text: str) -> np.ndarray:
    """'a:b:n' -> n evenly spaced values from a to b."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise UsageError(f"--lambda-grid expects a:b:n, got {text!r}") from exc
    if n < 1:
        raise UsageError("--lambda-grid: empty grid")
    return np.array([a]) if n == 1 else np.linspace(a, b, n)


def _options(args) -> SolveOptions:
    kw = {}
    if getattr(args, "grid", None):
        kw["grid_size"] = args.grid
    if getattr(args, "tol", None):
        kw["tol"] = args.tol
    return SolveOptions(**kw)


def _outdir(args) -> Path:
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _problem(args):
    if not args.problem:
        raise UsageError("--problem is required")
    return load_problem(args.problem)


# ----------------------------------------------------------------------

def cmd_constants(args) -> int:
    problem = _problem(args)
    bundle = constants_for(problem)
    if not args.no_empirical:
        bundle = empirical_radii(problem, bundle, _options(args))
    out = _outdir(args)
    bundle.save(out / "constants.json")
    print(f"epsilon={bundle.epsilon:.6g} delta*={bundle.delta_star:.6g} "
          f"delta_low={bundle.delta_low:.6g} lambda*={bundle.lambda_star:.6g}")
    return EXIT_OK


def _solve_pair(problem, options, out: Path, seed):
    bundle = constants_for(problem)
    structure = detect_sign_structure(problem)
    summary = {"lambda": problem.lam, "lambda_star": bundle.lambda_star,
               "delta_star": bundle.delta_star, "seed": seed}
    try:
        us, ul, rep = find_two_solutions(problem, bundle, options, structure=structure)
    except MultiplicityNotFound as exc:
        summary["status"] = "multiplicity not found"
        summary["message"] = str(exc)
        summary["attempts"] = [vars(a) for a in exc.report.attempts]
        summary["norms"] = exc.report.norms
        _write_json(out / "summary.json", summary)
        print(exc, file=sys.stderr)
        return None, summary
    certs = {}
    for name, prof in (("small", us), ("large", ul)):
        write_profile_csv(prof, out / f"u_{name}.csv")
        cert = certify(problem, prof, bundle=bundle, structure=structure)
        cert.save(out / f"certificate_{name}.json")
        certs[name] = cert
    summary.update({
        "status": "ok" if all(c.overall for c in certs.values()) else "certificate failed",
        "n_solutions": len(rep.solutions),
        "norms": rep.norms,
        "bracketed": rep.bracketed,
        "u0": {"small": float(us.u[0]), "large": float(ul.u[0])},
        "max_abs_slope": {"small": certs["small"].max_abs_slope, "large": certs["large"].max_abs_slope},
        "certified": {k: c.overall for k, c in certs.items()},
    })
    return (us, ul, certs), summary


def cmd_solve(args) -> int:
    problem = _problem(args)
    out = _outdir(args)
    res, summary = _solve_pair(problem, _options(args), out, args.seed)
    if res is None:
        return EXIT_MULTIPLICITY
    _write_json(out / "summary.json", summary)
    print(f"norms: small={summary['norms'][0]:.10g} large={summary['norms'][-1]:.10g}")
    return EXIT_OK if summary["status"] == "ok" else EXIT_CERT


def cmd_sweep(args) -> int:
    problem = _problem(args)
    if not args.lambda_grid:
        raise UsageError("--lambda-grid is required")
    lams = parse_lambda_grid(args.lambda_grid)
    try:
        rows = lambda_sweep(problem, lams, _options(args))
    except ValueError as exc:
        if isinstance(exc, ProblemError):
            raise
        raise UsageError(str(exc)) from exc
    out = _outdir(args)
    width = max([r.n_solutions for r in rows] + [1])
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "n_solutions", *[f"norm_{k + 1}" for k in range(width)]])
        for r in rows:
            norms = [f"{x:.17g}" for x in r.norms] + [""] * (width - len(r.norms))
            w.writerow([f"{r.lam:.17g}", r.n_solutions, *norms])
    for r in rows:
        print(f"lambda={r.lam:.6g} n={r.n_solutions} norms={[round(x, 8) for x in r.norms]}")
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = _problem(args)
    if not args.profile:
        raise UsageError("--profile is required")
    prof = read_profile_csv(args.profile, problem.weight.breakpoints)
    bundle = None
    structure = None
    try:
        structure = detect_sign_structure(problem)
        bundle = constants_for(problem, structure)
    except ProblemError as exc:
        log.warning("claims not checked: %s", exc)
    cert = certify(problem, prof, bundle=bundle, structure=structure)
    text = cert.to_json()
    if args.out:
        (_outdir(args) / "certificate.json").write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if cert.overall else EXIT_CERT


def cmd_figure1(args) -> int:
    problem = figure1_problem()
    options = _options(args)
    out = _outdir(args)
    grid = grid_for(problem, options.grid_size)
    with open(out / "weight.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "a"])
        for r, a in zip(grid.r, problem.a(grid.r)):
            w.writerow([f"{r:.17g}", f"{a:.17g}"])
    structure = detect_sign_structure(problem, strict=True)
    bundle = constants_for(problem, structure)
    bundle.save(out / "constants.json")
    res, summary = _solve_pair(problem, options, out, args.seed)
    if res is None:
        return EXIT_MULTIPLICITY
    us, ul, certs = res
    zeros = sorted({x for iv in structure.intervals for x in iv if 0.0 < x < problem.R})
    summary["weight_zeros"] = zeros
    summary["oracle_distance"] = {}
    for name, prof in (("small", us), ("large", ul)):
        _, dist = oracle_match(problem, prof)
        summary["oracle_distance"][name] = dist
    summary["sharp_cornered"] = summary["max_abs_slope"]["large"] > 0.9
    ok = (summary["status"] == "ok" and summary["sharp_cornered"]
          and all(d <= 1e-4 for d in summary["oracle_distance"].values()))
    summary["status"] = "ok" if ok else "failed"
    _write_json(out / "summary.json", summary)
    print(f"weight zeros: {', '.join(f'{z:.6f}' for z in zeros)}")
    print(f"small: |u|={summary['norms'][0]:.10g}  large: |u|={summary['norms'][-1]:.10g} "
          f"max|u'|={summary['max_abs_slope']['large']:.6f}")
    return EXIT_OK if ok else EXIT_CERT


COMMANDS = {
    "constants": cmd_constants,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "figure1": cmd_figure1,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="minkowski-neumann",
                description="Positive radial solutions of Minkowski-curvature Neumann problems.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--problem", help="problem config (JSON)")
    p.add_argument("--out", help="output directory (default ./out; verify prints to stdout)")
    p.add_argument("--grid", type=int, help="number of grid cells (default 2000)")
    p.add_argument("--tol", type=float, help="sup-norm residual target")
    p.add_argument("--lambda-grid", help="a:b:n, evenly spaced lambda values")
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in outputs; the start schedule is deterministic")
    p.add_argument("--profile", help="solution CSV (r, u, du) for verify")
    p.add_argument("--no-empirical", action="store_true",
                   help="constants: skip the d*, D* sweeps")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.grid is not None and args.grid < 8:
            raise UsageError("--grid must be >= 8")
        if args.tol is not None and not args.tol > 0:
            raise UsageError("--tol must be positive")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ProblemError, UnboundedBranch) as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
