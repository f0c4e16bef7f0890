"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import analysis as A
from . import constants as C
from .normspace import NormConfigError, parse_space
from .orthogonality import ConsistencyError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

CSV_COLUMNS = ("t", "value", "witness_theta_x", "witness_theta_y", "witness_rho", "boundary_flag")

# name -> (needs a parameter, parameter domain)
CONSTANTS = {
    "L": (True, (0.0, 1.0)),
    "L_gamma": (True, (0.0, 0.5)),
    "gamma": (True, (0.0, 1.0)),
    "delta": (True, (0.0, 2.0)),
    "rho": (True, (0.0, math.inf)),
    "cnj": (False, None),
    "cnj_from_L": (False, None),
    "cnj_prime": (False, None),
    "cnj_doubleprime": (False, None),
    "james": (False, None),
    "rho1_from_delta": (False, None),
}


class ConfigError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    return f"{float(x):.12g}"


def parse_t_grid(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included when it lies on the grid."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise ConfigError(f"t grid must look like start:stop:step, got {text!r}") from None
    if not all(map(math.isfinite, (start, stop, step))) or step <= 0 or stop < start:
        raise ConfigError("empty or degenerate grid")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + k * step, 12) for k in range(n + 1)]


def _check_param(name, t):
    needs, dom = CONSTANTS[name]
    if not needs:
        return
    if t is None:
        raise ConfigError(f"constant {name!r} needs --t")
    lo, hi = dom
    if not (lo <= t <= hi):
        raise ConfigError(f"--t={t} outside the domain [{lo}, {hi}] of {name!r}")


def compute(plane, name: str, t: float | None, args) -> C.ConstantEstimate:
    g = {"grid": args.grid, "refine_tol": args.refine_tol}
    m = {"n_theta": args.manifold_theta, "refine_tol": args.refine_tol}
    if name == "L":
        return C.L_value(plane, t, **m)
    if name == "L_gamma":
        return C.L_via_gamma(plane, t, **g)
    if name == "gamma":
        return C.gamma(plane, t, **g)
    if name == "delta":
        return C.delta(plane, t, **g)
    if name == "rho":
        return C.rho(plane, t, **g)
    if name == "cnj":
        return C.cnj(plane, **g)
    if name == "cnj_prime":
        return C.cnj_prime(plane, **g)
    if name == "cnj_doubleprime":
        return C.cnj_doubleprime(plane, **m)
    if name == "james":
        return C.james(plane, **g)
    if name == "cnj_from_L":
        return C.cnj_from_L(plane)
    if name == "rho1_from_delta":
        return C.rho1_from_delta(plane)
    raise ConfigError(f"unknown constant {name!r}")


def _row(plane, t, est):
    tx, ty, r = est.witness_params(plane)
    return [t, est.value, tx, ty, r, est.boundary_flag]


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(["" if v is None else fmt(v) for v in r])
    return buf.getvalue()


def _table(header, rows) -> str:
    cells = [list(header)] + [["" if v is None else (fmt(v) if not isinstance(v, str) else v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _est_json(plane, est, t=None):
    d = {"space": plane.label, "t": t}
    d.update(est.to_dict())
    return d


def cmd_constant(args, plane) -> int:
    name = args.name
    if name not in CONSTANTS:
        raise ConfigError(f"unknown constant {name!r}; choose from {', '.join(CONSTANTS)}")
    _check_param(name, args.t)
    est = compute(plane, name, args.t, args)
    if args.output == "json":
        _emit(args, json.dumps(_est_json(plane, est, args.t), indent=2, allow_nan=False) + "\n")
    elif args.output == "csv":
        _emit(args, _csv([_row(plane, args.t, est)]))
    else:
        tx, ty, r = est.witness_params(plane)
        wit = ", ".join(f"({fmt(v.u)}, {fmt(v.v)})" for v in est.witness[:2])
        rows = [
            ("space", plane.label),
            ("constant", name),
            ("t", "" if args.t is None else fmt(args.t)),
            ("value", fmt(est.value)),
            ("witness", wit),
            ("witness angles", f"{fmt(tx)}, {fmt(ty)}"),
            ("witness rho", fmt(r)),
            ("grid", str(est.grid)),
            ("refine tol", fmt(est.refine_tol)),
            ("boundary flag", fmt(est.boundary_flag)),
        ]
        _emit(args, _table(("field", "value"), rows))
    return EXIT_OK


def _sweep_values(args, plane, name):
    if name not in CONSTANTS:
        raise ConfigError(f"unknown constant {name!r}; choose from {', '.join(CONSTANTS)}")
    if not CONSTANTS[name][0]:
        raise ConfigError(f"constant {name!r} takes no parameter and cannot be swept")
    if not args.t_grid:
        raise ConfigError("--t-grid is required")
    ts = parse_t_grid(args.t_grid)
    for t in ts:
        _check_param(name, t)
    return ts, [compute(plane, name, t, args) for t in ts]


def cmd_sweep(args, plane) -> int:
    ts, ests = _sweep_values(args, plane, args.name)
    rows = [_row(plane, t, e) for t, e in zip(ts, ests)]
    if args.output == "json":
        _emit(args, json.dumps([_est_json(plane, e, t) for t, e in zip(ts, ests)], indent=2, allow_nan=False) + "\n")
    elif args.output == "csv":
        _emit(args, _csv(rows))
    else:
        _emit(args, _table(CSV_COLUMNS, rows))
    return EXIT_OK


def _oracle(name, spec, t):
    if name == "L":
        return C.closed_form_L(spec, t)
    if name == "L_gamma":
        return C.closed_form_L(spec, t)
    if name == "gamma":
        return C.closed_form_gamma(spec, t)
    return None


def cmd_plot_data(args, plane) -> int:
    ts, ests = _sweep_values(args, plane, args.name)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{plane.label}_{args.name}"
    curve = out / f"{stem}.dat"
    curve.write_text("".join(f"{fmt(t)} {fmt(e.value)}\n" for t, e in zip(ts, ests)))
    written = [curve]
    oracle = [_oracle(args.name, plane.spec, t) for t in ts]
    if all(v is not None for v in oracle):
        path = out / f"{stem}_oracle.dat"
        path.write_text("".join(f"{fmt(t)} {fmt(v)}\n" for t, v in zip(ts, oracle)))
        written.append(path)
    for p in written:
        print(p)
    return EXIT_OK


def _config(args) -> A.AnalysisConfig:
    return A.AnalysisConfig(grid=args.grid, refine_tol=args.refine_tol, n_theta=args.manifold_theta)


def cmd_verify(args, plane) -> int:
    checks = A.verify_suite(plane, _config(args))
    failed = [c for c in checks if not c.passed]
    if args.output == "json":
        doc = {"space": plane.label, "passed": not failed, "checks": [c.to_dict() for c in checks]}
        _emit(args, json.dumps(doc, indent=2, allow_nan=False) + "\n")
    else:
        rows = [(c.name, "pass" if c.passed else "FAIL", c.detail) for c in checks]
        text = _table(("check", "result", "detail"), rows)
        if failed:
            text += f"\n{len(failed)} check(s) failed: " + ", ".join(c.name for c in failed) + "\n"
        _emit(args, text)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_classify(args, plane) -> int:
    report = A.build_report(plane, _config(args))
    if args.output == "json":
        _emit(args, report.to_json() + "\n")
    else:
        rows = [(c.property, c.verdict, fmt(c.margin), c.evidence) for c in report.certificates]
        text = f"space: {report.label}\n" + _table(("property", "verdict", "margin", "evidence"), rows)
        for w in report.warnings:
            text += f"warning: {w}\n"
        _emit(args, text)
    return EXIT_OK


COMMANDS = {
    "constant": cmd_constant,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "plot-data": cmd_plot_data,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", required=True, help="alias, lp:P, random-polygon:SEED, inline JSON, or a JSON file")
    common.add_argument("--grid", type=int, default=C.DEFAULT_GRID, help="coarse angle grid (default 2000)")
    common.add_argument("--refine-tol", type=float, default=C.DEFAULT_REFINE_TOL)
    common.add_argument(
        "--manifold-theta", type=int, default=C.DEFAULT_N_THETA, help="theta grid for isosceles-constrained searches"
    )
    common.add_argument("--output", choices=("table", "json", "csv"), default="table")
    common.add_argument("--out", help="output file (directory for plot-data)")

    p = _Parser(prog="planeconst", description="Geometric constants of normed planes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("constant", parents=[common], help="estimate one constant")
    c.add_argument("--name", required=True)
    c.add_argument("--t", type=float)
    for cmd in ("sweep", "plot-data"):
        s = sub.add_parser(cmd, parents=[common], help=f"{cmd} over a t grid")
        s.add_argument("--name", required=True)
        s.add_argument("--t-grid", required=True, help="start:stop:step")
    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    sub.add_parser("classify", parents=[common], help="geometric-property certificates")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.grid < 90:
            raise ConfigError("--grid must be at least 90")
        if args.manifold_theta < 90:
            raise ConfigError("--manifold-theta must be at least 90")
        if not (args.refine_tol > 0):
            raise ConfigError("--refine-tol must be positive")
        plane = parse_space(args.space)
        return COMMANDS[args.command](args, plane)
    except (ConfigError, NormConfigError, C.DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConsistencyError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
