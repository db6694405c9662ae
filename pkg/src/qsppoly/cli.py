"""Command-line front end.

Exit codes:
  0  success (verify: Member)
  1  invalid input or parameters
  2  approx: error budget or degree cap exceeded
  3  step: linear system ill-conditioned
  4  verify: MemberWithinTol
  5  verify: NotMember
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bernstein as bern
from .correction import Mode, approximate_in_family
from .equiripple import KAPPA, MAX_ROUNDS, ZeroConfig, equiripple_solve, gap_report
from .errors import (
    ConvergenceBudgetExceeded,
    CorrectionFailed,
    EvenDegree,
    GapInsideRippleRegion,
    IllConditioned,
    InfeasibleAtMaxDegree,
    NotConverged,
    QSPPolyError,
    StructureViolation,
    TargetNotInClass,
)
from .membership import Family, Verdict, check_family
from .poly import as_monomial, poly_from_json, poly_to_json
from .targets import TargetFunction

DEFAULT_TOL = 1e-9
SWEEP_KINDS = ("ripple-vs-aell", "gap-vs-aell", "bernstein-rate")
RIPPLE_COLUMNS = ["ell", "a_ell", "delta", "p_at_gap", "rounds", "converged", "in_P", "status"]
RATE_COLUMNS = ["L", "eps", "measured", "bound", "status"]


class UsageError(Exception):
    pass


def default_tol() -> float:
    raw = os.environ.get("QSPPOLY_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"QSPPOLY_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError("QSPPOLY_TOL must be positive")
    return tol


def _write_json(path, obj):
    text = json.dumps(obj, indent=2)
    if path in (None, "-"):
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _load_poly(path):
    try:
        return as_monomial(poly_from_json(Path(path).read_text()))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read polynomial from {path}: {exc}") from None


def _load_target(text: str) -> TargetFunction:
    path = Path(text)
    if text.endswith(".json"):
        return TargetFunction.from_poly(_load_poly(text))
    if text.endswith(".csv"):
        try:
            with path.open() as fh:
                rows = [r for r in csv.reader(fh) if r]
        except OSError as exc:
            raise UsageError(str(exc)) from None
        try:
            float(rows[0][0])
        except (ValueError, IndexError):
            rows = rows[1:]
        try:
            xs = [float(r[0]) for r in rows]
            ys = [float(r[1]) for r in rows]
            return TargetFunction.table(xs, ys)
        except (ValueError, IndexError) as exc:
            raise UsageError(f"bad table {text}: {exc}") from None
    try:
        return TargetFunction.parse(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"unknown target {text!r}: {exc}") from None


def cmd_approx(args) -> int:
    if not args.delta > 0:
        raise UsageError("delta must be positive")
    f = _load_target(args.target)
    try:
        u, report = approximate_in_family(f, args.family, args.delta, Mode.coerce(args.mode))
    except TargetNotInClass as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceBudgetExceeded, InfeasibleAtMaxDegree, CorrectionFailed) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    _write_json(args.out, poly_to_json(u))
    if args.report:
        _write_json(args.report, report.to_json())
    if report.membership.verdict is not Verdict.MEMBER:
        print(f"result verdict {report.membership.verdict.value}", file=sys.stderr)
        return 2
    print(f"degree {u.degree()}, error {report.measured_error:.3g} < {args.delta}", file=sys.stderr)
    return 0


def cmd_step(args) -> int:
    if args.mode == "bernstein":
        if args.L is None or args.L < 1:
            raise UsageError("--L must be a positive odd integer")
        if not 0 < args.eps < 0.5:
            raise UsageError("--eps must lie in (0, 1/2)")
        try:
            measured, bound = bern.step_error(args.L, bern.StepDomain(args.eps))
        except EvenDegree as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        p = bern.bernstein_step(args.L)
        if not bern.step_parity_check(args.L):
            print(f"warning: B_{args.L} step approximant is not in P (L = 3 mod 4)", file=sys.stderr)
        print(f"measured {measured:.6g} <= bound {bound:.6g}")
        _write_json(args.out, {"poly": poly_to_json(p), "L": args.L, "eps": args.eps,
                               "measured": measured, "bound": bound})
        return 0

    if args.ell is None or args.a_ell is None:
        raise UsageError("equiripple mode needs --ell and --a-ell")
    if not args.kappa > 0:
        raise UsageError("kappa must be positive")
    try:
        cfg = ZeroConfig.equispaced(args.ell, args.a_ell)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        res = equiripple_solve(cfg, args.kappa, args.max_rounds)
    except IllConditioned as exc:
        print(f"ill-conditioned: {exc}", file=sys.stderr)
        return 3
    except NotConverged as exc:
        res = exc.result
        print(f"warning: {exc}", file=sys.stderr)
    except StructureViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _write_json(args.out, res.to_json())
    return 0


def cmd_verify(args) -> int:
    p = _load_poly(args.poly)
    if p.is_zero():
        raise UsageError("the zero polynomial cannot be checked")
    tol = args.tol if args.tol is not None else default_tol()
    report = check_family(p, args.family, tol)
    _write_json(None, report.to_json())
    return {Verdict.MEMBER: 0, Verdict.MEMBER_WITHIN_TOL: 4, Verdict.NOT_MEMBER: 5}[report.verdict]


def format_float(v: float) -> str:
    """Shortest round-trip decimal."""
    return repr(float(v))


def cmd_sample(args) -> int:
    if args.n < 2:
        raise UsageError("n must be at least 2")
    p = _load_poly(args.poly)
    xs = np.linspace(args.lo, args.hi, args.n)
    vals = np.asarray(p(xs), dtype=float) * np.ones_like(xs)
    lines = ["x,p"] + [f"{format_float(x)},{format_float(v)}" for x, v in zip(xs, vals)]
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _ripple_row(job):
    ell, a_ell, eps, kappa, max_rounds = job
    row = {"ell": ell, "a_ell": a_ell, "delta": "", "p_at_gap": "", "rounds": "", "converged": "",
           "in_P": "", "status": "ok"}
    try:
        try:
            res = equiripple_solve(ZeroConfig.equispaced(ell, a_ell), kappa, max_rounds)
        except NotConverged as exc:
            res = exc.result
            row["status"] = "not_converged"
        row.update(delta=res.delta, rounds=res.rounds, converged=res.converged, in_P=res.in_P)
        if eps is not None:
            try:
                row["p_at_gap"] = gap_report(res, eps)["p_at_gap"]
            except GapInsideRippleRegion:
                row["status"] = "gap_inside_ripple_region"
    except IllConditioned:
        row["status"] = "ill_conditioned"
    except (StructureViolation, ValueError) as exc:
        row["status"] = type(exc).__name__
    return row


def _rate_row(job):
    L, eps = job
    try:
        measured, bound = bern.step_error(L, bern.StepDomain(eps))
        return {"L": L, "eps": eps, "measured": measured, "bound": bound, "status": "ok"}
    except QSPPolyError as exc:
        return {"L": L, "eps": eps, "measured": "", "bound": "", "status": type(exc).__name__}


def _grid(lo, hi, step):
    n = int(round((hi - lo) / step)) + 1
    return [round(lo + i * step, 12) for i in range(n)]


def cmd_sweep(args) -> int:
    if args.kind == "bernstein-rate":
        if not 0 < args.eps < 0.5:
            raise UsageError("--eps must lie in (0, 1/2)")
        jobs = [(L, args.eps) for L in range(args.L_min, args.L_max + 1, args.L_step)]
        worker, columns = _rate_row, RATE_COLUMNS
    else:
        if not args.kappa > 0:
            raise UsageError("kappa must be positive")
        eps = args.eps if args.kind == "gap-vs-aell" else (args.eps if args.eps_given else None)
        jobs = [(args.ell, a, eps, args.kappa, args.max_rounds) for a in _grid(args.a_min, args.a_max, args.a_step)]
        worker, columns = _ripple_row, RIPPLE_COLUMNS
    if not jobs:
        raise UsageError("empty sweep range")
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(worker, jobs))
    else:
        rows = [worker(j) for j in jobs]

    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: format_float(v) if isinstance(v, float) else v for k, v in row.items()})
    finally:
        if out is not sys.stdout:
            out.close()
    return 0 if any(r["status"] == "ok" for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsppoly",
        description="Polynomial approximation within the P and Q families.",
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="approximate a target within P or Q")
    p.add_argument("--target", required=True, help="builtin name (e.g. square, scaled_bump:0.9), poly .json or table .csv")
    p.add_argument("--family", required=True, choices=["P", "Q"])
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--report")
    p.add_argument("--mode", default="MinimalSearch", choices=[m.value for m in Mode])
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("step", help="step-function approximants")
    p.add_argument("--mode", required=True, choices=["bernstein", "equiripple"])
    p.add_argument("--L", type=int)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--ell", type=int)
    p.add_argument("--a-ell", type=float)
    p.add_argument("--kappa", type=float, default=KAPPA)
    p.add_argument("--max-rounds", type=int, default=MAX_ROUNDS)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_step)

    p = sub.add_parser("verify", help="check membership of a polynomial JSON file")
    p.add_argument("poly")
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--tol", type=float, help="default 1e-9, or QSPPOLY_TOL")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="equispaced samples of a polynomial as CSV")
    p.add_argument("poly")
    p.add_argument("--from", dest="lo", type=float, default=0.0)
    p.add_argument("--to", dest="hi", type=float, default=1.0)
    p.add_argument("--n", type=int, default=101)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("sweep", help="parameter sweeps as CSV")
    p.add_argument("--kind", required=True, choices=SWEEP_KINDS)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--a-min", type=float, default=0.2)
    p.add_argument("--a-max", type=float, default=0.4)
    p.add_argument("--a-step", type=float, default=0.05)
    p.add_argument("--eps", type=float)
    p.add_argument("--kappa", type=float, default=KAPPA)
    p.add_argument("--max-rounds", type=int, default=MAX_ROUNDS)
    p.add_argument("--L-min", type=int, default=5)
    p.add_argument("--L-max", type=int, default=101)
    p.add_argument("--L-step", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        args.eps_given = args.eps is not None
        if args.eps is None:
            args.eps = 0.05 if args.kind == "gap-vs-aell" else 0.1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
