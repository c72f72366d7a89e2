"""``cocycle-lab`` command-line front end.

Subcommands: le, profile, bounds, sweep, verify, spectrum-scan. Tables go to
CSV (stdout or ``--out``), summaries to JSON. Exit codes: 0 ok, 1 a bound or
oracle check failed, 2 usage/config error, 3 unresolved profile.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from fractions import Fraction

from . import bounds, oracles
from .cocycle import GOLDEN_MEAN, ModelParams
from .engine import (
    Regime,
    le_estimate,
    le_profile,
    set_workers,
    spectrum_membership,
)
from .errors import PreconditionError
from .sweep import ConfigError, load_config, parse_values, run_sweep
from .tolerances import DEFAULT_GRID_STEPS, DEFAULT_N, DEFAULT_PHASES, Tolerances

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNRESOLVED = 0, 1, 2, 3
SUITES = ("lemma31", "ellipse", "lemma32", "jensen", "quantization")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(sp: argparse.ArgumentParser, *, energy: str = "float") -> None:
    sp.add_argument("--a1", type=float, default=0.0, help="coefficient of 2cos(2 pi x)")
    sp.add_argument("--a2", type=float, default=0.0, help="coefficient of 2cos(4 pi x)")
    if energy == "float":
        sp.add_argument("--E", type=float, default=0.0, help="energy")
    else:
        sp.add_argument("--E", default="-5:5:21", help="energies, list or min:max:count")
    sp.add_argument("--alpha", type=float, default=GOLDEN_MEAN, help="frequency in (0, 1)")
    sp.add_argument("--n", type=int, default=DEFAULT_N, help="orbit length")
    sp.add_argument("--phases", type=int, default=DEFAULT_PHASES, help="phase samples K")
    sp.add_argument("--phase-offset", type=float, default=0.0)
    sp.add_argument("--workers", type=int, default=None,
                    help="threads (default $COCYCLE_LAB_WORKERS or all cores)")
    sp.add_argument("--tolerance", action="append", default=[], metavar="KEY=VAL")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="output file (directory for sweep)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cocycle-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("le", help="one Lyapunov exponent estimate (JSON)")
    _common(sp)
    sp.add_argument("--eps", type=float, default=0.0, help="imaginary phase shift")

    sp = sub.add_parser("profile", help="eps -> L(eps) profile (CSV) with regime")
    _common(sp)
    sp.add_argument("--eps-max", type=float, default=None)
    sp.add_argument("--eps-steps", type=int, default=DEFAULT_GRID_STEPS)

    sp = sub.add_parser("bounds", help="closed-form lower bounds (JSON)")
    _common(sp)
    sp.add_argument("--measure", action="store_true", help="also estimate L and check margins")

    sp = sub.add_parser("sweep", help="bound checks over a config grid")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True, help="directory for cells.csv and summary.json")
    sp.add_argument("--workers", type=int, default=None)

    sp = sub.add_parser("verify", help="oracle suites (JSON)")
    sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
    sp.add_argument("--seed", type=int, default=None, help="override each suite's seed")
    sp.add_argument("--n", type=int, default=DEFAULT_N, help="orbit length for quantization")
    sp.add_argument("--phases", type=int, default=DEFAULT_PHASES)
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--tolerance", action="append", default=[], metavar="KEY=VAL")
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("spectrum-scan", help="regime and spectrum verdict over an E range (CSV)")
    _common(sp, energy="range")
    sp.add_argument("--eps-max", type=float, default=None)
    sp.add_argument("--eps-steps", type=int, default=DEFAULT_GRID_STEPS)
    return ap


def _warn_rational(alpha: float) -> None:
    frac = Fraction(alpha).limit_denominator(1000)
    if abs(float(frac) - alpha) < 1e-12:
        warnings.warn(f"alpha = {alpha!r} is rational ({frac}); the guarantees assume irrational alpha")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False, default=_jsonable) + "\n"


def _jsonable(v):
    if hasattr(v, "item"):
        return v.item()
    raise TypeError(f"not JSON serialisable: {type(v).__name__}")


def _finite(obj):
    """Replace non-finite floats by strings so the JSON stays strict."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _params(args) -> ModelParams:
    p = ModelParams(args.a1, args.a2, args.E, args.alpha)
    _warn_rational(p.alpha)
    return p


def cmd_le(args, tol: Tolerances) -> int:
    p = _params(args)
    est = le_estimate(p, args.eps, args.n, args.phases, args.phase_offset)
    _emit(_json({"value": est.value, "stdError": est.std_error, "n": est.n,
                 "phases": est.phases, "eps": est.eps, "a1": p.a1, "a2": p.a2,
                 "E": p.E, "alpha": p.alpha}), args.out)
    return EXIT_OK


def _profile_csv(prof) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "le", "stdError", "slopeOver2pi", "acceleration"])
    for i, est in enumerate(prof.estimates):
        if i < len(prof.slopes):
            slope, acc = repr(float(prof.slopes[i])), str(int(prof.accelerations[i]))
            if prof.status[i] != "resolved":
                acc = ""
        else:
            slope = acc = ""
        w.writerow([repr(float(prof.eps[i])), repr(est.value), repr(est.std_error), slope, acc])
    return buf.getvalue()


def cmd_profile(args, tol: Tolerances) -> int:
    p = _params(args)
    prof = le_profile(p, args.eps_max, args.eps_steps, args.n, args.phases,
                      args.phase_offset, tol)
    member = spectrum_membership(prof, tol)
    _emit(_profile_csv(prof), args.out)
    segs = prof.segments()
    print(f"nodes: {len(prof.eps)}  eps_max: {prof.eps[-1]:.6g}", file=sys.stderr)
    for s in segs:
        print(f"  omega={s.acceleration}  eps in [{s.eps_lo:.6g}, {s.eps_hi:.6g}]"
              f"  intercept={s.intercept:.6g}", file=sys.stderr)
    print(f"regime: {prof.regime.value}  membership: {member.value}", file=sys.stderr)
    return EXIT_UNRESOLVED if prof.regime is Regime.UNRESOLVED else EXIT_OK


def cmd_bounds(args, tol: Tolerances) -> int:
    p = _params(args)
    est = le_estimate(p, 0.0, args.n, args.phases, args.phase_offset) if args.measure else None
    rep = bounds.bound_report(p, est)
    out = rep.as_dict()
    out["theoremApplicable"] = bounds.theorem_applicable(p)
    if args.measure:
        out["satisfied"] = rep.satisfied(tol.sigmas, tol.bound)
    _emit(_json(out), args.out)
    return EXIT_OK if rep.satisfied(tol.sigmas, tol.bound) else EXIT_FAIL


def cmd_sweep(args, tol: Tolerances) -> int:
    plan = load_config(args.config)
    _warn_rational(plan.alpha)
    result = run_sweep(plan)
    result.write(args.out)
    s = result.summary
    print(f"cells: {s['cells']}  theorem applicable: {s['theorem']['applicable']}"
          f"  violations: {s['theorem']['violations']}"
          f"  worst margin: {s['theorem']['worstMargin']}"
          f"  wall time: {s['wallTime']:.1f}s", file=sys.stderr)
    return EXIT_FAIL if result.theorem_violations else EXIT_OK


def _run_suite(name: str, args, tol: Tolerances) -> list:
    seed = {} if args.seed is None else {"seed": args.seed}
    if name == "lemma31":
        return [oracles.lemma31_exhaustive(**seed)]
    if name == "ellipse":
        return [oracles.ellipse_suite(**seed)]
    if name == "lemma32":
        return oracles.lemma32_suite(**seed)
    if name == "jensen":
        return oracles.jensen_suite(**seed)
    return [oracles.quantization_suite(n=args.n, K=args.phases, tol=tol)]


def cmd_verify(args, tol: Tolerances) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    reports = [r for name in names for r in _run_suite(name, args, tol)]
    passed = all(r.passed for r in reports)
    _emit(_json(_finite({"passed": passed, "suites": [r.as_dict() for r in reports]})), args.out)
    for r in reports:
        if not r.passed:
            print(f"FAILED {r.name}: margin {r.worst_case_margin!r} at "
                  f"{json.dumps(_finite(r.worst_case_input), default=_jsonable)}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_spectrum_scan(args, tol: Tolerances) -> int:
    energies = parse_values(args.E, "E")
    _warn_rational(args.alpha)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["E", "le0", "regime", "membership"])
    unresolved = 0
    for E in energies:
        p = ModelParams(args.a1, args.a2, E, args.alpha)
        prof = le_profile(p, args.eps_max, args.eps_steps, args.n, args.phases,
                          args.phase_offset, tol)
        member = spectrum_membership(prof, tol)
        unresolved += prof.regime is Regime.UNRESOLVED
        w.writerow([repr(E), repr(prof.estimates[0].value), prof.regime.value, member.value])
    _emit(buf.getvalue(), args.out)
    print(f"energies: {len(energies)}  unresolved: {unresolved}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "le": cmd_le,
    "profile": cmd_profile,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "spectrum-scan": cmd_spectrum_scan,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = Tolerances.parse(getattr(args, "tolerance", None))
        set_workers(args.workers)
        return COMMANDS[args.command](args, tol)
    except ConfigError as exc:
        print(f"cocycle-lab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, KeyError, ValueError) as exc:
        print(f"cocycle-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
