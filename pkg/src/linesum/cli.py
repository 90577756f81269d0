"""Command-line surface.

Subcommands: feasible, count-exact, estimate, saddle, verify-integral,
mw3-check, compare, sweep.  Instances come from --input FILE (JSON
{"s": [...], "t": [...]}) or --s/--t comma lists.  Output is a single JSON
object (RunRecord) or CSV rows with the fixed schema
m,n,command,value,log_value,error_estimate,runtime_ms.

Exit codes: 0 success, 1 infeasible instance (feasible/count paths),
2 invalid input, 3 numerical failure.

Reproducibility: when --seed is given, the run is fully deterministic and
timing_ms/runtime_ms are reported as 0 so that repeated invocations (and
different --threads values) produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, errors
from .asymptotic import estimate_log_count
from .core import MarginPair, compute_stats
from .exact import exact_count, gale_ryser_feasible
from .integral import verify_identity
from .moments import MomentCoefficients, integrate_f_direct, mw3_estimate
from .saddle import log_prefactor, solve_saddle

CSV_COLUMNS = ["m", "n", "command", "value", "log_value", "error_estimate", "runtime_ms"]


@dataclass
class RunRecord:
    """One CLI invocation's result; serializes to a single JSON object."""

    command: str
    instance: dict | None
    outputs: dict
    timing_ms: int
    version: str = __version__

    def to_json(self):
        obj = {
            "command": self.command,
            "instance": self.instance,
            "outputs": self.outputs,
            "timing_ms": self.timing_ms,
            "version": self.version,
        }
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else str(v)


def _csv_text(rows):
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(col)) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _parse_int_list(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise errors.InvalidInstance(f"bad integer list {text!r}") from exc


def _load_instance(args):
    if args.input:
        with open(args.input, "r", encoding="utf-8") as fh:
            return MarginPair.from_json(fh.read())
    if args.s is None or args.t is None:
        raise errors.InvalidInstance("provide --input FILE or both --s and --t")
    return MarginPair(_parse_int_list(args.s), _parse_int_list(args.t))


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("LINESUM_THREADS")
    return max(1, int(env)) if env else 1


def _exp_str(log_value):
    """exp(log_value) as a decimal string when it fits in double range."""
    if log_value < 700.0:
        return format(math.exp(log_value), ".17g")
    return None


# ---------------------------------------------------------------- commands


def cmd_feasible(args):
    mp = _load_instance(args)
    feasible = gale_ryser_feasible(mp)
    outputs = {"feasible": feasible}
    row = {"m": mp.m, "n": mp.n, "command": "feasible",
           "value": str(int(feasible)), "log_value": None, "error_estimate": None}
    return mp, outputs, [row], 0 if feasible else 1


def cmd_count_exact(args):
    mp = _load_instance(args)
    result = exact_count(mp)
    outputs = {"value": str(result.value), "states_visited": result.states_visited}
    row = {"m": mp.m, "n": mp.n, "command": "count-exact",
           "value": str(result.value),
           "log_value": math.log(result.value) if result.value > 0 else None,
           "error_estimate": None}
    return mp, outputs, [row], 0 if result.value > 0 else 1


def cmd_estimate(args):
    mp = _load_instance(args)
    est = estimate_log_count(mp)
    outputs = dict(est.components())
    outputs["applicability_pass"] = est.applicability_pass
    outputs["value"] = _exp_str(est.log_value)
    row = {"m": mp.m, "n": mp.n, "command": "estimate",
           "value": outputs["value"], "log_value": est.log_value,
           "error_estimate": None}
    return mp, outputs, [row], 0


def cmd_saddle(args):
    mp = _load_instance(args)
    sol = solve_saddle(mp, tol=args.tol)
    logP = log_prefactor(sol, mp)
    outputs = {
        "a": [float(v) for v in sol.a],
        "b": [float(v) for v in sol.b],
        "residual": sol.residual,
        "iterations": sol.iterations,
        "logP": logP,
    }
    row = {"m": mp.m, "n": mp.n, "command": "saddle", "value": None,
           "log_value": logP, "error_estimate": sol.residual}
    return mp, outputs, [row], 0


def cmd_verify_integral(args):
    mp = _load_instance(args)
    exact = exact_count(mp).value
    res = verify_identity(
        mp, method=args.method, resolution=args.resolution,
        samples=args.samples, seed=args.seed or 0, threads=_threads(args),
        tol=args.tol,
    )
    PI = res["PI"]
    defect = abs(PI - exact) / exact if exact else float("inf")
    outputs = {
        "exact": str(exact),
        "P": res["P"],
        "I": res["I"].real,
        "I_imag": res["I"].imag,
        "PI": PI,
        "relative_defect": defect,
        "method": res["method"],
        "points_or_samples": res["points_or_samples"],
        "error_estimate": res["PI_error"],
    }
    row = {"m": mp.m, "n": mp.n, "command": "verify-integral",
           "value": str(exact), "log_value": math.log(PI) if PI > 0 else None,
           "error_estimate": res["PI_error"]}
    return mp, outputs, [row], 0


def _complex_field(obj, shape):
    arr = np.asarray(obj, dtype=float)
    if arr.shape != shape + (2,):
        raise errors.InvalidInstance(f"expected shape {shape} of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def cmd_mw3_check(args):
    with open(args.coeffs, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        N = int(doc["N"])
        mc = MomentCoefficients(
            N=N,
            Ahat=float(doc["Ahat"]),
            a=_complex_field(doc["a"], (N,)),
            B=_complex_field(doc["B"], (N,)),
            C=_complex_field(doc["C"], (N, N)),
            E=_complex_field(doc["E"], (N,)),
            F=_complex_field(doc["F"], (N, N)),
            J=_complex_field(doc["J"], (N,)),
            eps_hat=float(doc["eps_hat"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise errors.InvalidInstance(f"bad coefficients document: {exc}") from exc
    log_est = mw3_estimate(mc, tail_correction=True)
    est = complex(np.exp(log_est))
    direct = integrate_f_direct(mc, nodes_per_dim=args.nodes)
    defect = abs(est - direct) / abs(est) if est != 0 else float("inf")
    outputs = {
        "estimate": [est.real, est.imag],
        "direct": [direct.real, direct.imag],
        "relative_defect": defect,
    }
    row = {"m": N, "n": N, "command": "mw3-check", "value": None,
           "log_value": log_est.real, "error_estimate": defect}
    return None, outputs, [row], 0


def cmd_compare(args):
    mp = _load_instance(args)
    result = exact_count(mp)
    est = estimate_log_count(mp)
    ratio = None
    log_exact = math.log(result.value) if result.value > 0 else None
    if log_exact is not None:
        ratio = math.exp(est.log_value - log_exact)
    outputs = {
        "exact": str(result.value),
        "log_exact": log_exact,
        "log_estimate": est.log_value,
        "estimate": _exp_str(est.log_value),
        "ratio": ratio,
    }
    row = {"m": mp.m, "n": mp.n, "command": "compare",
           "value": str(result.value), "log_value": est.log_value,
           "error_estimate": None if log_exact is None else abs(est.log_value - log_exact)}
    return mp, outputs, [row], 0 if result.value > 0 else 1


def cmd_sweep(args):
    if args.family != "semiregular":
        raise errors.InvalidInstance(f"unknown family {args.family!r}")
    lam = args.density
    rows = []
    entries = []
    for n in _parse_int_list(args.n):
        s_val = lam * n
        if abs(s_val - round(s_val)) > 1e-9:
            raise errors.InvalidInstance(f"density {lam} * n {n} is not an integer")
        s_val = int(round(s_val))
        mp = MarginPair((s_val,) * n, (s_val,) * n)
        result = exact_count(mp)
        est = estimate_log_count(mp)
        log_exact = math.log(result.value) if result.value > 0 else None
        log_error = None if log_exact is None else abs(est.log_value - log_exact)
        entries.append({
            "n": n, "exact": str(result.value), "log_exact": log_exact,
            "log_estimate": est.log_value, "log_error": log_error,
        })
        rows.append({"m": n, "n": n, "command": "sweep",
                     "value": str(result.value), "log_value": est.log_value,
                     "error_estimate": log_error})
    return None, {"family": args.family, "density": lam, "rows": entries}, rows, 0


# ---------------------------------------------------------------- dispatch


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="instance JSON file")
    common.add_argument("--s", help="comma-separated row sums")
    common.add_argument("--t", help="comma-separated column sums")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (forces deterministic output)")
    common.add_argument("--tol", type=float, default=1e-13, help="solver tolerance")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker cap (fallback: LINESUM_THREADS)")

    parser = argparse.ArgumentParser(prog="linesum", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("feasible", parents=[common]).set_defaults(func=cmd_feasible)
    sub.add_parser("count-exact", parents=[common]).set_defaults(func=cmd_count_exact)
    sub.add_parser("estimate", parents=[common]).set_defaults(func=cmd_estimate)
    sub.add_parser("saddle", parents=[common]).set_defaults(func=cmd_saddle)

    p = sub.add_parser("verify-integral", parents=[common])
    p.add_argument("--method", choices=["trapezoid", "monte_carlo"], default="trapezoid")
    p.add_argument("--resolution", type=int, default=None, help="trapezoid nodes per angle")
    p.add_argument("--samples", type=int, default=10**6, help="Monte Carlo samples")
    p.set_defaults(func=cmd_verify_integral)

    p = sub.add_parser("mw3-check", parents=[common])
    p.add_argument("--coeffs", required=True, help="coefficients JSON (complex as [re, im])")
    p.add_argument("--nodes", type=int, default=61, help="quadrature nodes per dimension")
    p.set_defaults(func=cmd_mw3_check)

    sub.add_parser("compare", parents=[common]).set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--family", default="semiregular")
    p.add_argument("--lambda", dest="density", type=float, default=0.5)
    p.add_argument("--n", required=True, help="comma-separated sizes")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        mp, outputs, rows, code = args.func(args)
    except errors.InvalidInstance as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (errors.NonConvergence, errors.ResourceLimit, errors.NumericalBlowup,
            errors.IdentityViolation, errors.DegenerateDensity, errors.DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    elapsed_ms = 0 if args.seed is not None else int((time.monotonic() - start) * 1000)
    record = RunRecord(
        command=args.command,
        instance=mp.to_json_dict() if mp is not None else None,
        outputs=outputs,
        timing_ms=elapsed_ms,
    )
    if args.format == "csv":
        for row in rows:
            row["runtime_ms"] = elapsed_ms
        text = _csv_text(rows)
    else:
        text = record.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
