"""Command-line entry point: ``qpos <command> [flags]``.

Exit status: 0 when every check passes, 1 on any negative coefficient or
identity mismatch, 2 on usage or parameter errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import List, Optional

from qpos.dseries import DParams, RegimeKind, as_rational, d_poly, g_poly
from qpos.errors import ParameterError, QposError
from qpos.harness import (
    FAMILY_IDS,
    Verdict,
    check_family,
    default_jobs,
    parse_params,
    report_lines,
    sweep,
)
from qpos.partitions import (
    HookConstraint,
    admissible_partitions,
    hook_differences,
    oracle_gf,
    parse_partition,
)
from qpos.qpoly import Polynomial, poly_shift
from qpos.qseries import qbinom
from qpos.transforms import (
    LIFT_CATALOG,
    KernelKind,
    lift_instance,
    lift_sum,
    transform_sides,
    transform_support,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# parameter sets exercised by `verify-lifts` when no --id is given
DEFAULT_LIFTS = [
    ("4.1", dict(p=2, pp=3, r=1, s=1)),
    ("4.2", dict(p=2, pp=3, r=1, s=1)),
    ("4.4", dict(K=5, i=2, a=0, alpha=1, beta=1)),
    ("4.9(thm2.5 base)", dict(nu=2, s=1)),
    ("4.11", dict(K=5, i=2, a=0, alpha=1, beta=1)),
    ("4.15", dict(p=2, pp=3, r=1, s=1)),
    ("4.16", dict(p=2, pp=3, r=1, s=1)),
    ("4.17", dict(p=2, pp=3, r=1, s=1, t=1)),
    ("4.18", dict(p=2, pp=3, r=1, s=1, t=1)),
    ("4.20", dict(p=2, pp=3, r=1, s=1, t=1)),
    ("4.22", dict(p=2, pp=3, r=1, s=1, t=0, n=3)),
]


def _rational(text):
    try:
        return as_rational(text)
    except (ParameterError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected an integer or fraction a/b, got {text!r}") from exc


def _nonneg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def _posint(text):
    v = _nonneg(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _add_d_flags(p, with_i=True):
    p.add_argument("--K", type=_posint, required=True)
    if with_i:
        p.add_argument("--i", type=_posint, required=True)
    p.add_argument("--N", type=_nonneg, required=True)
    p.add_argument("--M", type=_nonneg, required=True)
    p.add_argument("--alpha", type=_rational, required=True, help="integer or a/b")
    p.add_argument("--beta", type=_rational, required=True, help="integer or a/b")


def _add_report_flags(p):
    p.add_argument("--out", help="write the JSON Lines report here")
    p.add_argument("--timing", action="store_true", help="include timings in the JSON report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpos", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("qbinom", help="Gaussian binomial [m over n] in q^base")
    p.add_argument("--params", default="", help="m=...,n=...")
    p.add_argument("--N", type=_nonneg, help="box width; with --M gives [N+M over M]")
    p.add_argument("--M", type=_nonneg, help="box height")
    p.add_argument("--base", type=_posint, default=1)

    p = sub.add_parser("dpoly", help="evaluate D_{K,i}(N,M; alpha, beta)")
    _add_d_flags(p)
    p.add_argument("--base", type=_posint, default=1, help="report the polynomial in q^base")

    p = sub.add_parser("gpoly", help="evaluate G(N,M; alpha, beta, K)")
    _add_d_flags(p, with_i=False)

    p = sub.add_parser("oracle", help="brute-force partition generating function")
    _add_d_flags(p)
    p.add_argument("--out", help="write the admissible partitions as JSON here")

    p = sub.add_parser("hooks", help="hook differences of a partition")
    p.add_argument("--partition", required=True, help="comma-separated parts, e.g. 5,3,1")

    p = sub.add_parser("verify-transforms", help="check the kernel transformation identities")
    p.add_argument("--kind", choices=[k.value for k in KernelKind], help="default: all kinds")
    p.add_argument("--max-L", type=_nonneg, default=10)
    p.add_argument("--max-a", type=_nonneg, help="check |a| <= max-a (default: support plus 2)")
    _add_report_flags(p)

    p = sub.add_parser("verify-lifts", help="check the lift identities")
    p.add_argument("--id", choices=list(LIFT_CATALOG), help="default: one instance of each")
    p.add_argument("--params", default="", help="instance slots, e.g. p=2,pp=3,r=1,s=1,t=1")
    p.add_argument("--max-L", type=_nonneg, default=6)
    _add_report_flags(p)

    p = sub.add_parser("check-family", help="non-negativity and displayed-sum checks for a family")
    p.add_argument("--id", choices=FAMILY_IDS, required=True)
    p.add_argument("--params", default="", help="e.g. L=2,p=2,pp=3,r=1,s=1")
    _add_report_flags(p)

    p = sub.add_parser("sweep", help="non-negativity sweep over a regime")
    p.add_argument("--regime", choices=[r.value for r in RegimeKind], required=True)
    p.add_argument("--max-size", type=_nonneg, required=True, help="bound on N+M")
    p.add_argument("--params", default="", help="filters: max_K, K, i, den")
    p.add_argument("--jobs", type=_posint, default=None, help="worker processes (default: cores)")
    p.add_argument("--cache-dir", default=None, help="verdict cache (env QPOS_CACHE_DIR)")
    _add_report_flags(p)
    return parser


def _print_poly(P: Polynomial, out):
    out.write(json.dumps(P.to_json(), separators=(",", ":")) + "\n")


def _identity_verdict(key, lhs, rhs, t0) -> Verdict:
    ok = lhs == rhs
    return Verdict(key, lhs.degree, lhs.min_coeff(), None, lhs.offset, ok,
                   int(round((time.perf_counter() - t0) * 1000)), ok,
                   None, None if ok else f"lhs {lhs} != rhs {rhs}")


def _finish(verdicts, summary, args, out) -> int:
    failed = [v for v in verdicts if not v.passed]
    for v in failed:
        extra = f" first negative {v.first_negative}" if v.first_negative else ""
        out.write(f"FAIL {v.params}{extra}{' (' + v.detail + ')' if v.detail else ''}\n")
    out.write(" ".join(f"{k}={v}" for k, v in summary.items()) + "\n")
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report_lines(verdicts, summary, timing=args.timing))
    return EXIT_FAIL if failed else EXIT_OK


def _cmd_qbinom(args, out):
    if args.N is not None or args.M is not None:
        if args.N is None or args.M is None:
            raise ParameterError("--N and --M must be given together")
        m, n = args.N + args.M, args.M
    else:
        params = parse_params(args.params)
        if "m" not in params or "n" not in params:
            raise ParameterError("--params needs m=...,n=... (or give --N and --M)")
        m, n = params["m"], params["n"]
        if m.denominator != 1 or n.denominator != 1:
            raise ParameterError("--params m and n must be integers")
        m, n = int(m), int(n)
    _print_poly(qbinom(m, n, args.base), out)
    return EXIT_OK


def _cmd_dpoly(args, out):
    P = d_poly(DParams(args.K, args.i, args.N, args.M, args.alpha, args.beta))
    _print_poly(P.substitute_power(args.base), out)
    return EXIT_OK


def _cmd_gpoly(args, out):
    _print_poly(g_poly(args.N, args.M, args.alpha, args.beta, args.K), out)
    return EXIT_OK


def _cmd_oracle(args, out):
    c = HookConstraint(args.K, args.i, args.alpha, args.beta)
    P = oracle_gf(args.N, args.M, c)
    _print_poly(P, out)
    if args.out:
        parts = [list(pi) for pi in admissible_partitions(args.N, args.M, c)]
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"partitions": parts, "polynomial": P.to_json()}, fh)
            fh.write("\n")
    return EXIT_OK


def _cmd_hooks(args, out):
    rows = hook_differences(parse_partition(args.partition))
    out.write(json.dumps(rows, separators=(",", ":")) + "\n")
    return EXIT_OK


def _cmd_verify_transforms(args, out):
    t0 = time.perf_counter()
    kinds = [KernelKind(args.kind)] if args.kind else list(KernelKind)
    verdicts = []
    for kind in kinds:
        for L in range(args.max_L + 1):
            if args.max_a is not None:
                shifts = range(-args.max_a, args.max_a + 1)
            else:
                sup = transform_support(kind, L)
                shifts = range(sup.start - 2, sup.stop + 2)
            for a in shifts:
                t1 = time.perf_counter()
                lhs, rhs = transform_sides(kind, L, a)
                verdicts.append(_identity_verdict(f"T|{kind.value}|L={L}|a={a}", lhs, rhs, t1))
    summary = {"checks": len(verdicts), "mismatches": sum(not v.passed for v in verdicts),
               "wall_time": round(time.perf_counter() - t0, 3)}
    return _finish(verdicts, summary, args, out)


def _lift_verdicts(inst_id, params, max_L):
    inst = lift_instance(inst_id, **params)
    verdicts = []
    for L in range(max_L + 1):
        t1 = time.perf_counter()
        lhs = lift_sum(inst.kernel, inst.lhs, L)
        rhs = poly_shift(inst.rhs.evaluate(L), inst.prefactor)
        slots = ",".join(f"{k}={v}" for k, v in sorted(params.items()))
        verdicts.append(_identity_verdict(f"LIFT|{inst_id}|{slots}|L={L}", lhs, rhs, t1))
    return verdicts


def _cmd_verify_lifts(args, out):
    t0 = time.perf_counter()
    if args.id:
        raw = parse_params(args.params)
        params = {}
        for k, v in raw.items():
            params[k] = int(v) if v.denominator == 1 and k not in ("alpha", "beta") else v
        runs = [(args.id, params)]
    else:
        if args.params:
            raise ParameterError("--params needs --id")
        runs = DEFAULT_LIFTS
    verdicts = []
    for inst_id, params in runs:
        verdicts.extend(_lift_verdicts(inst_id, params, args.max_L))
    summary = {"checks": len(verdicts), "mismatches": sum(not v.passed for v in verdicts),
               "wall_time": round(time.perf_counter() - t0, 3)}
    return _finish(verdicts, summary, args, out)


def _cmd_check_family(args, out):
    t0 = time.perf_counter()
    v = check_family(args.id, parse_params(args.params))
    summary = {"checks": 1, "violations": int(not v.passed),
               "wall_time": round(time.perf_counter() - t0, 3)}
    return _finish([v], summary, args, out)


def _cmd_sweep(args, out):
    filters = parse_params(args.params)
    unknown = set(filters) - {"max_K", "K", "i", "den"}
    if unknown:
        raise ParameterError(f"--params: unknown sweep filters {sorted(unknown)}; use max_K, K, i, den")
    kw = {}
    for k, v in filters.items():
        if v.denominator != 1 or v < 1:
            raise ParameterError(f"--params: {k} must be a positive integer, got {v}")
        kw[k] = int(v)
    cache_dir = args.cache_dir or os.environ.get("QPOS_CACHE_DIR")
    jobs = args.jobs or default_jobs()
    verdicts, summary = sweep(args.regime, args.max_size, jobs=jobs, cache_dir=cache_dir, **kw)
    return _finish(verdicts, summary, args, out)


_COMMANDS = {
    "qbinom": _cmd_qbinom,
    "dpoly": _cmd_dpoly,
    "gpoly": _cmd_gpoly,
    "oracle": _cmd_oracle,
    "hooks": _cmd_hooks,
    "verify-transforms": _cmd_verify_transforms,
    "verify-lifts": _cmd_verify_lifts,
    "check-family": _cmd_check_family,
    "sweep": _cmd_sweep,
}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except QposError as exc:
        sys.stderr.write(f"qpos {args.command}: error: {exc}\n")
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
