"""Command-line front end.

Exit codes: 0 success, 1 a verification or round-trip failed, 2 bad usage
or malformed input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from typing import Dict, List, Optional

from . import bench, formats
from .gvcode import BudgetExceeded, DEFAULT_BUDGET, derandomized_construct, verify_distance
from .params import CodeParams, derive_params
from .scheme import InconsistentOutcomes, build, decode, outcomes, simulate
from .ssf import DEFAULT_SSF_BUDGET, verify_ssf, verify_ssf_sampled

SCHEMA = "gtscheme.report/1"


class UsageError(Exception):
    pass


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _bool(b) -> str:
    return {True: "true", False: "false", None: "none"}[b]


def _emit(args, report: Dict, text: str):
    if args.json:
        report = {"schema": SCHEMA, "command": args.command, **report}
        print(json.dumps(report, sort_keys=True))
    else:
        print(text)


def _strength(args) -> int:
    if args.r is None:
        raise UsageError("-r is required")
    return args.r + 1 if getattr(args, "gt", False) else args.r


def cmd_params(args) -> int:
    if args.n is None:
        raise UsageError("-n is required")
    p = derive_params(args.n, _strength(args))
    report = {"n": p.n, "r": p.r, "trivial": p.trivial, "t_bound": p.t_bound}
    if p.trivial:
        text = f"t_bound={p.t_bound} trivial=true"
    else:
        c = p.code
        report.update(q=c.q, k=c.k, m=c.m, delta=_frac(c.delta))
        text = f"delta={_frac(c.delta)} q={c.q} k={c.k} m={c.m} t_bound={p.t_bound} trivial=false"
    _emit(args, report, text)
    return 0


def _code_params(args) -> CodeParams:
    explicit = [args.q, args.m, args.k, args.delta]
    if any(v is not None for v in explicit):
        if any(v is None for v in explicit):
            raise UsageError("--q, --m, --k and --delta must be given together")
        return CodeParams(q=args.q, m=args.m, k=args.k, delta=Fraction(args.delta))
    if args.n is None:
        raise UsageError("give -n/-r or --q/--m/--k/--delta")
    p = derive_params(args.n, _strength(args))
    if p.trivial:
        raise UsageError(f"(n={args.n}, r={p.r}) takes the singleton branch; no code is needed")
    return p.code


def cmd_build_code(args) -> int:
    params = _code_params(args)
    start = time.perf_counter()
    g = derandomized_construct(params, mode=args.mode, budget=args.budget)
    elapsed = time.perf_counter() - start
    if args.output:
        formats.write_code(args.output, g)
    report = {
        "q": params.q, "m": params.m, "k": params.k, "delta": _frac(params.delta),
        "threshold": params.threshold, "verified": g.verified, "wall_clock_seconds": elapsed,
    }
    _emit(args, report, f"{params} threshold={params.threshold} verified={_bool(g.verified)}")
    return 0


def cmd_build_scheme(args) -> int:
    if args.n is None:
        raise UsageError("-n is required")
    start = time.perf_counter()
    b = build(args.n, _strength(args), mode=args.mode, budget=args.budget)
    elapsed = time.perf_counter() - start
    if args.output:
        formats.write_scheme(args.output, b.scheme)
    report = {
        "n": b.scheme.n, "r": b.scheme.r, "t": b.scheme.t, "trivial": b.params.trivial,
        "total_incidence": b.scheme.total_incidence, "wall_clock_seconds": elapsed,
    }
    text = f"n={b.scheme.n} r={b.scheme.r} t={b.scheme.t} trivial={_bool(b.params.trivial)}"
    if b.code is not None:
        c = b.params.code
        report.update(q=c.q, k=c.k, m=c.m, delta=_frac(c.delta), verified=b.code.verified)
        text += f" {c} verified={_bool(b.code.verified)}"
    _emit(args, report, text)
    return 0


def _need_input(args):
    if not args.input:
        raise UsageError("-i is required")


def cmd_verify_code(args) -> int:
    _need_input(args)
    g = formats.read_code(args.input)
    threshold = g.params.threshold
    start = time.perf_counter()
    try:
        weight: Optional[int] = verify_distance(g, args.budget)
        verdict = "pass" if weight >= threshold else "fail"
    except BudgetExceeded:
        weight, verdict = None, "unverified"
    report = {
        "q": g.params.q, "m": g.params.m, "k": g.params.k, "delta": _frac(g.params.delta),
        "min_weight": weight, "threshold": threshold, "verdict": verdict,
        "wall_clock_seconds": time.perf_counter() - start,
    }
    _emit(args, report, f"min_weight={weight if weight is not None else 'none'} threshold={threshold} verdict={verdict}")
    return 0 if verdict == "pass" else 1


def cmd_verify_ssf(args) -> int:
    _need_input(args)
    s = formats.read_scheme(args.input)
    r = args.r if args.r is not None else s.r
    start = time.perf_counter()
    check = verify_ssf(s, r, budget=args.ssf_budget)
    method = "exhaustive"
    if check.ok is None and args.trials:
        check = verify_ssf_sampled(s, r, args.trials, args.seed)
        method = "sampled"
    report = {
        "n": s.n, "r": r, "t": s.t, "method": method, "verdict": check.verdict,
        "checked": check.checked, "wall_clock_seconds": time.perf_counter() - start,
        "counterexample": None,
    }
    text = f"n={s.n} r={r} t={s.t} method={method} verdict={check.verdict}"
    if check.counterexample:
        subset, x = check.counterexample
        report["counterexample"] = {"set": list(subset), "item": x}
        text += f" set={','.join(map(str, subset))} item={x}"
    _emit(args, report, text)
    return 0 if check.ok else 1


def _parse_items(text: Optional[str]) -> List[int]:
    if text is None:
        raise UsageError("--defectives is required (comma-separated, may be empty)")
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad item list {text!r}") from None


def cmd_outcomes(args) -> int:
    _need_input(args)
    s = formats.read_scheme(args.input)
    o = outcomes(s, _parse_items(args.defectives))
    if args.output:
        formats.write_outcomes(args.output, o)
    bits = "".join("1" if x else "0" for x in o)
    _emit(args, {"t": s.t, "positives": int(o.sum()), "outcomes": bits}, f"t={s.t} positives={int(o.sum())} outcomes={bits}")
    return 0


def cmd_decode(args) -> int:
    _need_input(args)
    if not args.outcomes:
        raise UsageError("--outcomes is required")
    s = formats.read_scheme(args.input)
    o = formats.read_outcomes(args.outcomes)
    r = args.r if args.r is not None else s.r - 1
    try:
        found = decode(s, o, r)
    except InconsistentOutcomes as exc:
        _emit(args, {"consistent": False, "error": str(exc), "defectives": None}, f"inconsistent: {exc}")
        return 1
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(" ".join(map(str, found)) + "\n")
    _emit(args, {"consistent": True, "defectives": list(found)}, "defectives=" + ",".join(map(str, found)))
    return 0


def cmd_simulate(args) -> int:
    if args.n is None or args.r is None:
        raise UsageError("-n and -r are required")
    trials = None if args.exhaustive else args.trials
    rep = simulate(args.n, args.r, trials, seed=args.seed, mode=args.mode, workers=args.threads)
    report = {
        "n": rep.n, "r": rep.r, "t": rep.t, "trivial": rep.trivial, "q": rep.q, "k": rep.k,
        "m": rep.m, "delta": rep.delta, "trials": rep.trials, "recovered": rep.recovered,
        "failures": [list(f) for f in rep.failures],
        "wall_clock_seconds": rep.build_seconds + rep.decode_seconds,
    }
    text = (
        f"n={rep.n} r={rep.r} t={rep.t} trivial={_bool(rep.trivial)} q={rep.q} k={rep.k} m={rep.m} "
        f"trials={rep.trials} recovered={rep.recovered} failures={len(rep.failures)}"
    )
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(json.dumps({k: v for k, v in report.items() if k != "wall_clock_seconds"}, sort_keys=True) + "\n")
    _emit(args, report, text)
    return 1 if rep.failures else 0


def cmd_bench(args) -> int:
    scaling = bench.construction_scaling(k_start=args.k_start, mode=args.mode)
    sizes = bench.size_table([100, 1000, 10_000], [2, 4, 8])
    lines = []
    for row in scaling:
        ratio = f" ratio={row['ratio']:.2f}" if "ratio" in row else ""
        lines.append(f"scaling q={row['q']} k={row['k']} m={row['m']} seconds={row['seconds']:.4f}{ratio}")
    for row in sizes:
        lines.append(
            f"size n={row['n']} r={row['r']} t={row['t']} trivial={_bool(row['trivial'])} ratio={row['ratio']:.3f}"
        )
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(json.dumps({"sizes": sizes}, sort_keys=True) + "\n")
    _emit(args, {"scaling": scaling, "sizes": sizes}, "\n".join(lines))
    return 0


COMMANDS = {
    "params": cmd_params,
    "build-code": cmd_build_code,
    "build-scheme": cmd_build_scheme,
    "verify-code": cmd_verify_code,
    "verify-ssf": cmd_verify_ssf,
    "outcomes": cmd_outcomes,
    "decode": cmd_decode,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-n", type=int, help="number of items")
    common.add_argument("-r", type=int, help="selection strength (defectives with --gt or for simulate/decode)")
    common.add_argument("--gt", action="store_true", help="treat -r as the number of defectives")
    common.add_argument("--mode", choices=("fast", "exact"), default="fast")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-i", "--input")
    common.add_argument("-o", "--output")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max messages enumerated for code checks")
    common.add_argument("--ssf-budget", type=int, default=DEFAULT_SSF_BUDGET, help="max elementary checks for verify-ssf")
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--json", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gtscheme", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "build-code":
            p.add_argument("--q", type=int)
            p.add_argument("--m", type=int)
            p.add_argument("--k", type=int)
            p.add_argument("--delta")
        elif name == "outcomes":
            p.add_argument("--defectives", help="comma-separated defective items")
        elif name == "decode":
            p.add_argument("--outcomes", help="GTO outcome file")
        elif name == "simulate":
            p.add_argument("--exhaustive", action="store_true", help="try every defective set of size <= r")
        elif name == "bench":
            p.add_argument("--k-start", type=int, default=16)
    return parser


def run(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](args)
    except formats.FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
