"""Command-line interface: JSON reports on stdout, a short summary on stderr.

Exit codes: 0 success, 2 usage or parse error, 3 resource exhaustion
(stream, schedule or enclosure limits).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cf import ConvergentTable, InsufficientPrefix, StreamExhausted, expand_rational, table_from_quotients
from .criteria import certificate_report
from .dr import bound_report
from .enclosure import Undecided, parse_rational
from .lab import CHECKS, run_check
from .qpspec import generate, spec_from_json
from .surd import QuadraticSurd, expand_surd

EXIT_OK, EXIT_USAGE, EXIT_EXHAUSTED = 0, 2, 3
JOBS_ENV = "MAILLET_LAB_JOBS"


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(obj, out: str | None) -> None:
    text = _dump(obj)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_json(path: str) -> tuple[object, str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(raw), hashlib.sha256(raw).hexdigest()
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc


def _load_spec(path: str):
    obj, digest = _read_json(path)
    try:
        return spec_from_json(obj), digest
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: invalid spec: {exc}") from exc


def _manifest(command: str, digest: str | None, params: dict, out: str | None) -> dict:
    return {
        "command": command,
        "input_digest": digest,
        "parameters": params,
        "version": __version__,
        "outputs": [out or "stdout"],
    }


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _surd(text: str) -> QuadraticSurd:
    try:
        P, D, Q = (int(x) for x in text.split(","))
        return QuadraticSurd(P, D, Q)
    except ValueError as exc:
        raise UsageError(f"--surd expects P,D,Q with D a positive non-square and Q != 0: {exc}") from exc


def _stage_range(text: str) -> range:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError as exc:
        raise UsageError(f"--stages expects a..b, got {text!r}") from exc
    if lo < 0 or hi < lo:
        raise UsageError(f"empty or negative stage range {text!r}")
    return range(lo, hi + 1)


def _quotients(args, depth: int | None) -> tuple[list[int], bool, str | None]:
    """Quotients for expand/table, whether they are the complete expansion, and an input digest."""
    if args.rational is not None:
        x = _rational(args.rational)
        terms = expand_rational(x.numerator, x.denominator)
        if depth is not None:
            return terms[: depth + 1], depth + 1 >= len(terms), None
        return terms, True, None
    if depth is None:
        raise UsageError("--depth is required for --surd and --spec")
    if args.surd is not None:
        return expand_surd(_surd(args.surd)).terms(depth + 1), False, None
    spec, digest = _load_spec(args.spec)
    return generate(spec, depth).prefix(depth), False, digest


def cmd_expand(args) -> int:
    if args.depth is not None and args.depth < 0:
        raise UsageError("--depth must be non-negative")
    terms, _, _ = _quotients(args, args.depth)
    sys.stdout.write(" ".join(str(a) for a in terms) + "\n")
    return EXIT_OK


def cmd_table(args) -> int:
    if args.depth is not None and args.depth < 0:
        raise UsageError("--depth must be non-negative")
    terms, complete, _ = _quotients(args, args.depth)
    table = table_from_quotients(terms, complete=complete)
    _emit(table.to_json(), args.out)
    print(f"table: {len(table)} convergents, complete={complete}", file=sys.stderr)
    return EXIT_OK


def cmd_certify(args) -> int:
    spec, digest = _load_spec(args.spec)
    eps = _rational(args.epsilon)
    if args.horizon < 2:
        raise UsageError("--horizon must be at least 2")
    try:
        report = certificate_report(spec, args.horizon, eps, args.mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report["manifest"] = _manifest("certify", digest, {"horizon": args.horizon, "epsilon": args.epsilon,
                                                       "mode": args.mode}, args.out)
    _emit(report, args.out)
    for cert in report["certificates"]:
        print(f"{cert['theorem_id']:12s} {cert['verdict']}", file=sys.stderr)
    return EXIT_OK


def _lab_job(payload):
    spec_obj, k, check, variant, eta, d = payload
    return run_check(spec_from_json(spec_obj), k, check, variant, eta, d)


def _jobs(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError(f"{JOBS_ENV} must be an integer, got {env!r}") from exc
    return 1


def cmd_lab(args) -> int:
    spec, digest = _load_spec(args.spec)
    stages = _stage_range(args.stages)
    eta = _rational(args.eta)
    jobs = _jobs(args.jobs)
    spec_obj = spec.to_json()
    payloads = [(spec_obj, k, args.check, args.variant, eta, args.d) for k in stages]
    if jobs == 1 or len(payloads) == 1:
        rows = [_lab_job(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_lab_job, payloads))  # map keeps stage order
    report = {
        "check": args.check,
        "variant": args.variant,
        "stages": rows,
        "manifest": _manifest("lab", digest, {"stages": args.stages, "check": args.check, "variant": args.variant,
                                              "eta": args.eta, "d": args.d}, args.out),
    }
    _emit(report, args.out)
    for row in rows:
        if "error" in row:
            status = f"error: {row['error']}"
        else:
            rep = row.get("report", {})
            status = ", ".join(f"{key}={rep[key]}" for key in ("certified", "proximity_certified", "continuant_bound")
                               if key in rep) or "ok"
        print(f"stage {row['k']}: {status}", file=sys.stderr)
    return EXIT_OK


def cmd_dr(args) -> int:
    eps = _rational(args.epsilon)
    table = None
    digest = None
    if args.table:
        obj, digest = _read_json(args.table)
        try:
            table = ConvergentTable.from_json(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{args.table}: invalid convergent table: {exc}") from exc
        if table.depth < args.N + 1:
            raise UsageError(f"table depth {table.depth} is below N + 1 = {args.N + 1}")
    try:
        report = bound_report(args.N, eps, table)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report["manifest"] = _manifest("dr", digest, {"N": args.N, "epsilon": args.epsilon}, args.out)
    _emit(report, args.out)
    s = report["schedule"]
    print(f"nu={s['nu']} k={s['k']} exponent={s['exponent']} (~{s['approx_exponent']:.6f})", file=sys.stderr)
    if "partition" in report:
        print(f"|S_j| = {report['partition']['counts']}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasicf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--rational", help="p/q or a decimal")
        g.add_argument("--surd", help="P,D,Q for (P + sqrt(D))/Q")
        g.add_argument("--spec", help="quasi-periodic spec JSON file")
        p.add_argument("--depth", type=int, help="last index n; prints a_0 .. a_n")

    p = sub.add_parser("expand", help="print partial quotients")
    source(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("table", help="emit a convergent table dump")
    source(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("certify", help="certify criterion hypotheses for a spec")
    p.add_argument("spec")
    p.add_argument("--horizon", type=int, default=64)
    p.add_argument("--epsilon", default="1/100")
    p.add_argument("--mode", choices=("auto", "horizon"), default="auto")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("lab", help="run approximation checks per stage")
    p.add_argument("spec")
    p.add_argument("--stages", required=True, help="a..b (inclusive)")
    p.add_argument("--check", required=True, choices=CHECKS)
    p.add_argument("--variant", choices=("amel1", "amel3"), default="amel1")
    p.add_argument("--eta", default="1/10")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--jobs", type=int, help=f"worker processes (default: ${JOBS_ENV} or 1)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lab)

    p = sub.add_parser("dr", help="multi-level denominator growth bound")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--table", help="convergent table dump for partition counts")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dr)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"quasicf {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StreamExhausted, InsufficientPrefix, Undecided) as exc:
        print(f"quasicf {args.command}: resource limit: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED


if __name__ == "__main__":
    sys.exit(main())
