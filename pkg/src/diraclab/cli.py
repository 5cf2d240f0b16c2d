"""Command-line front end.

Verbs:
    run <config.json>          execute a scenario, write its JSON report
    verify <suite>             run a named invariant suite, print a table
    table <report.json>        render a report's bound rows as csv/md
    list-models                enumerate model kinds and parameters
    list-checks                enumerate check ids

Exit codes: 0 pass, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bounds import THEOREMS
from .errors import ConfigError, HermiticityError, SoundnessError
from .geometry import DEFAULT_RESOLUTION, MODEL_KINDS
from .scenarios import IDENTITY_CHECKS, emit_table, run_scenario
from .suites import SUITES, verify_suite

MODEL_PARAMS = {
    "circle": "radius",
    "ellipse": "a, b",
    "sphere2": "radius",
    "geodesic_sphere_s3": "rho in (0, pi)",
    "flat_torus2": "L1, L2",
    "conformal_torus2": "L1, L2, w_terms [{kx, ky, amp_cos, amp_sin}]",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diraclab",
        description="Verification workbench for hypersurface Dirac operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("config", help="path to a scenario JSON file")
    p_run.add_argument("--output", default=None, help="report path (overrides the config)")

    p_verify = sub.add_parser("verify", help="run a named invariant suite")
    p_verify.add_argument("suite", choices=SUITES)
    p_verify.add_argument(
        "--inject",
        default=None,
        choices=["dh_sign_flip"],
        help="testing hook: inject a known defect; the suite must then fail",
    )
    p_verify.add_argument("--seed", type=int, default=0)

    p_table = sub.add_parser("table", help="render a report as a table")
    p_table.add_argument("report", help="path to a report JSON file")
    p_table.add_argument("--format", choices=["csv", "md"], default="csv")
    p_table.add_argument("--output", default=None, help="output path (default: stdout)")

    sub.add_parser("list-models", help="enumerate model kinds")
    sub.add_parser("list-checks", help="enumerate check ids")
    return parser


def _cmd_run(args) -> int:
    report = run_scenario(args.config, output_path=args.output)
    counts = report.counts()
    print(f"scenario: {args.config}")
    for rec in report.checks:
        mode = "" if rec.mode_index is None else f" mode {rec.mode_index}"
        value = "" if rec.value is None else f" value {rec.value}"
        print(f"  [{rec.status:>14}] {rec.check}{mode}{value}")
    print(
        "verdict: {verdict}  (pass {p}, fail {f}, boundary {b}, n/a {n})  {t:.2f}s".format(
            verdict=report.verdict,
            p=counts.get("pass", 0),
            f=counts.get("fail", 0),
            b=counts.get("boundary", 0),
            n=counts.get("not_applicable", 0),
            t=report.timing_s,
        )
    )
    return 0 if report.verdict == "pass" else 1


def _cmd_verify(args) -> int:
    result = verify_suite(args.suite, mutation=args.inject, seed=args.seed)
    width = max(len(r.name) for r in result.rows) if result.rows else 10
    for row in result.rows:
        mark = "PASS" if row.passed else "FAIL"
        print(f"[{mark}] {row.name:<{width}}  {row.detail}")
    n_fail = sum(not r.passed for r in result.rows)
    print(f"suite {result.suite}: {len(result.rows)} checks, {n_fail} failures")
    if args.inject and result.passed:
        print("injected defect was NOT detected: harness failure")
        return 1
    return 0 if result.passed else 1


def _cmd_table(args) -> int:
    with open(args.report, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    out = args.output or (args.report.rsplit(".", 1)[0] + "." + args.format)
    emit_table(data, out, args.format)
    print(f"wrote {out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "table":
            return _cmd_table(args)
        if args.command == "list-models":
            for kind in MODEL_KINDS:
                print(f"{kind:<20} params: {MODEL_PARAMS[kind]:<50} default resolution: {DEFAULT_RESOLUTION[kind]}")
            return 0
        if args.command == "list-checks":
            print("bounds:")
            for tid, spec in THEOREMS.items():
                print(f"  {tid:<18} operator {spec.operator:<4} {spec.description}")
            print("identities:")
            for cid, desc in IDENTITY_CHECKS.items():
                print(f"  {cid:<18} {desc}")
            return 0
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (SoundnessError, HermiticityError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
